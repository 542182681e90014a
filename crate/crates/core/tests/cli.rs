use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let d = std::env::temp_dir().join(format!("tentlab-cli-{tag}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&d);
        std::fs::create_dir_all(&d).unwrap();
        Scratch(d)
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let p = self.0.join(name);
        std::fs::write(&p, body).unwrap();
        p
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn lab(args: &[&Path]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lab")).args(args).output().unwrap()
}

fn run(cfg: &Path, out: &Path) -> Output {
    lab(&[Path::new("run"), cfg, Path::new("--out"), out])
}

fn report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{name}.json"))).unwrap()).unwrap()
}

#[test]
fn doubling_of_lebesgue_measure() {
    let s = Scratch::new("doubling");
    let cfg = s.file("unit.toml", "experiment = \"doubling\"\n[weight]\npreset = \"standard\"\n");
    let out = run(&cfg, &s.0);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&s.0, "unit");
    assert!((r["doubling"]["C"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    assert_eq!(r["doubling"]["member"], Value::Bool(true));
    let csv = std::fs::read_to_string(s.0.join("unit.csv")).unwrap();
    assert!(csv.starts_with("level,quantity,value\n"));
}

#[test]
fn non_doubling_weight_reports_infinity() {
    let s = Scratch::new("exp");
    let cfg = s.file("e.toml", "experiment = \"doubling\"\n[weight]\npreset = \"exponential\"\n");
    assert_eq!(run(&cfg, &s.0).status.code(), Some(0));
    let r = report(&s.0, "e");
    assert_eq!(r["doubling"]["C"], Value::String("inf".into()));
    assert_eq!(r["doubling"]["member"], Value::Bool(false));
}

#[test]
fn runs_are_deterministic() {
    let s = Scratch::new("det");
    let body = "experiment = \"factorization\"\nseed = 3\n[exponents]\np = 1.0\nq = 2.0\n[grid]\ndepth = 5\n[run]\ninstances = 2\n";
    let cfg = s.file("fac.toml", body);
    let (a, b) = (s.0.join("a"), s.0.join("b"));
    assert_eq!(run(&cfg, &a).status.code(), Some(0));
    assert_eq!(run(&cfg, &b).status.code(), Some(0));
    for ext in ["json", "csv"] {
        let x = std::fs::read(a.join(format!("fac.{ext}"))).unwrap();
        let y = std::fs::read(b.join(format!("fac.{ext}"))).unwrap();
        assert_eq!(x, y, "fac.{ext} differs between runs");
    }
    let r = report(&a, "fac");
    assert_eq!(r["seed"], Value::from(3));
    assert!(r["flags"].as_array().unwrap().is_empty());
}

#[test]
fn bad_configs_exit_with_two() {
    let s = Scratch::new("bad");
    let cases = [
        ("syntax.toml", "experiment = \n"),
        ("unknown.toml", "experiment = \"nope\"\n"),
        ("exponent.toml", "experiment = \"carleson\"\n[exponents]\np = -1.0\n"),
    ];
    for (name, body) in cases {
        let out = run(&s.file(name, body), &s.0);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(!out.stderr.is_empty(), "{name}");
    }
    assert_eq!(run(&s.0.join("missing.toml"), &s.0).status.code(), Some(2));
}

#[test]
fn invariant_flags_exit_with_one() {
    // An atom beyond the grid sits in no cone over the grid cells.
    let s = Scratch::new("flag");
    s.file("far.csv", "x,y,mass\n0.97,0.0,1.0\n");
    let cfg = s.file(
        "far.toml",
        "experiment = \"cone-kernel\"\n[measure]\npreset = \"points\"\npath = \"far.csv\"\n[grid]\ndepth = 3\n[run]\ninstances = 1\n",
    );
    let out = run(&cfg, &s.0);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("flag"));
    assert!(!report(&s.0, "far")["flags"].as_array().unwrap().is_empty());
}

#[test]
fn several_configs_take_the_worst_exit_code() {
    let s = Scratch::new("many");
    let good = s.file("good.toml", "experiment = \"doubling\"\n");
    let bad = s.file("bad.toml", "experiment = 1\n");
    let out = lab(&[Path::new("run"), &good, &bad, Path::new("--out"), &s.0]);
    assert_eq!(out.status.code(), Some(2));
    assert!(s.0.join("good.json").exists());
}

#[test]
fn counterexample_splits_the_conditions() {
    let s = Scratch::new("cx");
    let cfg = s.file(
        "cx.toml",
        "experiment = \"carleson\"\n[weight]\npreset = \"log\"\n[measure]\npreset = \"counterexample\"\n[grid]\nratio = 0.015625\n[run]\ndepths = [1, 3, 7]\n",
    );
    let out = run(&cfg, &s.0);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let notes = report(&s.0, "cx")["notes"].to_string();
    assert!(notes.contains("Delta quotient sup Bounded"), "{notes}");
    assert!(notes.contains("M_omega(mu) sup Diverging"), "{notes}");
}

#[test]
fn presets_are_listed() {
    let out = lab(&[Path::new("presets")]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["standard", "log", "exponential", "counterexample", "lattice", "cone-kernel"] {
        assert!(text.contains(name), "missing {name}");
    }
}
