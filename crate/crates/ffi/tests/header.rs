use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include "tentlab.h"
#include <math.h>
#include <stdio.h>

int main(void) {
    LabWeight *w = NULL;
    if (lab_weight_standard(1.0, &w) != LAB_STATUS_OK) return 1;
    double t = 0.0;
    if (lab_weight_tail(w, 0.0, &t) != LAB_STATUS_OK) return 2;
    if (fabs(t - 2.0 / 3.0) > 1e-9) return 3;
    if (lab_weight_tail(w, 2.0, &t) != LAB_STATUS_DOMAIN) return 4;
    if (lab_last_error_message()[0] == '\0') return 5;
    lab_weight_free(w);
    puts("ok");
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // tests/<exe> lives in target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_header() {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let lib = target_dir().join("libtentlab_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let dir = std::env::temp_dir().join(format!("tentlab-header-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let bin = dir.join("main");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "compiling against tentlab.h failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
    std::fs::remove_dir_all(&dir).unwrap();
}
