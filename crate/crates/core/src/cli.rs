//! Experiment driver: TOML configs in, JSON report and per-level CSV out.

use crate::analytic::default_lambda;
use crate::atomic::{decompose_tp_infty, decompose_tp_q, factorize, validate_atom};
use crate::carleson::{compare, CarlesonOptions, Level, TestFamily};
use crate::error::{validation, LabError, Result};
use crate::grid::{GridSpec, PolarGrid};
use crate::maximal::{MaximalEngine, MaximalMode, OmegaSource};
use crate::measure::{DiscMeasure, SeparatedSequence};
use crate::tent::{TentOptions, TentSpace};
use crate::weights::RadialWeight;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Coverage floor for the stopping-time construction.
const COVERAGE_FLOOR: f64 = 0.5;
const FUBINI_TOL: f64 = 1e-9;
const PRODUCT_TOL: f64 = 1e-9;
const RECONSTRUCTION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Doubling,
    Carleson,
    TentDuality,
    Factorization,
    Atoms,
    Maximal,
    ConeKernel,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Doubling => "doubling",
            Experiment::Carleson => "carleson",
            Experiment::TentDuality => "tent-duality",
            Experiment::Factorization => "factorization",
            Experiment::Atoms => "atoms",
            Experiment::Maximal => "maximal",
            Experiment::ConeKernel => "cone-kernel",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightSpec {
    Standard {
        #[serde(default)]
        alpha: f64,
    },
    Log,
    Exponential,
    Table {
        path: PathBuf,
    },
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec::Standard { alpha: 0.0 }
    }
}

impl WeightSpec {
    pub fn build(&self, base: &Path) -> Result<RadialWeight> {
        match self {
            WeightSpec::Standard { alpha } => RadialWeight::standard(*alpha),
            WeightSpec::Log => Ok(RadialWeight::log()),
            WeightSpec::Exponential => Ok(RadialWeight::exponential()),
            WeightSpec::Table { path } => RadialWeight::from_csv(base.join(path)),
        }
    }
}

fn default_delta() -> f64 {
    0.5
}

fn default_lo() -> f64 {
    0.2
}

fn default_hi() -> f64 {
    1.0
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeasureSpec {
    Zero,
    Hyperbolic,
    Counterexample,
    /// `scale (1 − |z|)^exponent ω dA` on the grid.
    Density {
        #[serde(default)]
        exponent: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// Atoms from a CSV of `x,y,mass` lines.
    Points {
        path: PathBuf,
    },
    /// A δ-lattice with masses `U ω(S(z))^omega_power (1 − |z|)^exponent`, `U` uniform in `[lo, hi)`.
    Lattice {
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default)]
        exponent: f64,
        #[serde(default)]
        omega_power: f64,
        #[serde(default = "default_lo")]
        lo: f64,
        #[serde(default = "default_hi")]
        hi: f64,
    },
}

impl Default for MeasureSpec {
    fn default() -> Self {
        MeasureSpec::Lattice { delta: default_delta(), exponent: 0.0, omega_power: 0.0, lo: 0.2, hi: 1.0 }
    }
}

impl MeasureSpec {
    /// Builds the measure on `grid`; lattices are drawn from `lattice_seed` so that
    /// refinements of the same config are nested.
    pub fn build(&self, weight: &RadialWeight, grid: &Arc<PolarGrid>, lattice_seed: u64, base: &Path) -> Result<DiscMeasure> {
        match self {
            MeasureSpec::Zero => Ok(DiscMeasure::zero()),
            MeasureSpec::Hyperbolic => Ok(DiscMeasure::hyperbolic(grid.clone())),
            MeasureSpec::Counterexample => Ok(DiscMeasure::counterexample(grid.clone(), weight)),
            MeasureSpec::Density { exponent, scale } => {
                let phi: Vec<f64> = grid.points().iter().map(|z| scale * (1.0 - z.modulus()).powf(*exponent)).collect();
                DiscMeasure::weighted_density(grid.clone(), &phi, weight)
            }
            MeasureSpec::Points { path } => DiscMeasure::from_csv(base.join(path)),
            MeasureSpec::Lattice { delta, exponent, omega_power, lo, hi } => {
                if !(0.0 < *lo && lo < hi) {
                    return validation(format!("lattice mass range [{lo}, {hi}) is empty or non-positive"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(lattice_seed);
                let seq = SeparatedSequence::lattice(*delta, grid.outer_radius(), &mut rng)?;
                let mut masses = Vec::with_capacity(seq.len());
                for z in &seq.points {
                    let om = if *omega_power == 0.0 { 1.0 } else { weight.square_mass(z)?.powf(*omega_power) };
                    masses.push(rng.gen_range(*lo..*hi) * om * (1.0 - z.modulus()).powf(*exponent));
                }
                DiscMeasure::from_sequence(&seq, &masses)
            }
        }
    }

    fn lattice_delta(&self) -> f64 {
        match self {
            MeasureSpec::Lattice { delta, .. } => *delta,
            _ => default_delta(),
        }
    }
}

fn default_p() -> f64 {
    2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Exponents {
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default = "default_p")]
    pub q: f64,
    #[serde(default)]
    pub n: u32,
}

impl Default for Exponents {
    fn default() -> Self {
        Exponents { p: 2.0, q: 2.0, n: 0 }
    }
}

/// Experiment-specific knobs; each experiment reads the ones it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunParams {
    pub instances: usize,
    pub r_max: f64,
    /// Explicit refinement depths; derived from the grid depth when empty.
    pub depths: Vec<u32>,
    pub levels: u32,
    pub step: u32,
    /// Offsets added to `λ₀` in the cone-kernel experiment.
    pub lambda_offsets: Vec<f64>,
    pub alpha: f64,
    pub n_max: u32,
    pub angles: usize,
    pub kernel_sums: usize,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            instances: 10,
            r_max: 0.999,
            depths: Vec::new(),
            levels: 3,
            step: 2,
            lambda_offsets: vec![1.0, 2.0, 4.0],
            alpha: 1.0,
            n_max: 8,
            angles: 8,
            kernel_sums: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    pub name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub weight: WeightSpec,
    #[serde(default)]
    pub measure: MeasureSpec,
    #[serde(default)]
    pub exponents: Exponents,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub run: RunParams,
    #[serde(default)]
    pub carleson: CarlesonOptions,
    #[serde(default)]
    pub output: OutputSpec,
    /// Directory that relative paths in the config resolve against.
    #[serde(skip)]
    pub base: PathBuf,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::parse(&text)?;
        cfg.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        if cfg.output.name.is_none() {
            cfg.output.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let e = &self.exponents;
        if !(e.p > 0.0 && e.q > 0.0) {
            return Err(LabError::Config(format!("exponents must be positive, got p = {}, q = {}", e.p, e.q)));
        }
        self.grid.validate().map_err(|e| LabError::Config(e.to_string()))?;
        if self.experiment == Experiment::Carleson {
            let depths = self.depths();
            if depths.iter().any(|d| *d < 1) || depths.windows(2).any(|w| w[0] >= w[1]) {
                return Err(LabError::Config(format!("refinement depths {depths:?} must increase from 1")));
            }
            if depths.last().copied().unwrap_or(0) < 3 {
                return Err(LabError::Config("refinement experiments need grid depth >= 3".into()));
            }
        }
        if matches!(self.experiment, Experiment::TentDuality) && !(e.p > 1.0 && e.q > 1.0 && e.p.is_finite() && e.q.is_finite()) {
            return Err(LabError::Config("tent duality needs finite p, q > 1".into()));
        }
        if self.run.instances == 0 {
            return Err(LabError::Config("at least one instance is needed".into()));
        }
        Ok(())
    }

    /// Refinement depths of the carleson experiment.
    pub fn depths(&self) -> Vec<u32> {
        if !self.run.depths.is_empty() {
            return self.run.depths.clone();
        }
        let top = self.grid.depth as i64;
        let span = (self.run.levels.max(1) as i64 - 1) * self.run.step as i64;
        (0..self.run.levels.max(1) as i64).map(|i| (top - span + i * self.run.step as i64).max(1) as u32).collect()
    }

    fn output_name(&self) -> String {
        self.output.name.clone().unwrap_or_else(|| self.experiment.name().to_string())
    }
}

/// One line of the per-level CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub level: u64,
    pub quantity: String,
    pub value: f64,
}

fn row(level: impl Into<u64>, quantity: impl Into<String>, value: f64) -> Row {
    Row { level: level.into(), quantity: quantity.into(), value }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub report: Value,
    pub rows: Vec<Row>,
    pub flags: Vec<String>,
}

impl RunOutcome {
    pub fn report_json(&self) -> String {
        serde_json::to_string_pretty(&self.report).expect("reports serialize") + "\n"
    }

    pub fn csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    /// Writes `<name>.json` and `<name>.csv` into `dir`; returns both paths.
    pub fn write(&self, dir: &Path, name: &str) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let json = dir.join(format!("{name}.json"));
        let csv = dir.join(format!("{name}.csv"));
        std::fs::write(&json, self.report_json())?;
        std::fs::write(&csv, self.csv()?)?;
        Ok((json, csv))
    }
}

fn grid_at(spec: GridSpec, depth: u32) -> Result<Arc<PolarGrid>> {
    Ok(Arc::new(PolarGrid::new(spec.with_depth(depth))?))
}

fn finish(cfg: &ExperimentConfig, weight: &RadialWeight, body: Value, rows: Vec<Row>, flags: Vec<String>) -> RunOutcome {
    let mut report = json!({
        "experiment": cfg.experiment.name(),
        "seed": cfg.seed,
        "weight": weight.name(),
    });
    let obj = report.as_object_mut().unwrap();
    if let Value::Object(map) = body {
        obj.extend(map);
    }
    obj.insert("flags".into(), json!(flags));
    RunOutcome { report, rows, flags }
}

/// Runs one experiment. Deterministic given the config; all randomness is drawn from one
/// generator seeded with `cfg.seed`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let weight = cfg.weight.build(&cfg.base)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match cfg.experiment {
        Experiment::Doubling => doubling(cfg, &weight),
        Experiment::Carleson => carleson(cfg, &weight, &mut rng),
        Experiment::TentDuality => tent_duality(cfg, &weight, &mut rng),
        Experiment::Factorization => factorization(cfg, &weight, &mut rng),
        Experiment::Atoms => atoms(cfg, &weight, &mut rng),
        Experiment::Maximal => maximal(cfg, &weight, &mut rng),
        Experiment::ConeKernel => cone_kernel(cfg, &weight, &mut rng),
    }
}

/// Runs and writes the artifacts; `out` overrides the configured directory.
pub fn run_and_write(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<(RunOutcome, PathBuf, PathBuf)> {
    let outcome = run_experiment(cfg)?;
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.dir.as_ref().map(|d| cfg.base.join(d)))
        .unwrap_or_else(|| PathBuf::from("lab-out"));
    let (j, c) = outcome.write(&dir, &cfg.output_name())?;
    Ok((outcome, j, c))
}

fn doubling(cfg: &ExperimentConfig, weight: &RadialWeight) -> Result<RunOutcome> {
    let rep = weight.doubling_report(cfg.run.r_max);
    let cmp = weight.comparability(64);
    let mut rows = Vec::new();
    let mut j = 2u32;
    loop {
        let r = 1.0 - 0.5f64.powf(j as f64 / 2.0);
        if r > cfg.run.r_max {
            break;
        }
        let ratio = weight.tail(r)? / weight.tail(0.5 * (1.0 + r))?;
        rows.push(row(j, "tail_ratio", ratio));
        j += 1;
    }
    let mut doubling = json!(rep);
    doubling["C"] = num(rep.c);
    let body = json!({ "doubling": doubling, "comparability": { "K": num(cmp.k()), "detail": cmp } });
    Ok(finish(cfg, weight, body, rows, Vec::new()))
}

fn carleson(cfg: &ExperimentConfig, weight: &RadialWeight, rng: &mut ChaCha8Rng) -> Result<RunOutcome> {
    let lattice_seed: u64 = rng.gen();
    let family_seed: u64 = rng.gen();
    let e = cfg.exponents;
    let mut levels = Vec::new();
    for d in cfg.depths() {
        let grid = grid_at(cfg.grid, d)?;
        let measure = cfg.measure.build(weight, &grid, lattice_seed, &cfg.base)?;
        levels.push(Level { depth: d, grid, measure });
    }
    let mut opts = cfg.carleson;
    let lambda = match opts.lambda {
        Some(l) => l,
        None => default_lambda(weight)
            .ok_or_else(|| LabError::Validation(format!("no kernel exponent certified for {}", weight.name())))?,
    };
    opts.lambda = Some(lambda);
    let r_max = levels.last().unwrap().grid.outer_radius();
    let mut frng = ChaCha8Rng::seed_from_u64(family_seed);
    let family = TestFamily::new(weight, e.p, lambda, r_max, cfg.run.angles, cfg.run.kernel_sums, &mut frng)?;
    let cmp = compare(&levels, weight, e.p, e.q, e.n, &opts, &family)?;
    let mut rows = Vec::new();
    for c in &cmp.conditions.conditions {
        for (d, v) in c.depths.iter().zip(&c.values) {
            rows.push(row(*d, c.name.clone(), *v));
        }
    }
    for (d, v) in cmp.embedding.depths.iter().zip(&cmp.embedding.values) {
        rows.push(row(*d, "embedding", *v));
    }
    let body = json!({
        "exponents": e,
        "measure": levels.last().unwrap().measure.label(),
        "conditions": cmp.conditions,
        "embedding": cmp.embedding,
        "brackets": cmp.brackets,
        "notes": cmp.notes,
    });
    Ok(finish(cfg, weight, body, rows, cmp.flags))
}

/// Tent space over the configured point set, or a fresh random lattice with masses in `[0.2, 1)`.
fn random_space(
    cfg: &ExperimentConfig,
    weight: &RadialWeight,
    grid: &Arc<PolarGrid>,
    rng: &mut ChaCha8Rng,
) -> Result<TentSpace> {
    let nu = if let MeasureSpec::Points { .. } = cfg.measure {
        cfg.measure.build(weight, grid, 0, &cfg.base)?
    } else {
        let seq = SeparatedSequence::lattice(cfg.measure.lattice_delta(), grid.outer_radius(), rng)?;
        let masses: Vec<f64> = (0..seq.len()).map(|_| rng.gen_range(0.2..1.0)).collect();
        DiscMeasure::from_sequence(&seq, &masses)?
    };
    let opts = TentOptions { n_max: cfg.run.n_max, ..TentOptions::default() };
    TentSpace::new(nu, weight, grid.clone(), opts)
}

fn signed(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// JSON has no infinities; they are written as the string `"inf"`.
fn num(x: f64) -> Value {
    if x.is_infinite() {
        json!(if x > 0.0 { "inf" } else { "-inf" })
    } else {
        json!(x)
    }
}

fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NAN, f64::max)
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NAN, f64::min)
}

fn tent_duality(cfg: &ExperimentConfig, weight: &RadialWeight, rng: &mut ChaCha8Rng) -> Result<RunOutcome> {
    let grid = grid_at(cfg.grid, cfg.grid.depth)?;
    let (p, q) = (cfg.exponents.p, cfg.exponents.q);
    let (pc, qc) = (conjugate(p), conjugate(q));
    let (mut fub, mut pair, mut cov) = (Vec::new(), Vec::new(), Vec::new());
    let mut rows = Vec::new();
    let mut flags = Vec::new();
    for i in 0..cfg.run.instances {
        let ts = random_space(cfg, weight, &grid, rng)?;
        let f = signed(ts.len(), rng);
        let g = signed(ts.len(), rng);
        let a = ts.area_integral(&f, q)?;
        let b = ts.fubini_sum(&f, q)?;
        let err = if b == 0.0 { a.abs() } else { (a / b - 1.0).abs() };
        let ratio = ts.pairing(&f, &g)?.abs() / (ts.norm(&f, p, q)? * ts.norm(&g, pc, qc)?);
        let c3 = ts.measure_c3(&g, qc, 5.0 / 6.0)?;
        let prof = ts.stopping_time(&g, qc, (4.0 * c3).powf(1.0 / qc))?;
        let c = ts
            .grid()
            .points()
            .iter()
            .filter(|z| z.modulus() >= 5.0 / 6.0)
            .filter_map(|z| ts.coverage(&prof, z))
            .fold(1.0, f64::min);
        if err > FUBINI_TOL {
            flags.push(format!("instance {i}: Fubini identity off by {err:e}"));
        }
        if c < COVERAGE_FLOOR {
            flags.push(format!("instance {i}: stopping-time coverage {c} below {COVERAGE_FLOOR}"));
        }
        rows.push(row(i as u64, "fubini_error", err));
        rows.push(row(i as u64, "pairing_ratio", ratio));
        rows.push(row(i as u64, "c3", c3));
        rows.push(row(i as u64, "coverage", c));
        fub.push(err);
        pair.push(ratio);
        cov.push(c);
    }
    let body = json!({
        "exponents": { "p": p, "q": q, "p_conjugate": pc, "q_conjugate": qc },
        "instances": cfg.run.instances,
        "fubini_max_error": max_of(&fub),
        "pairing_ratio": [min_of(&pair), max_of(&pair)],
        "coverage_min": min_of(&cov),
    });
    Ok(finish(cfg, weight, body, rows, flags))
}

fn factorization(cfg: &ExperimentConfig, weight: &RadialWeight, rng: &mut ChaCha8Rng) -> Result<RunOutcome> {
    let grid = grid_at(cfg.grid, cfg.grid.depth)?;
    let (p, q) = (cfg.exponents.p, cfg.exponents.q);
    let mut rows = Vec::new();
    let mut flags = Vec::new();
    let mut inst = Vec::new();
    for i in 0..cfg.run.instances {
        let ts = random_space(cfg, weight, &grid, rng)?;
        let f = signed(ts.len(), rng);
        let fac = factorize(&ts, &f, p, q, None)?;
        let err = fac.product_error(&f);
        if err > PRODUCT_TOL {
            flags.push(format!("instance {i}: f = gh off by {err:e}"));
        }
        let gf = fac.g_norm / fac.f_norm;
        rows.push(row(i as u64, "product_error", err));
        rows.push(row(i as u64, "g_over_f", gf));
        rows.push(row(i as u64, "h_norm", fac.h_norm));
        rows.push(row(i as u64, "balayage_constant", fac.balayage_constant));
        inst.push(json!({
            "points": ts.len(),
            "f_norm": fac.f_norm,
            "g_norm": fac.g_norm,
            "h_norm": fac.h_norm,
            "product_error": err,
            "balayage_constant": fac.balayage_constant,
        }));
    }
    let body = json!({ "exponents": { "p": p, "q": q }, "instances": inst });
    Ok(finish(cfg, weight, body, rows, flags))
}

fn atoms(cfg: &ExperimentConfig, weight: &RadialWeight, rng: &mut ChaCha8Rng) -> Result<RunOutcome> {
    let grid = grid_at(cfg.grid, cfg.grid.depth)?;
    let (p, q) = (cfg.exponents.p, cfg.exponents.q);
    let mut rows = Vec::new();
    let mut flags = Vec::new();
    let mut ratios = Vec::new();
    for i in 0..cfg.run.instances {
        let ts = random_space(cfg, weight, &grid, rng)?;
        let f = signed(ts.len(), rng);
        let d = if q.is_infinite() { decompose_tp_infty(&ts, &f, p)? } else { decompose_tp_q(&ts, &f, p, q)?.0 };
        let err = d.reconstruction_error(&f);
        let mut invalid = 0usize;
        for a in &d.pieces {
            if !validate_atom(&ts, a, p, q)?.valid {
                invalid += 1;
            }
        }
        if err > RECONSTRUCTION_TOL {
            flags.push(format!("instance {i}: reconstruction off by {err:e}"));
        }
        if invalid > 0 {
            flags.push(format!("instance {i}: {invalid} atoms fail validation"));
        }
        rows.push(row(i as u64, "reconstruction_error", err));
        rows.push(row(i as u64, "ratio", d.ratio()));
        rows.push(row(i as u64, "atoms", d.pieces.len() as f64));
        ratios.push(d.ratio());
    }
    let body = json!({
        "exponents": { "p": num(p), "q": num(q) },
        "instances": cfg.run.instances,
        "ratio_bracket": [min_of(&ratios), max_of(&ratios)],
    });
    Ok(finish(cfg, weight, body, rows, flags))
}

fn maximal(cfg: &ExperimentConfig, weight: &RadialWeight, rng: &mut ChaCha8Rng) -> Result<RunOutcome> {
    let grid = grid_at(cfg.grid, cfg.grid.depth)?;
    let mu = cfg.measure.build(weight, &grid, rng.gen(), &cfg.base)?;
    let points: Vec<_> = grid.points().iter().copied().filter(|z| z.modulus() >= 0.5).collect();
    let modes = [("standard", MaximalMode::Standard), ("dyadic-square", MaximalMode::DyadicSquare), (
        "dyadic-tent",
        MaximalMode::DyadicTent,
    )];
    let mut values = Vec::new();
    let mut sups = serde_json::Map::new();
    let mut rows = Vec::new();
    let mut skipped = 0;
    for (name, mode) in modes {
        let eng = MaximalEngine::new(&mu, weight, cfg.run.alpha, mode, cfg.run.n_max, OmegaSource::grid(grid.clone(), weight))?;
        let v = eng.values(&points);
        let sup = max_of(&v);
        rows.push(row(cfg.grid.depth, format!("sup_{name}"), sup));
        sups.insert(name.into(), json!(sup));
        skipped += eng.skipped();
        values.push(v);
    }
    let mut brackets = serde_json::Map::new();
    for (a, b) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let r: Vec<f64> = values[a].iter().zip(&values[b]).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| x / y).collect();
        brackets.insert(format!("{}/{}", modes[a].0, modes[b].0), json!([min_of(&r), max_of(&r)]));
    }
    let body = json!({
        "measure": mu.label(),
        "alpha": cfg.run.alpha,
        "samples": points.len(),
        "sup": sups,
        "brackets": brackets,
        "skipped": skipped,
    });
    Ok(finish(cfg, weight, body, rows, Vec::new()))
}

fn cone_kernel(cfg: &ExperimentConfig, weight: &RadialWeight, rng: &mut ChaCha8Rng) -> Result<RunOutcome> {
    let grid = grid_at(cfg.grid, cfg.grid.depth)?;
    let lambda0 = weight
        .doubling_report(cfg.run.r_max)
        .lambda0
        .ok_or_else(|| LabError::Validation(format!("no kernel exponent certified for {}", weight.name())))?;
    let p = cfg.exponents.p;
    let mut rows = Vec::new();
    let mut flags = Vec::new();
    let mut ratios = vec![Vec::new(); cfg.run.lambda_offsets.len()];
    for i in 0..cfg.run.instances {
        let ts = random_space(cfg, weight, &grid, rng)?;
        for (k, off) in cfg.run.lambda_offsets.iter().enumerate() {
            let c = ts.cone_kernel_ratio(p, lambda0 + off)?;
            if c.flagged {
                flags.push(format!("instance {i}, lambda {}: ratio {} flagged", lambda0 + off, c.ratio));
            }
            rows.push(row(i as u64, format!("ratio_lambda0+{off}"), c.ratio));
            ratios[k].push(c.ratio);
        }
    }
    let brackets: Vec<Value> = cfg
        .run
        .lambda_offsets
        .iter()
        .zip(&ratios)
        .map(|(off, r)| json!({ "lambda": lambda0 + off, "bracket": [min_of(r), max_of(r)] }))
        .collect();
    let body = json!({ "p": p, "lambda0": lambda0, "brackets": brackets });
    Ok(finish(cfg, weight, body, rows, flags))
}

/// Preset names accepted by configs.
pub fn presets() -> String {
    let mut s = String::new();
    s.push_str("weights:\n");
    s.push_str("  standard      alpha = <f64 > -1>   (alpha + 1)(1 - r^2)^alpha\n");
    s.push_str("  log                               log-type weight\n");
    s.push_str("  exponential                       exp(-1/(1 - r)), not in D-hat\n");
    s.push_str("  table         path = <csv>        tabulated r,omega\n");
    s.push_str("measures:\n");
    s.push_str("  zero\n");
    s.push_str("  hyperbolic                        dA/(1 - |z|^2)^2 truncated to the grid\n");
    s.push_str("  counterexample                    omega(S(z))(1 - |z|)^-2 dA\n");
    s.push_str("  density       exponent, scale     scale (1 - |z|)^exponent omega dA\n");
    s.push_str("  points        path = <csv>        x,y,mass atoms\n");
    s.push_str("  lattice       delta, exponent, omega_power, lo, hi\n");
    s.push_str("experiments:\n");
    s.push_str("  doubling carleson tent-duality factorization atoms maximal cone-kernel\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_errors_are_config_errors() {
        assert!(matches!(ExperimentConfig::parse("experiment = \"nope\""), Err(LabError::Config(_))));
        assert!(matches!(ExperimentConfig::parse("experiment = \"doubling\"\nbogus = 1"), Err(LabError::Config(_))));
        let neg = "experiment = \"atoms\"\n[exponents]\np = -1.0";
        assert!(matches!(ExperimentConfig::parse(neg), Err(LabError::Config(_))));
        let shallow = "experiment = \"carleson\"\n[grid]\ndepth = 2\n[run]\nlevels = 1";
        assert!(matches!(ExperimentConfig::parse(shallow), Err(LabError::Config(_))));
    }

    #[test]
    fn depths_default_and_explicit() {
        let c = ExperimentConfig::parse("experiment = \"carleson\"\n[grid]\ndepth = 7").unwrap();
        assert_eq!(c.depths(), vec![3, 5, 7]);
        let c = ExperimentConfig::parse("experiment = \"carleson\"\n[run]\ndepths = [1, 3, 7]").unwrap();
        assert_eq!(c.depths(), vec![1, 3, 7]);
        assert!(ExperimentConfig::parse("experiment = \"carleson\"\n[run]\ndepths = [5, 3]").is_err());
    }

    #[test]
    fn presets_parse() {
        let c = ExperimentConfig::parse(
            "experiment = \"maximal\"\n[weight]\npreset = \"log\"\n[measure]\npreset = \"density\"\nexponent = 1.0",
        )
        .unwrap();
        assert_eq!(c.weight, WeightSpec::Log);
        assert_eq!(c.measure, MeasureSpec::Density { exponent: 1.0, scale: 1.0 });
        let inf = ExperimentConfig::parse("experiment = \"atoms\"\n[exponents]\np = 1.0\nq = inf").unwrap();
        assert!(inf.exponents.q.is_infinite());
    }

    #[test]
    fn doubling_standard_zero() {
        let c = ExperimentConfig::parse("experiment = \"doubling\"").unwrap();
        let out = run_experiment(&c).unwrap();
        let cc = out.report["doubling"]["C"].as_f64().unwrap();
        assert!((cc - 2.0).abs() < 1e-6, "{cc}");
        assert!(out.flags.is_empty());
        assert!(out.csv().unwrap().starts_with("level,quantity,value\n"));
    }
}
