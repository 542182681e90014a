//! C ABI over tentlab.
//!
//! Objects are opaque handles created by `lab_*_new`-style constructors and released with the
//! matching `lab_*_free`. Every fallible call returns a [`LabStatus`]; on failure the message is
//! available from [`lab_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tentlab::cli::{run_and_write, ExperimentConfig};
use tentlab::geometry::DiscPoint;
use tentlab::grid::{GridSpec, PolarGrid};
use tentlab::maximal::{MaximalEngine, MaximalMode, OmegaSource};
use tentlab::measure::{DiscMeasure, SeparatedSequence};
use tentlab::tent::{TentOptions, TentSpace};
use tentlab::weights::RadialWeight;
use tentlab::LabError;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Validation = 3,
    Construction = 4,
    Config = 5,
    Io = 6,
    /// A run finished but raised invariant flags.
    Flagged = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabMaximalMode {
    Standard = 0,
    DyadicSquare = 1,
    DyadicTent = 2,
}

/// Radial weight handle.
pub struct LabWeight(RadialWeight);

/// Polar quadrature grid handle.
pub struct LabGrid(Arc<PolarGrid>);

/// Positive measure handle.
pub struct LabMeasure(DiscMeasure);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LabDoubling {
    pub c: f64,
    pub member: bool,
    /// NaN when not certified.
    pub beta: f64,
    pub gamma: f64,
    pub lambda0: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(e: &LabError) -> LabStatus {
    match e {
        LabError::Domain(_) => LabStatus::Domain,
        LabError::Validation(_) => LabStatus::Validation,
        LabError::Construction(_) => LabStatus::Construction,
        LabError::Config(_) => LabStatus::Config,
        LabError::Io(_) => LabStatus::Io,
    }
}

enum Fail {
    Null(&'static str),
    Lab(LabError),
    Flagged(usize),
}

impl From<LabError> for Fail {
    fn from(e: LabError) -> Self {
        Fail::Lab(e)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> LabStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => LabStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            LabStatus::NullPointer
        }
        Ok(Err(Fail::Lab(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Flagged(n))) => {
            set_error(format!("{n} invariant flags raised"));
            LabStatus::Flagged
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            LabStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &'static str) -> Result<&'a [f64], Fail> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn path<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Lab(LabError::Validation(format!("{what} is not UTF-8"))))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the last failed call on this thread. Valid until the next failing call; never null.
#[no_mangle]
pub extern "C" fn lab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// `ω(r) = (1 − r²)^α`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lab_weight_standard(alpha: f64, out: *mut *mut LabWeight) -> LabStatus {
    guard(|| put(out, boxed(LabWeight(RadialWeight::standard(alpha)?)), "out"))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lab_weight_log(out: *mut *mut LabWeight) -> LabStatus {
    guard(|| put(out, boxed(LabWeight(RadialWeight::log())), "out"))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lab_weight_exponential(out: *mut *mut LabWeight) -> LabStatus {
    guard(|| put(out, boxed(LabWeight(RadialWeight::exponential())), "out"))
}

/// Tabulated weight from `n` increasing radii and values.
///
/// # Safety
/// `r` and `omega` must point to `n` readable doubles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lab_weight_table(
    r: *const f64,
    omega: *const f64,
    n: usize,
    out: *mut *mut LabWeight,
) -> LabStatus {
    guard(|| {
        let w = RadialWeight::table(slice(r, n, "r")?.to_vec(), slice(omega, n, "omega")?.to_vec())?;
        put(out, boxed(LabWeight(w)), "out")
    })
}

/// # Safety
/// `w` must be null or a handle from a `lab_weight_*` constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lab_weight_free(w: *mut LabWeight) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// `ω̂(r) = ∫_r^1 ω`.
///
/// # Safety
/// `w` must be a live weight handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lab_weight_tail(w: *const LabWeight, r: f64, out: *mut f64) -> LabStatus {
    guard(|| {
        let w = get(w, "weight")?;
        put(out, w.0.tail(r)?, "out")
    })
}

/// # Safety
/// `w` must be a live weight handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lab_weight_doubling(w: *const LabWeight, r_max: f64, out: *mut LabDoubling) -> LabStatus {
    guard(|| {
        let w = get(w, "weight")?;
        if !(r_max > 0.0 && r_max < 1.0) {
            return Err(LabError::Domain(format!("r_max {r_max} not in (0, 1)")).into());
        }
        let rep = w.0.doubling_report(r_max);
        let d = LabDoubling {
            c: rep.c,
            member: rep.member,
            beta: rep.beta.unwrap_or(f64::NAN),
            gamma: rep.gamma.unwrap_or(f64::NAN),
            lambda0: rep.lambda0.unwrap_or(f64::NAN),
        };
        put(out, d, "out")
    })
}

/// Default grid at the given depth: outer radius `1 − 2^{−depth}`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lab_grid_new(depth: u32, out: *mut *mut LabGrid) -> LabStatus {
    guard(|| {
        let g = PolarGrid::new(GridSpec::default().with_depth(depth))?;
        put(out, boxed(LabGrid(Arc::new(g))), "out")
    })
}

/// # Safety
/// `g` must be null or a handle from [`lab_grid_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lab_grid_free(g: *mut LabGrid) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of cells; 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live grid handle.
#[no_mangle]
pub unsafe extern "C" fn lab_grid_len(g: *const LabGrid) -> usize {
    g.as_ref().map_or(0, |g| g.0.len())
}

/// # Safety
/// `g` must be null or a live grid handle.
#[no_mangle]
pub unsafe extern "C" fn lab_grid_outer_radius(g: *const LabGrid) -> f64 {
    g.as_ref().map_or(f64::NAN, |g| g.0.outer_radius())
}

/// Discrete measure `Σ m_k δ_{x_k + i y_k}`.
///
/// # Safety
/// `x`, `y` and `mass` must point to `n` readable doubles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lab_measure_points(
    x: *const f64,
    y: *const f64,
    mass: *const f64,
    n: usize,
    out: *mut *mut LabMeasure,
) -> LabStatus {
    guard(|| {
        let (x, y, m) = (slice(x, n, "x")?, slice(y, n, "y")?, slice(mass, n, "mass")?);
        let pts = (0..n)
            .map(|i| Ok((DiscPoint::new(num_complex::Complex64::new(x[i], y[i]))?, m[i])))
            .collect::<Result<Vec<_>, LabError>>()?;
        put(out, boxed(LabMeasure(DiscMeasure::from_points(pts)?)), "out")
    })
}

/// Seeded `delta`-lattice up to `r_max` with unit masses.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lab_measure_lattice(delta: f64, r_max: f64, seed: u64, out: *mut *mut LabMeasure) -> LabStatus {
    guard(|| {
        let seq = SeparatedSequence::lattice(delta, r_max, &mut ChaCha8Rng::seed_from_u64(seed))?;
        let mu = DiscMeasure::from_sequence(&seq, &vec![1.0; seq.len()])?;
        put(out, boxed(LabMeasure(mu)), "out")
    })
}

/// `ω(S(z))(1 − |z|)^{−2} dA` on the grid.
///
/// # Safety
/// `g` and `w` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lab_measure_counterexample(
    g: *const LabGrid,
    w: *const LabWeight,
    out: *mut *mut LabMeasure,
) -> LabStatus {
    guard(|| {
        let (g, w) = (get(g, "grid")?, get(w, "weight")?);
        put(out, boxed(LabMeasure(DiscMeasure::counterexample(g.0.clone(), &w.0))), "out")
    })
}

/// # Safety
/// `m` must be null or a handle from a `lab_measure_*` constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lab_measure_free(m: *mut LabMeasure) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of support points (atoms or density cells).
///
/// # Safety
/// `m` must be null or a live measure handle.
#[no_mangle]
pub unsafe extern "C" fn lab_measure_support_len(m: *const LabMeasure) -> usize {
    m.as_ref().map_or(0, |m| m.0.support_len())
}

/// # Safety
/// `m` must be a live measure handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lab_measure_total(m: *const LabMeasure, out: *mut f64) -> LabStatus {
    guard(|| put(out, get(m, "measure")?.0.total(), "out"))
}

/// `sup M_{ω,α}(μ)` over the chosen family up to dyadic level `n_max`, with grid ω masses.
///
/// # Safety
/// All handles must be live; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lab_maximal_sup(
    m: *const LabMeasure,
    w: *const LabWeight,
    g: *const LabGrid,
    alpha: f64,
    mode: LabMaximalMode,
    n_max: u32,
    out: *mut f64,
) -> LabStatus {
    guard(|| {
        let (m, w, g) = (get(m, "measure")?, get(w, "weight")?, get(g, "grid")?);
        let mode = match mode {
            LabMaximalMode::Standard => MaximalMode::Standard,
            LabMaximalMode::DyadicSquare => MaximalMode::DyadicSquare,
            LabMaximalMode::DyadicTent => MaximalMode::DyadicTent,
        };
        let e = MaximalEngine::new(&m.0, &w.0, alpha, mode, n_max, OmegaSource::grid(g.0.clone(), &w.0))?;
        put(out, e.family_sup(), "out")
    })
}

/// `∫ A_{q,ν}(f)^q ω dA` for `f` given on the support of `ν` (aperture 1/2).
///
/// # Safety
/// All handles must be live; `f` must point to `n` readable doubles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lab_tent_area_integral(
    nu: *const LabMeasure,
    w: *const LabWeight,
    g: *const LabGrid,
    f: *const f64,
    n: usize,
    q: f64,
    out: *mut f64,
) -> LabStatus {
    guard(|| {
        let (nu, w, g) = (get(nu, "measure")?, get(w, "weight")?, get(g, "grid")?);
        let ts = TentSpace::new(nu.0.clone(), &w.0, g.0.clone(), TentOptions::default())?;
        put(out, ts.area_integral(slice(f, n, "f")?, q)?, "out")
    })
}

/// `‖f‖_{T^p_q(ν, ω)}`; `q` may be infinite.
///
/// # Safety
/// All handles must be live; `f` must point to `n` readable doubles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lab_tent_norm(
    nu: *const LabMeasure,
    w: *const LabWeight,
    g: *const LabGrid,
    f: *const f64,
    n: usize,
    p: f64,
    q: f64,
    out: *mut f64,
) -> LabStatus {
    guard(|| {
        let (nu, w, g) = (get(nu, "measure")?, get(w, "weight")?, get(g, "grid")?);
        let ts = TentSpace::new(nu.0.clone(), &w.0, g.0.clone(), TentOptions::default())?;
        put(out, ts.norm(slice(f, n, "f")?, p, q)?, "out")
    })
}

/// Runs an experiment config and writes its report into `out_dir` (or the config's own
/// output directory when null). Returns `Flagged` when the run raised invariant flags.
///
/// # Safety
/// `config` must be a NUL-terminated path; `out_dir` must be null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn lab_run_config(config: *const c_char, out_dir: *const c_char) -> LabStatus {
    guard(|| {
        let cfg = ExperimentConfig::load(path(config, "config")?)?;
        let dir = if out_dir.is_null() { None } else { Some(Path::new(path(out_dir, "out_dir")?)) };
        let (outcome, _, _) = run_and_write(&cfg, dir)?;
        if outcome.flags.is_empty() {
            Ok(())
        } else {
            Err(Fail::Flagged(outcome.flags.len()))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panics_become_status_codes() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, LabStatus::Panic);
        let msg = unsafe { CStr::from_ptr(lab_last_error_message()) }.to_str().unwrap().to_string();
        assert_eq!(msg, "panic: boom");
    }

    #[test]
    fn error_kinds_map_to_codes() {
        assert_eq!(status_of(&LabError::Config("x".into())), LabStatus::Config);
        assert_eq!(status_of(&LabError::Construction("x".into())), LabStatus::Construction);
        assert_eq!(guard(|| Err(Fail::Flagged(2))), LabStatus::Flagged);
    }
}
