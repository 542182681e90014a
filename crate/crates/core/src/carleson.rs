//! Geometric conditions for Carleson embeddings, measured embedding constants, and the
//! comparison between the two across grid refinements.

use crate::analytic::{bergman_norm, bergman_norm_tol, default_lambda, kernel, Analytic, KernelSum, TestFunction};
use crate::error::{validation, Result};
use crate::geometry::{carleson_vertex, dyadic_arc, dyadic_count, tent_nested, DiscPoint, Region, Square};
use crate::grid::PolarGrid;
use crate::maximal::{MaximalEngine, MaximalMode, OmegaSource};
use crate::measure::{DiscMeasure, SeparatedSequence};
use crate::tent::{TentOptions, TentSpace};
use crate::weights::RadialWeight;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc as Shared;

/// Largest growth factor between consecutive levels still read as stable.
pub const STABLE_GROWTH: f64 = 1.1;
/// Smallest growth factor between consecutive levels read as divergence.
pub const DIVERGING_GROWTH: f64 = 1.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Bounded,
    Diverging,
    Inconclusive,
}

/// Target tent space of `Φ_μ` for `n ≥ 1` and `q ≤ p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhiCase {
    /// `q < min(2, p)`: `T^{p/(p−q)}_{2/(2−q)}`.
    Area,
    /// `q = p < 2`: `T^∞_{2/(2−p)}`.
    Diagonal,
    /// `2 ≤ q < p`: `T^{p/(p−q)}_∞`.
    Uniform,
}

impl PhiCase {
    pub fn for_exponents(p: f64, q: f64) -> Option<PhiCase> {
        if q < p && q < 2.0 {
            Some(PhiCase::Area)
        } else if q == p && p < 2.0 {
            Some(PhiCase::Diagonal)
        } else if q >= 2.0 && q < p {
            Some(PhiCase::Uniform)
        } else {
            None
        }
    }

    /// Exponents `(P, Q)` of the target space `T^P_Q`.
    pub fn exponents(self, p: f64, q: f64) -> (f64, f64) {
        match self {
            PhiCase::Area => (p / (p - q), 2.0 / (2.0 - q)),
            PhiCase::Diagonal => (f64::INFINITY, 2.0 / (2.0 - p)),
            PhiCase::Uniform => (p / (p - q), f64::INFINITY),
        }
    }

    fn label(self) -> &'static str {
        match self {
            PhiCase::Area => "Phi_mu T^{p/(p-q)}_{2/(2-q)}",
            PhiCase::Diagonal => "Phi_mu T^inf_{2/(2-p)}",
            PhiCase::Uniform => "Phi_mu T^{p/(p-q)}_inf",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CarlesonOptions {
    /// Radius of the pseudohyperbolic discs `Δ(z, r)`.
    pub r: f64,
    /// Exponent of `Ψ_μ` and of the test functions; defaults to `λ₀ + 1`.
    pub lambda: Option<f64>,
    /// Deepest dyadic level used by family suprema.
    pub n_max: u32,
    /// Forces the tent-space case of `Φ_μ`; a case not matching `(p, q)` is rejected.
    pub phi_case: Option<PhiCase>,
}

impl Default for CarlesonOptions {
    fn default() -> Self {
        CarlesonOptions { r: 0.5, lambda: None, n_max: 10, phi_case: None }
    }
}

/// A measure discretized at one refinement depth.
#[derive(Debug, Clone)]
pub struct Level {
    pub depth: u32,
    pub grid: Shared<PolarGrid>,
    pub measure: DiscMeasure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantity {
    pub name: String,
    /// Whether the condition characterizes the embedding in this regime.
    pub characterizing: bool,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub name: String,
    pub characterizing: bool,
    pub depths: Vec<u32>,
    pub values: Vec<f64>,
    pub growth: Vec<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub p: f64,
    pub q: f64,
    pub n: u32,
    pub r: f64,
    pub lambda: f64,
    pub regime: String,
    pub conditions: Vec<Condition>,
}

impl ConditionReport {
    pub fn condition(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

/// Growth factors between consecutive values and the resulting verdict.
pub fn trend(values: &[f64]) -> (Vec<f64>, Verdict) {
    let growth: Vec<f64> = values
        .windows(2)
        .map(|w| {
            if w[0] == 0.0 {
                if w[1] == 0.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            } else {
                w[1] / w[0]
            }
        })
        .collect();
    if values.iter().all(|v| *v == 0.0) && !values.is_empty() {
        return (growth, Verdict::Bounded);
    }
    if values.len() < 3 || values.iter().any(|v| v.is_nan()) {
        return (growth, Verdict::Inconclusive);
    }
    let verdict = if growth.iter().all(|g| *g <= STABLE_GROWTH) {
        Verdict::Bounded
    } else if growth.iter().all(|g| *g >= DIVERGING_GROWTH) {
        Verdict::Diverging
    } else {
        Verdict::Inconclusive
    };
    (growth, verdict)
}

pub const B_MU: &str = "B_mu L^{p/(p-q)}";
pub const PSI_MU: &str = "Psi_mu L^{p/(p-q)}";
pub const M_OMEGA_LS: &str = "M_omega(mu) L^{p/(p-q)}";
pub const M_OMEGA_SUP: &str = "M_omega(mu) sup";
pub const M_OMEGA_QP_SUP: &str = "M_omega,q/p(mu) sup";
pub const DELTA_QUOTIENT: &str = "Delta quotient sup";
pub const SQUARE_QUOTIENT: &str = "square quotient sup";

fn regime_label(p: f64, q: f64, n: u32) -> String {
    let base = if q < p {
        "q<p"
    } else if q == p {
        "q=p"
    } else {
        "q>p"
    };
    if n == 0 {
        base.to_string()
    } else {
        match PhiCase::for_exponents(p, q) {
            Some(c) => format!("{base}, n={n}, {}", c.label()),
            None => format!("{base}, n={n}, sup conditions"),
        }
    }
}

fn check_exponents(p: f64, q: f64, opts: &CarlesonOptions) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) || !(q > 0.0 && q.is_finite()) {
        return validation("embedding exponents must be finite and positive");
    }
    if !(opts.r > 0.0 && opts.r < 1.0) {
        return validation(format!("pseudohyperbolic radius {} not in (0, 1)", opts.r));
    }
    if opts.n_max > 16 {
        return validation("dyadic depth above 16 is not supported");
    }
    Ok(())
}

fn resolve_lambda(weight: &RadialWeight, opts: &CarlesonOptions) -> Result<f64> {
    match opts.lambda {
        Some(l) if l > 0.0 => Ok(l),
        Some(l) => validation(format!("kernel exponent {l} must be positive")),
        None => default_lambda(weight).map_or_else(|| validation("weight has no certified λ₀; pass lambda"), Ok),
    }
}

/// Deepest dyadic level whose squares are not thinner than the grid.
fn level_cap(grid: &PolarGrid, n_max: u32) -> u32 {
    let gap = 1.0 - grid.outer_radius();
    let n = (PI / gap).log2() - 2.0;
    (n.floor().max(0.0) as u32).min(n_max)
}

fn omega_source(grid: &Shared<PolarGrid>, mu: &DiscMeasure, weight: &RadialWeight) -> OmegaSource {
    match mu.density_grid() {
        Some(g) if !mu.is_radial() && Shared::ptr_eq(g, grid) => OmegaSource::grid(grid.clone(), weight),
        _ => OmegaSource::Analytic,
    }
}

const RADIAL_PROBES: usize = 8;
/// Radial offsets, as fractions of `r`, of the probes placed outward from each atom.
const OUTWARD: [f64; 3] = [0.9, 0.99, 0.999];

/// Vertices `a` at which `μ(S(a))` and `μ(Δ(a, r))` are sampled for suprema.
///
/// Rotation-invariant measures only need one point per radius. Atoms get extra probes just
/// inside the outer edge of the discs `Δ(z, r)` that contain them.
fn probes(grid: &PolarGrid, mu: &DiscMeasure, n_max: u32, r: f64) -> Vec<DiscPoint> {
    if mu.is_radial() {
        let mut out = Vec::new();
        for ring in grid.rings() {
            let (u0, u1) = (-(-ring.inner).ln_1p(), -(-ring.outer).ln_1p());
            for j in 0..RADIAL_PROBES {
                let r = -(-(u0 + (u1 - u0) * j as f64 / RADIAL_PROBES as f64)).exp_m1();
                if r > 0.0 {
                    out.push(DiscPoint::polar(r, 0.0));
                }
            }
        }
        return out;
    }
    let mut out: Vec<DiscPoint> = grid.points().to_vec();
    for a in mu.atoms().iter().filter(|a| !a.point.is_origin()) {
        out.push(a.point);
        let s = a.point.modulus();
        for t in OUTWARD {
            let rho = t * r;
            out.push(DiscPoint::polar((s + rho) / (1.0 + rho * s), a.point.arg()));
        }
    }
    for n in 0..=n_max {
        for k in 0..dyadic_count(n) {
            let arc = dyadic_arc(n, k);
            out.push(carleson_vertex(&arc));
            out.push(carleson_vertex(&crate::geometry::Arc::half_open(arc.start() + 0.5 * arc.len(), arc.len())));
        }
    }
    out
}

fn square_sup(
    mu: &DiscMeasure,
    weight: &RadialWeight,
    src: &OmegaSource,
    probes: &[DiscPoint],
    alpha: f64,
    nq: f64,
) -> f64 {
    probes
        .par_iter()
        .filter(|a| !a.is_origin())
        .map(|a| {
            let sq = Region::Square(Square::at(a).unwrap());
            let m = mu.mass(&sq);
            let om = src.mass(weight, &sq);
            if m == 0.0 || !(om > 0.0) {
                0.0
            } else {
                m / (om.powf(alpha) * (1.0 - a.modulus()).powf(nq))
            }
        })
        .reduce(|| 0.0, f64::max)
}

fn delta_sup(mu: &DiscMeasure, weight: &RadialWeight, probes: &[DiscPoint], r: f64, alpha: f64, nq: f64) -> f64 {
    probes
        .par_iter()
        .filter(|a| !a.is_origin())
        .map(|a| delta_quotient(mu, weight, a, r, alpha, nq))
        .reduce(|| 0.0, f64::max)
}

/// `μ(Δ(a, r))/(ω(S(a))^α (1 − |a|)^{nq})`.
pub fn delta_quotient(mu: &DiscMeasure, weight: &RadialWeight, a: &DiscPoint, r: f64, alpha: f64, nq: f64) -> f64 {
    let m = mu.mass(&Region::PseudoDisc { center: *a, radius: r });
    if m == 0.0 {
        return 0.0;
    }
    let om = weight.square_mass(a).unwrap_or(0.0);
    m / (om.powf(alpha) * (1.0 - a.modulus()).powf(nq))
}

/// `ω(T(ζ))`, with `T(0) = 𝔻`.
fn tent_omega(weight: &RadialWeight, z: &DiscPoint) -> f64 {
    if z.is_origin() {
        weight.disc_mass()
    } else {
        weight.tent_mass(z, 0.5)
    }
}

fn lp_cells(values: &[f64], omega: &[f64], p: f64) -> f64 {
    let s: f64 = values.iter().zip(omega).map(|(v, w)| v.abs().powf(p) * w).sum();
    s.powf(1.0 / p)
}

/// Condition quantities of one discretized measure.
pub fn level_quantities(
    level: &Level,
    weight: &RadialWeight,
    p: f64,
    q: f64,
    n: u32,
    lambda: f64,
    opts: &CarlesonOptions,
) -> Result<Vec<Quantity>> {
    check_exponents(p, q, opts)?;
    let grid = &level.grid;
    let mu = &level.measure;
    let n_max = level_cap(grid, opts.n_max);
    let src = omega_source(grid, mu, weight);
    let nq = n as f64 * q;
    let q_over_p = q / p;
    let mut out = Vec::new();
    let mut push = |name: &str, characterizing: bool, value: f64| {
        out.push(Quantity { name: name.to_string(), characterizing, value });
    };
    if n == 0 {
        if q < p {
            let s = p / (p - q);
            let omega = grid.omega_weights(weight);
            let support = mu.support();
            let inv: Vec<f64> = support.iter().map(|a| 1.0 / tent_omega(weight, &a.point)).collect();
            let ts = TentSpace::new(mu.clone(), weight, grid.clone(), TentOptions { aperture: 0.5, n_max: 0 })?;
            let b = ts.area_profile(&inv, 1.0)?;
            push(B_MU, true, lp_cells(&b, &omega, s));
            let psi: Vec<f64> = grid
                .points()
                .par_iter()
                .map(|z| support.iter().zip(&inv).map(|(a, w)| kernel(&a.point, z, lambda) * a.mass * w).sum())
                .collect();
            push(PSI_MU, true, lp_cells(&psi, &omega, s));
            let engine = MaximalEngine::new(mu, weight, 1.0, MaximalMode::Standard, n_max, src.clone())?;
            let m = engine.values(grid.points());
            push(M_OMEGA_LS, true, lp_cells(&m, &omega, s));
        } else {
            let pr = probes(grid, mu, n_max, opts.r);
            let alpha = if q == p { 1.0 } else { q_over_p };
            let name = if q == p { M_OMEGA_SUP } else { M_OMEGA_QP_SUP };
            push(name, true, square_sup(mu, weight, &src, &pr, alpha, 0.0));
            push(DELTA_QUOTIENT, q > p, delta_sup(mu, weight, &pr, opts.r, q_over_p, 0.0));
        }
        return Ok(out);
    }
    let case = PhiCase::for_exponents(p, q);
    if let Some(forced) = opts.phi_case {
        if case != Some(forced) {
            return validation(format!("tent-space case {:?} does not apply to p = {p}, q = {q}", forced));
        }
    }
    match case {
        Some(case) => {
            let (bp, bq) = case.exponents(p, q);
            let phi: Vec<f64> =
                grid.points().par_iter().map(|z| delta_quotient(mu, weight, z, opts.r, 1.0, nq)).collect();
            let nu = DiscMeasure::hyperbolic(grid.clone());
            let ts =
                TentSpace::new(nu, weight, grid.clone(), TentOptions { aperture: 0.5, n_max: n_max.min(8) })?;
            push(case.label(), true, ts.norm(&phi, bp, bq)?);
        }
        None => {
            let pr = probes(grid, mu, n_max, opts.r);
            push(SQUARE_QUOTIENT, true, square_sup(mu, weight, &src, &pr, q_over_p, nq));
            push(DELTA_QUOTIENT, true, delta_sup(mu, weight, &pr, opts.r, q_over_p, nq));
        }
    }
    Ok(out)
}

/// Every condition the relevant theorem prescribes for `(p, q, n)`, at each level.
pub fn condition_quantities(
    levels: &[Level],
    weight: &RadialWeight,
    p: f64,
    q: f64,
    n: u32,
    opts: &CarlesonOptions,
) -> Result<ConditionReport> {
    check_exponents(p, q, opts)?;
    if n == 0 && opts.phi_case.is_some() {
        return validation("the tent-space conditions apply to n ≥ 1");
    }
    let lambda = resolve_lambda(weight, opts)?;
    let per_level: Vec<Vec<Quantity>> = levels
        .iter()
        .map(|l| level_quantities(l, weight, p, q, n, lambda, opts))
        .collect::<Result<_>>()?;
    let depths: Vec<u32> = levels.iter().map(|l| l.depth).collect();
    let mut conditions = Vec::new();
    if let Some(first) = per_level.first() {
        for (j, qty) in first.iter().enumerate() {
            let values: Vec<f64> = per_level.iter().map(|v| v[j].value).collect();
            let (growth, verdict) = trend(&values);
            conditions.push(Condition {
                name: qty.name.clone(),
                characterizing: qty.characterizing,
                depths: depths.clone(),
                values,
                growth,
                verdict,
            });
        }
    }
    Ok(ConditionReport { p, q, n, r: opts.r, lambda, regime: regime_label(p, q, n), conditions })
}

/// Test functions `f_{a,p}` over an `a`-sweep and kernel sums `S_λ(b)` with random `b`,
/// with their `A^p_ω` norms.
#[derive(Debug, Clone)]
pub struct TestFamily {
    pub p: f64,
    pub lambda: f64,
    tests: Vec<(TestFunction, f64)>,
    sums: Vec<(KernelSum, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Embedding {
    pub value: f64,
    pub witness: String,
}

impl TestFamily {
    /// Radii `1 − 2^{−j/2}` up to `r_max`, `angles` directions each, and `sums` kernel sums
    /// over lattices inside radius `0.9`.
    pub fn new<R: Rng>(
        weight: &RadialWeight,
        p: f64,
        lambda: f64,
        r_max: f64,
        angles: usize,
        sums: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if !(p > 0.0) || !(lambda > 0.0) {
            return validation("test family exponents must be positive");
        }
        let mut radii = Vec::new();
        let mut j = 2;
        loop {
            let r = 1.0 - 0.5f64.powf(j as f64 / 2.0);
            if r > r_max {
                break;
            }
            radii.push(r);
            j += 1;
        }
        let norms: Vec<f64> = radii
            .par_iter()
            .map(|r| {
                let f = TestFunction::new(DiscPoint::polar(*r, 0.0), p, weight, lambda)?;
                bergman_norm(&Analytic::Test(f), 0, weight, p)
            })
            .collect::<Result<_>>()?;
        let mut tests = Vec::new();
        for (r, norm) in radii.iter().zip(&norms) {
            for k in 0..angles.max(1) {
                let t = 0.123 + std::f64::consts::TAU * k as f64 / angles.max(1) as f64;
                tests.push((TestFunction::new(DiscPoint::polar(*r, t), p, weight, lambda)?, *norm));
            }
        }
        let mut kernel_sums = Vec::new();
        for _ in 0..sums {
            let seq = SeparatedSequence::lattice(0.6, 0.9f64.min(r_max.max(0.7)), rng)?;
            let b: Vec<f64> = (0..seq.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            kernel_sums.push(KernelSum::new(&seq, &b, lambda)?);
        }
        let sum_norms: Vec<f64> = kernel_sums
            .par_iter()
            .map(|s| bergman_norm_tol(&Analytic::Kernel(s.clone()), 0, weight, p, 1e-6))
            .collect::<Result<_>>()?;
        Ok(TestFamily { p, lambda, tests, sums: kernel_sums.into_iter().zip(sum_norms).collect() })
    }

    pub fn len(&self) -> usize {
        self.tests.len() + self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn lq_norm(mu: &DiscMeasure, q: f64, f: impl Fn(Complex64) -> Complex64 + Sync) -> f64 {
    let s: f64 = (0..mu.support_len())
        .into_par_iter()
        .map(|i| f(mu.support_point(i).z()).norm().powf(q) * mu.support_mass(i))
        .sum();
    s.powf(1.0 / q)
}

/// `max ‖f^{(n)}‖_{L^q(μ)}/‖f‖_{A^p_ω}` over the members of `family` with `|a| ≤ r_max`.
pub fn embedding_constant(mu: &DiscMeasure, q: f64, n: u32, family: &TestFamily, r_max: f64) -> Embedding {
    let mut best = Embedding { value: 0.0, witness: String::new() };
    for (f, norm) in family.tests.iter().filter(|(f, _)| f.a.modulus() <= r_max) {
        let v = lq_norm(mu, q, |z| f.derivative(n, z)) / norm;
        if v > best.value {
            best = Embedding { value: v, witness: format!("f_a, a = {:.6}∠{:.4}", f.a.modulus(), f.a.arg()) };
        }
    }
    for (j, (s, norm)) in family.sums.iter().enumerate() {
        let v = lq_norm(mu, q, |z| s.derivative(n, z)) / norm;
        if v > best.value {
            best = Embedding { value: v, witness: format!("S_lambda(b) #{j}") };
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingTrend {
    pub depths: Vec<u32>,
    pub values: Vec<f64>,
    pub witnesses: Vec<String>,
    pub growth: Vec<f64>,
    pub verdict: Verdict,
}

/// Embedding constants at each level, with test points restricted to the level's grid.
pub fn embedding_trend(levels: &[Level], q: f64, n: u32, family: &TestFamily) -> EmbeddingTrend {
    let est: Vec<Embedding> =
        levels.iter().map(|l| embedding_constant(&l.measure, q, n, family, l.grid.outer_radius())).collect();
    let values: Vec<f64> = est.iter().map(|e| e.value).collect();
    let (growth, verdict) = trend(&values);
    EmbeddingTrend {
        depths: levels.iter().map(|l| l.depth).collect(),
        values,
        witnesses: est.into_iter().map(|e| e.witness).collect(),
        growth,
        verdict,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bracket {
    pub condition: String,
    /// Condition value over `embedding^q`, per level.
    pub ratios: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub conditions: ConditionReport,
    pub embedding: EmbeddingTrend,
    pub brackets: Vec<Bracket>,
    /// Characterizing conditions whose verdict contradicts the embedding trend.
    pub flags: Vec<String>,
    /// Observations that are not violations, such as a split between two conditions.
    pub notes: Vec<String>,
}

fn opposite(a: Verdict, b: Verdict) -> bool {
    matches!((a, b), (Verdict::Bounded, Verdict::Diverging) | (Verdict::Diverging, Verdict::Bounded))
}

/// Pairs each condition with the measured embedding constants.
pub fn verdict(report: ConditionReport, embedding: EmbeddingTrend) -> Comparison {
    let q = report.q;
    let mut brackets = Vec::new();
    let mut flags = Vec::new();
    for c in &report.conditions {
        let ratios = c
            .values
            .iter()
            .zip(&embedding.values)
            .map(|(v, e)| if *e > 0.0 { Some(v / e.powf(q)) } else { None })
            .collect();
        brackets.push(Bracket { condition: c.name.clone(), ratios });
        if c.characterizing && opposite(c.verdict, embedding.verdict) {
            flags.push(format!(
                "{}: condition {:?} but embedding constant {:?}",
                c.name, c.verdict, embedding.verdict
            ));
        }
    }
    let mut notes = Vec::new();
    let delta = report.condition(DELTA_QUOTIENT);
    let square = report.condition(M_OMEGA_SUP).or(report.condition(SQUARE_QUOTIENT));
    if let (Some(d), Some(s)) = (delta, square) {
        if opposite(d.verdict, s.verdict) {
            notes.push(format!("Delta/square split: {} {:?}, {} {:?}", d.name, d.verdict, s.name, s.verdict));
        }
    }
    Comparison { conditions: report, embedding, brackets, flags, notes }
}

/// Runs both evaluations and compares them.
pub fn compare(
    levels: &[Level],
    weight: &RadialWeight,
    p: f64,
    q: f64,
    n: u32,
    opts: &CarlesonOptions,
    family: &TestFamily,
) -> Result<Comparison> {
    let report = condition_quantities(levels, weight, p, q, n, opts)?;
    Ok(verdict(report, embedding_trend(levels, q, n, family)))
}

/// Level sets of `M̃^d_ω(μ)` built from maximal dyadic tents.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TentLevels {
    pub ks: Vec<i32>,
    /// Number of maximal tents in each `𝓔_k`; the whole disc counts as one.
    pub maximal: Vec<usize>,
    /// Grid cells in `E_k ∖ E_{k+1}` for each `k`.
    pub cells: Vec<usize>,
    /// Cells of some `E_k ∖ E_{k+1}` where `2^k < M̃^d_ω(μ) ≤ 2^{k+1}` fails.
    pub violations: usize,
}

/// Builds `𝓔_k`, `E_k = ∪𝓔_k` on the grid and checks the two-sided bound on `E_k ∖ E_{k+1}`.
pub fn dyadic_tent_levels(mu: &DiscMeasure, weight: &RadialWeight, grid: &PolarGrid, n_max: u32) -> Result<TentLevels> {
    if n_max > 12 {
        return validation("dyadic depth above 12 is not supported here");
    }
    let engine = MaximalEngine::new(mu, weight, 1.0, MaximalMode::DyadicTent, n_max, OmegaSource::Analytic)?;
    let m = engine.values(grid.points());
    let mut tents = Vec::new();
    for n in 0..=n_max {
        for k in 0..dyadic_count(n) {
            let v = crate::geometry::dyadic_vertex(n, k);
            let t = Region::tent(v);
            let om = weight.region_mass(&t)?;
            let ratio = if om > 0.0 { mu.mass(&t) / om } else { 0.0 };
            tents.push((v, ratio));
        }
    }
    let global = mu.total() / weight.disc_mass();
    let top = m.iter().cloned().fold(0.0, f64::max);
    let mut ks: Vec<i32> = Vec::new();
    if top > 0.0 {
        let lo = m.iter().filter(|v| **v > 0.0).cloned().fold(f64::INFINITY, f64::min);
        ks = ((lo.log2().floor() as i32) - 1..=top.log2().ceil() as i32).collect();
    }
    let members = |k: i32| -> (Vec<DiscPoint>, bool) {
        let t = 2f64.powi(k);
        if global > t {
            return (Vec::new(), true);
        }
        let above: Vec<DiscPoint> = tents.iter().filter(|(_, r)| *r > t).map(|(v, _)| *v).collect();
        let maximal = above
            .iter()
            .filter(|a| !above.iter().any(|b| b != *a && tent_nested(a, b, 0.5)))
            .cloned()
            .collect();
        (maximal, false)
    };
    let in_set = |set: &(Vec<DiscPoint>, bool), z: &DiscPoint| set.1 || set.0.iter().any(|v| Region::tent(*v).contains(z));
    let mut maximal = Vec::new();
    let mut cells = Vec::new();
    let mut violations = 0;
    let sets: Vec<(Vec<DiscPoint>, bool)> = ks.iter().map(|k| members(*k)).chain(std::iter::once(members(ks.last().map_or(0, |k| k + 1)))).collect();
    for (j, k) in ks.iter().enumerate() {
        maximal.push(if sets[j].1 { 1 } else { sets[j].0.len() });
        let (lo, hi) = (2f64.powi(*k), 2f64.powi(k + 1));
        let res: (usize, usize) = grid
            .points()
            .par_iter()
            .zip(m.par_iter())
            .map(|(z, v)| {
                if in_set(&sets[j], z) && !in_set(&sets[j + 1], z) {
                    (1, usize::from(!(*v > lo && *v <= hi)))
                } else {
                    (0, 0)
                }
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        cells.push(res.0);
        violations += res.1;
    }
    Ok(TentLevels { ks, maximal, cells, violations })
}

/// One sample of the level-set estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelSetSample {
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
}

/// `μ(O_λ)` against `(∫_{O_λ} M_{ω,q/p}(μ)^{p/q} ω dA)^{q/p}` with `O_λ = {N > λ}`, where
/// `nontangential` evaluates `N(f)` anywhere.
pub fn level_set_samples(
    mu: &DiscMeasure,
    weight: &RadialWeight,
    grid: &Shared<PolarGrid>,
    p: f64,
    q: f64,
    nontangential: impl Fn(&DiscPoint) -> f64 + Sync,
    lambdas: &[f64],
    n_max: u32,
) -> Result<Vec<LevelSetSample>> {
    if !(p > 0.0) || !(q >= p) {
        return validation("the level-set estimate needs 0 < p ≤ q");
    }
    let alpha = q / p;
    let engine = MaximalEngine::new(mu, weight, alpha, MaximalMode::Standard, n_max, OmegaSource::Analytic)?;
    let m = engine.values(grid.points());
    let omega = grid.omega_weights(weight);
    let n_cells: Vec<f64> = grid.points().par_iter().map(&nontangential).collect();
    let n_mu: Vec<f64> = (0..mu.support_len()).into_par_iter().map(|i| nontangential(&mu.support_point(i))).collect();
    Ok(lambdas
        .iter()
        .map(|&lambda| {
            let lhs: f64 = (0..mu.support_len()).filter(|i| n_mu[*i] > lambda).map(|i| mu.support_mass(i)).sum();
            let s: f64 = (0..m.len()).filter(|i| n_cells[*i] > lambda).map(|i| m[i].powf(1.0 / alpha) * omega[i]).sum();
            LevelSetSample { lambda, lhs, rhs: s.powf(alpha) }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid(depth: u32) -> Shared<PolarGrid> {
        Shared::new(PolarGrid::new(GridSpec::default().with_depth(depth)).unwrap())
    }

    fn opts() -> CarlesonOptions {
        CarlesonOptions { lambda: Some(3.0), ..Default::default() }
    }

    #[test]
    fn trend_rules() {
        assert_eq!(trend(&[1.0, 1.05, 1.06]).1, Verdict::Bounded);
        assert_eq!(trend(&[1.0, 2.0, 4.0]).1, Verdict::Diverging);
        assert_eq!(trend(&[1.0, 2.0, 2.0]).1, Verdict::Inconclusive);
        assert_eq!(trend(&[1.0, 1.0]).1, Verdict::Inconclusive);
        assert_eq!(trend(&[0.0, 0.0, 0.0]).1, Verdict::Bounded);
    }

    #[test]
    fn phi_cases() {
        assert_eq!(PhiCase::for_exponents(2.0, 1.0), Some(PhiCase::Area));
        assert_eq!(PhiCase::for_exponents(1.5, 1.5), Some(PhiCase::Diagonal));
        assert_eq!(PhiCase::for_exponents(4.0, 2.0), Some(PhiCase::Uniform));
        assert_eq!(PhiCase::for_exponents(2.0, 2.0), None);
        assert_eq!(PhiCase::for_exponents(1.0, 2.0), None);
        let w = RadialWeight::standard(0.0).unwrap();
        let l = Level { depth: 3, grid: grid(3), measure: DiscMeasure::zero() };
        let o = CarlesonOptions { phi_case: Some(PhiCase::Uniform), ..opts() };
        assert!(condition_quantities(&[l], &w, 3.0, 1.0, 1, &o).is_err());
    }

    #[test]
    fn zero_measure_is_bounded() {
        let w = RadialWeight::standard(0.0).unwrap();
        let levels: Vec<Level> = (3..6).map(|d| Level { depth: d, grid: grid(d), measure: DiscMeasure::zero() }).collect();
        for (p, q, n) in [(2.0, 1.0, 0), (2.0, 2.0, 0), (1.0, 2.0, 0), (2.0, 1.0, 1), (2.0, 3.0, 1)] {
            let rep = condition_quantities(&levels, &w, p, q, n, &opts()).unwrap();
            assert!(!rep.conditions.is_empty());
            for c in &rep.conditions {
                assert!(c.values.iter().all(|v| *v == 0.0), "{}", c.name);
                assert_eq!(c.verdict, Verdict::Bounded);
            }
        }
    }

    #[test]
    fn constant_density_has_constant_maximal_function() {
        let w = RadialWeight::standard(0.0).unwrap();
        let g = grid(4);
        let mu = DiscMeasure::weighted_density(g.clone(), &vec![2.5; g.len()], &w).unwrap();
        let l = Level { depth: 4, grid: g, measure: mu };
        let qs = level_quantities(&l, &w, 2.0, 2.0, 0, 3.0, &opts()).unwrap();
        let m = qs.iter().find(|x| x.name == M_OMEGA_SUP).unwrap();
        assert!((m.value - 2.5).abs() < 1e-12, "{}", m.value);
    }

    #[test]
    fn scaling_is_linear() {
        let w = RadialWeight::standard(0.0).unwrap();
        let g = grid(4);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let seq = SeparatedSequence::lattice(0.5, 0.9, &mut rng).unwrap();
        let masses: Vec<f64> = seq.points.iter().map(|z| w.square_mass(z).unwrap()).collect();
        let mu = DiscMeasure::from_sequence(&seq, &masses).unwrap();
        let fam = TestFamily::new(&w, 2.0, 3.0, 0.9, 4, 1, &mut rng).unwrap();
        for (p, q, n) in [(2.0, 1.0, 0), (2.0, 2.0, 0), (1.0, 2.0, 0), (2.0, 1.0, 1), (2.0, 3.0, 1)] {
            let a = level_quantities(&Level { depth: 4, grid: g.clone(), measure: mu.clone() }, &w, p, q, n, 3.0, &opts()).unwrap();
            let b = level_quantities(&Level { depth: 4, grid: g.clone(), measure: mu.scaled(3.0).unwrap() }, &w, p, q, n, 3.0, &opts())
                .unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((y.value - 3.0 * x.value).abs() <= 1e-10 * y.value.max(1e-300), "{} {} {}", x.name, x.value, y.value);
            }
        }
        let e1 = embedding_constant(&mu, 2.0, 0, &fam, 1.0).value;
        let e3 = embedding_constant(&mu.scaled(3.0).unwrap(), 2.0, 0, &fam, 1.0).value;
        assert!((e3.powi(2) - 3.0 * e1.powi(2)).abs() < 1e-10 * e3.powi(2));
    }

    #[test]
    fn identity_embedding_is_at_most_one() {
        let w = RadialWeight::standard(0.0).unwrap();
        let g = Shared::new(PolarGrid::new(GridSpec { depth: 8, radial_sub: 4, angular_factor: 2.0, ..Default::default() }).unwrap());
        let mu = DiscMeasure::weighted_density(g.clone(), &vec![1.0; g.len()], &w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fam = TestFamily::new(&w, 2.0, 3.0, 0.9, 3, 0, &mut rng).unwrap();
        let e = embedding_constant(&mu, 2.0, 0, &fam, 0.9).value;
        assert!(e <= 1.0 + 2e-3 && e > 0.95, "{e}");
    }

    #[test]
    fn dyadic_tent_levels_are_consistent() {
        let w = RadialWeight::standard(0.0).unwrap();
        let g = grid(5);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let seq = SeparatedSequence::lattice(0.5, 0.95, &mut rng).unwrap();
        let masses: Vec<f64> = seq.points.iter().map(|_| rng.gen_range(0.001..0.05)).collect();
        let mu = DiscMeasure::from_sequence(&seq, &masses).unwrap();
        let lv = dyadic_tent_levels(&mu, &w, &g, 6).unwrap();
        assert!(lv.ks.len() > 2);
        assert_eq!(lv.violations, 0);
        assert_eq!(lv.cells.iter().sum::<usize>(), g.len());
    }
}
