//! Radial weights, their tails, doubling certificates and region masses.

use crate::error::{domain, validation, LabError, Result};
use crate::geometry::{carleson_vertex, dyadic_vertex, DiscPoint, Region, Slice, DEFAULT_APERTURE};
use crate::quadrature::{integrate_breaks, integrate_to_infinity, QuadOptions};
use serde::Serialize;
use std::f64::consts::{PI, TAU};
use std::path::Path;

/// Cap on the doubling ratio above which a weight is rejected from the doubling class.
pub const DOUBLING_CAP: f64 = 1e6;
/// Spread `max/min` allowed for the kernel ratio when picking `λ₀`.
pub const LAMBDA_BRACKET: f64 = 4.0;
/// Grid step of the sampled exponents `β`, `γ`.
pub const EXPONENT_STEP: f64 = 0.01;
/// Grid step of the sampled kernel exponent `λ`.
pub const LAMBDA_STEP: f64 = 0.25;

const TABLE_DT: f64 = 1.0 / 32.0;
const TABLE_T_MAX: f64 = 34.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightKind {
    /// `(1 − r²)^α`, `α > −1`.
    Standard { alpha: f64 },
    /// `((1 − r)(log(e/(1 − r)))²)^{−1}`.
    Log,
    /// `exp(−1/(1 − r))`.
    Exponential,
    /// Piecewise linear through `(r, ω)` nodes, constant outside.
    Table { r: Vec<f64>, omega: Vec<f64> },
}

/// A radial weight with cached tail tables.
#[derive(Debug, Clone)]
pub struct RadialWeight {
    kind: WeightKind,
    tail_tab: Vec<f64>,
    m1_tab: Vec<f64>,
    tail_slope: Vec<f64>,
    m1_slope: Vec<f64>,
}

fn quad_opts() -> QuadOptions {
    QuadOptions { abs_tol: 1e-300, rel_tol: 1e-12, max_intervals: 2000 }
}

fn kernel_opts() -> QuadOptions {
    QuadOptions { abs_tol: 1e-300, rel_tol: 1e-8, max_intervals: 400 }
}

impl RadialWeight {
    pub fn standard(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return validation(format!("standard weight needs alpha > -1, got {alpha}"));
        }
        Ok(Self::build(WeightKind::Standard { alpha }))
    }

    pub fn log() -> Self {
        Self::build(WeightKind::Log)
    }

    pub fn exponential() -> Self {
        Self::build(WeightKind::Exponential)
    }

    pub fn table(r: Vec<f64>, omega: Vec<f64>) -> Result<Self> {
        if r.is_empty() || r.len() != omega.len() {
            return validation("weight table needs matching nonempty columns");
        }
        if r[0] < 0.0 || *r.last().unwrap() >= 1.0 {
            return validation("weight table radii must lie in [0, 1)");
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) {
            return validation("weight table radii must be strictly increasing");
        }
        if omega.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return validation("weight table values must be finite and non-negative");
        }
        if !(*omega.last().unwrap() > 0.0) {
            return validation("weight table must be positive at its last node");
        }
        Ok(Self::build(WeightKind::Table { r, omega }))
    }

    /// Reads a CSV with lines `r,omega`; a non-numeric first line is treated as a header.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .flexible(false)
            .from_path(path.as_ref())?;
        let (mut rs, mut ws) = (Vec::new(), Vec::new());
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != 2 {
                return validation(format!("line {}: expected r,omega", line + 1));
            }
            match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
                (Ok(r), Ok(w)) => {
                    rs.push(r);
                    ws.push(w);
                }
                _ if line == 0 => continue,
                _ => return validation(format!("line {}: unparseable number", line + 1)),
            }
        }
        Self::table(rs, ws)
    }

    fn build(kind: WeightKind) -> Self {
        let mut w = RadialWeight { kind, tail_tab: Vec::new(), m1_tab: Vec::new(), tail_slope: Vec::new(), m1_slope: Vec::new() };
        let n = (TABLE_T_MAX / TABLE_DT).round() as usize;
        let mut tail = vec![0.0; n + 1];
        let mut m1 = vec![0.0; n + 1];
        let un = n as f64 * TABLE_DT;
        tail[n] = w.integrate_u(|_, _| 1.0, un, &[]);
        m1[n] = w.integrate_u(|s, _| s, un, &[]);
        for i in (0..n).rev() {
            let (a, b) = (i as f64 * TABLE_DT, (i + 1) as f64 * TABLE_DT);
            let pts = w.u_breakpoints(a, b);
            tail[i] = tail[i + 1] + integrate_breaks(|u| w.gap_density(u), &pts, quad_opts()).value;
            m1[i] = m1[i + 1]
                + integrate_breaks(|u| w.gap_density(u) * (1.0 - (-u).exp()), &pts, quad_opts()).value;
        }
        w.tail_slope = (0..=n).map(|i| -w.gap_density(i as f64 * TABLE_DT)).collect();
        w.m1_slope = (0..=n)
            .map(|i| {
                let u = i as f64 * TABLE_DT;
                -w.gap_density(u) * (1.0 - (-u).exp())
            })
            .collect();
        w.tail_tab = tail;
        w.m1_tab = m1;
        w
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn name(&self) -> String {
        match &self.kind {
            WeightKind::Standard { alpha } => format!("standard({alpha})"),
            WeightKind::Log => "log".into(),
            WeightKind::Exponential => "exponential".into(),
            WeightKind::Table { r, .. } => format!("table({} nodes)", r.len()),
        }
    }

    /// `ω(r)` for `0 ≤ r < 1`.
    pub fn eval(&self, r: f64) -> f64 {
        match &self.kind {
            WeightKind::Standard { alpha } => {
                if *alpha == 0.0 {
                    1.0
                } else {
                    ((1.0 - r) * (1.0 + r)).powf(*alpha)
                }
            }
            WeightKind::Log => {
                let d = 1.0 - r;
                let l = 1.0 - d.ln();
                1.0 / (d * l * l)
            }
            WeightKind::Exponential => (-1.0 / (1.0 - r)).exp(),
            WeightKind::Table { r: rs, omega } => {
                if r <= rs[0] {
                    return omega[0];
                }
                let n = rs.len();
                if r >= rs[n - 1] {
                    return omega[n - 1];
                }
                let i = rs.partition_point(|x| *x <= r) - 1;
                let u = (r - rs[i]) / (rs[i + 1] - rs[i]);
                omega[i] + u * (omega[i + 1] - omega[i])
            }
        }
    }

    fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        let mut pts = vec![a];
        if let WeightKind::Table { r, .. } = &self.kind {
            pts.extend(r.iter().copied().filter(|x| *x > a && *x < b));
        }
        pts.push(b);
        pts
    }

    /// `ω(s)(1 − s)` at `s = 1 − e^{−u}`, evaluated without forming `1 − s`.
    pub fn gap_density(&self, u: f64) -> f64 {
        match &self.kind {
            WeightKind::Standard { alpha } => {
                let d = (-u).exp();
                (-(alpha + 1.0) * u).exp() * (2.0 - d).powf(*alpha)
            }
            WeightKind::Log => 1.0 / ((1.0 + u) * (1.0 + u)),
            WeightKind::Exponential => (-u.exp() - u).exp(),
            WeightKind::Table { .. } => {
                let d = (-u).exp();
                self.eval(1.0 - d) * d
            }
        }
    }

    fn u_breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        let mut pts = vec![a];
        if let WeightKind::Table { r, .. } = &self.kind {
            pts.extend(r.iter().map(|x| -(1.0 - x).ln()).filter(|u| *u > a && *u < b));
        }
        pts.push(b);
        pts
    }

    /// `∫_{u0}^∞ ω(s)(1 − s) g(s, 1 − s) du` with `s = 1 − e^{−u}`, i.e. `∫_r^1 ω g ds`.
    fn integrate_u<G: Fn(f64, f64) -> f64>(&self, g: G, u0: f64, extra: &[f64]) -> f64 {
        self.integrate_u_with(g, u0, extra, quad_opts())
    }

    fn integrate_u_with<G: Fn(f64, f64) -> f64>(&self, g: G, u0: f64, extra: &[f64], opts: QuadOptions) -> f64 {
        let f = |u: f64| {
            let d = (-u).exp();
            self.gap_density(u) * g(1.0 - d, d)
        };
        let mut pts = vec![u0];
        for k in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
            pts.push(u0 + k);
        }
        pts.extend(extra.iter().copied().filter(|u| *u > u0 && *u < u0 + 16.0));
        if let WeightKind::Table { r, .. } = &self.kind {
            pts.extend(r.iter().map(|x| -(1.0 - x).ln()).filter(|u| *u > u0 && *u < u0 + 16.0));
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        let end = *pts.last().unwrap();
        integrate_breaks(f, &pts, opts).value + integrate_to_infinity(f, end, opts).value
    }

    fn to_one<G: Fn(f64, f64) -> f64>(&self, g: G, r: f64) -> f64 {
        self.integrate_u(g, -(1.0 - r).ln(), &[])
    }

    fn tail_quad(&self, r: f64) -> f64 {
        self.to_one(|_, _| 1.0, r)
    }

    fn m1_quad(&self, r: f64) -> f64 {
        self.to_one(|s, _| s, r)
    }

    /// `ω̂(r) = ∫_r^1 ω(s) ds` by adaptive quadrature.
    pub fn tail(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        Ok(self.tail_quad(r))
    }

    /// `ω̂(r)` interpolated log-linearly from the cached table.
    pub fn tail_interp(&self, r: f64) -> f64 {
        self.interp(&self.tail_tab, &self.tail_slope, r).unwrap_or_else(|| self.tail_quad(r))
    }

    /// `∫_r^1 ω(s) s ds` interpolated from the cached table.
    pub fn m1_interp(&self, r: f64) -> f64 {
        self.interp(&self.m1_tab, &self.m1_slope, r).unwrap_or_else(|| self.m1_quad(r))
    }

    /// `∫_r^1 ω(s) s ds` by adaptive quadrature.
    pub fn m1(&self, r: f64) -> f64 {
        self.m1_quad(r)
    }

    /// Cubic Hermite interpolation of `log` values in `u = −log(1 − r)`.
    fn interp(&self, tab: &[f64], slope: &[f64], r: f64) -> Option<f64> {
        if r <= 0.0 {
            return Some(tab[0]);
        }
        if matches!(self.kind, WeightKind::Table { .. }) {
            return None;
        }
        let x = -(1.0 - r).ln() / TABLE_DT;
        let i = x.floor() as usize;
        if i + 1 >= tab.len() {
            return None;
        }
        let (a, b) = (tab[i], tab[i + 1]);
        if !(a > 1e-280 && b > 1e-280) {
            return None;
        }
        let u = x - i as f64;
        let (da, db) = (slope[i] / a * TABLE_DT, slope[i + 1] / b * TABLE_DT);
        let (fa, fb) = (a.ln(), b.ln());
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        Some((h00 * fa + h10 * da + h01 * fb + h11 * db).exp())
    }

    /// Total mass `ω(𝔻) = ∫_𝔻 ω dA`.
    pub fn disc_mass(&self) -> f64 {
        2.0 * self.m1_tab[0]
    }

    /// `∫_r^1 (s − r) ω(s) ds = ∫_r^1 ω̂`.
    pub fn tail2(&self, r: f64) -> f64 {
        self.to_one(|_, d| (1.0 - r) - d, r)
    }

    /// `ω(S(a)) = (1 − |a|)/π · ∫_{|a|}^1 ω(s) s ds`.
    pub fn square_mass(&self, a: &DiscPoint) -> Result<f64> {
        if a.is_origin() {
            return domain("S(a) is undefined at a = 0");
        }
        Ok((1.0 - a.modulus()) / PI * self.m1(a.modulus()))
    }

    /// `ω(T_α(z)) = (2α/π) ∫_{|z|}^1 (s − |z|) ω(s) ds`.
    pub fn tent_mass(&self, z: &DiscPoint, aperture: f64) -> f64 {
        2.0 * aperture / PI * self.tail2(z.modulus())
    }

    /// `ω(R)` for any region.
    pub fn region_mass(&self, region: &Region) -> Result<f64> {
        match region {
            Region::Square(sq) => Ok(sq.arc.len() / PI * self.m1(sq.r_min)),
            Region::Tent { vertex, aperture } => Ok(self.tent_mass(vertex, *aperture)),
            Region::DyadicTent { level, index } => {
                Ok(self.tent_mass(&dyadic_vertex(*level, *index), DEFAULT_APERTURE))
            }
            Region::ArcTent(arc) => {
                if arc.len() < 1.0 {
                    Ok(self.tent_mass(&carleson_vertex(arc), DEFAULT_APERTURE))
                } else {
                    Ok(arc.len().min(TAU) / TAU * self.disc_mass())
                }
            }
            Region::Arc(arc) => Ok(arc.len() / TAU * self.disc_mass()),
            Region::Disc => Ok(self.disc_mass()),
            Region::Lens { vertex, aperture } => {
                Ok(self.lens_mass(vertex.modulus(), 0.0, *aperture))
            }
            Region::TruncatedLens { vertex, aperture, h } => {
                let lo = if h.is_infinite() { 0.0 } else { vertex.modulus() / (1.0 + h) };
                Ok(self.lens_mass(vertex.modulus(), lo, *aperture))
            }
            Region::PseudoDisc { .. } => Ok(self.slice_mass(region)),
        }
    }

    fn lens_mass(&self, r: f64, lo: f64, aperture: f64) -> f64 {
        if lo >= r {
            return 0.0;
        }
        let g = |s: f64| (1.0 - s / r) * self.eval(s) * s;
        2.0 * aperture / PI * integrate_breaks(g, &self.breakpoints(lo, r), quad_opts()).value
    }

    /// `∫_0^1 |slice(s)|/(2π) · ω(s) 2s ds` for a region whose slices are single arcs.
    pub fn slice_mass(&self, region: &Region) -> f64 {
        let width = |s: f64| match region.slice_at(s) {
            Slice::Empty => 0.0,
            Slice::Full => TAU,
            Slice::Interval(a) => a.len(),
        };
        let extra: Vec<f64> = (1..64).map(|i| i as f64 * 0.25).collect();
        self.integrate_u(|s, _| width(s) / PI * s, 0.0, &extra)
    }

    /// `ω⋆(z) = ∫_{|z|}^1 ω(s) log(s/|z|) s ds`.
    pub fn omega_star(&self, z: &DiscPoint) -> Result<f64> {
        if z.is_origin() {
            return domain("omega_star is singular at z = 0");
        }
        let r = z.modulus();
        let lr = r.ln();
        Ok(self.to_one(|s, d| ((-d).ln_1p() - lr) * s, r))
    }

    /// `∫_𝔻 ω(z)/|1 − ρz|^{e} dA(z)` for `0 ≤ ρ < 1`.
    pub fn kernel_integral(&self, rho: f64, e: f64) -> f64 {
        let ur = -(1.0 - rho).ln();
        let extra: Vec<f64> = [-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0].iter().map(|k| ur + k).collect();
        self.integrate_u_with(|s, _| 2.0 * s * angular_mean(rho * s, e, kernel_opts()), 0.0, &extra, kernel_opts())
    }

    /// Empirical doubling certificate on radii up to `r_max`.
    pub fn doubling_report(&self, r_max: f64) -> DoublingReport {
        let r_max = r_max.clamp(0.5, 1.0 - 1e-12);
        let n = 400;
        let t_max = -(1.0 - r_max).ln();
        let radii: Vec<f64> = (0..n).map(|i| 1.0 - (-(i as f64) * t_max / (n - 1) as f64).exp()).collect();
        let tails: Vec<f64> = radii.iter().map(|r| self.tail_quad(*r)).collect();
        let mut c: f64 = 1.0;
        for r in &radii {
            let num = self.tail_quad(*r);
            let den = self.tail_quad(0.5 * (1.0 + r));
            let ratio = if den > 0.0 { num / den } else { f64::INFINITY };
            if ratio.is_nan() {
                c = f64::INFINITY;
            } else {
                c = c.max(ratio);
            }
        }
        let member = c.is_finite() && c <= DOUBLING_CAP;
        let (beta, gamma, lambda0) = if member {
            (
                Some(self.beta_exponent(&radii, &tails, c)),
                self.gamma_exponent(&radii, c),
                self.lambda_exponent(r_max),
            )
        } else {
            (None, None, None)
        };
        DoublingReport { weight: self.name(), r_max, samples: n, member, c, beta, gamma, lambda0 }
    }

    fn beta_exponent(&self, radii: &[f64], tails: &[f64], c: f64) -> f64 {
        let mut beta: f64 = 0.0;
        let stride = 3;
        for i in (0..radii.len()).step_by(stride) {
            for j in (i + 1..radii.len()).step_by(stride) {
                let x = ((1.0 - radii[i]) / (1.0 - radii[j])).ln();
                let y = (tails[i] / (c * tails[j])).ln();
                if x > 0.0 {
                    beta = beta.max(y / x);
                }
            }
        }
        (beta / EXPONENT_STEP).ceil() * EXPONENT_STEP
    }

    fn gamma_ratio(&self, radii: &[f64], gamma: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for t in radii.iter().step_by(4) {
            let tt = -(1.0 - t).ln();
            if tt <= 0.0 {
                continue;
            }
            let g = |u: f64| (-gamma * (tt - u)).exp() * self.gap_density(u);
            let mut pts = vec![0.0];
            let w = 1.0 / gamma.max(1e-3);
            for k in [64.0, 16.0, 4.0, 1.0] {
                if tt - k * w > 0.0 {
                    pts.push(tt - k * w);
                }
            }
            pts.push(tt);
            let lhs = integrate_breaks(g, &pts, quad_opts()).value;
            worst = worst.max(lhs / self.tail_quad(*t));
        }
        worst
    }

    fn gamma_exponent(&self, radii: &[f64], c: f64) -> Option<f64> {
        let hi_cap = 64.0;
        if self.gamma_ratio(radii, hi_cap) > c {
            return None;
        }
        let (mut lo, mut hi) = (0.0, hi_cap);
        if self.gamma_ratio(radii, 0.0) <= c {
            return Some(0.0);
        }
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if self.gamma_ratio(radii, mid) <= c {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some((hi / EXPONENT_STEP).ceil() * EXPONENT_STEP)
    }

    fn kernel_ratio_spread(&self, lambda: f64, rhos: &[f64]) -> f64 {
        let vals: Vec<f64> = rhos
            .iter()
            .map(|rho| self.kernel_integral(*rho, lambda + 1.0) * (1.0 - rho).powf(lambda) / self.tail_quad(*rho))
            .collect();
        let max = vals.iter().cloned().fold(0.0, f64::max);
        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    }

    fn lambda_exponent(&self, r_max: f64) -> Option<f64> {
        let t_max = -(1.0 - r_max).ln();
        let t_min = 2f64.ln();
        let m = 12;
        let rhos: Vec<f64> =
            (0..m).map(|i| 1.0 - (-(t_min + (t_max - t_min) * i as f64 / (m - 1) as f64)).exp()).collect();
        let mut lambda = LAMBDA_STEP;
        while lambda <= 24.0 {
            if self.kernel_ratio_spread(lambda, &rhos) <= LAMBDA_BRACKET {
                return Some(lambda);
            }
            lambda += LAMBDA_STEP;
        }
        None
    }

    /// Largest of `max(x, 1/x)` for the ratios `ω(S)/ω(T)` and `ω(T)/ω⋆` over `n` radii
    /// spread evenly in `log(1 − r)` between 0.5 and 0.99.
    pub fn comparability(&self, n: usize) -> Comparability {
        let (mut st, mut ts): (f64, f64) = (1.0, 1.0);
        let (a, b) = ((0.5f64).ln(), (0.01f64).ln());
        for i in 0..n {
            let r = 1.0 - (a + (b - a) * i as f64 / (n - 1).max(1) as f64).exp();
            let z = DiscPoint::polar(r, 0.0);
            let s = self.square_mass(&z).unwrap();
            let t = self.tent_mass(&z, DEFAULT_APERTURE);
            let o = self.omega_star(&z).unwrap();
            st = st.max(s / t).max(t / s);
            ts = ts.max(t / o).max(o / t);
        }
        Comparability { samples: n, square_tent: st, tent_star: ts }
    }
}

/// Sup of comparability ratios, each reported as `max(x, 1/x)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Comparability {
    pub samples: usize,
    pub square_tent: f64,
    pub tent_star: f64,
}

impl Comparability {
    pub fn k(&self) -> f64 {
        self.square_tent.max(self.tent_star)
    }
}

fn check_radius(r: f64) -> Result<()> {
    if (0.0..1.0).contains(&r) {
        Ok(())
    } else {
        Err(LabError::Domain(format!("radius {r} must lie in [0, 1)")))
    }
}

/// `(1/2π) ∫ |1 − w e^{iθ}|^{−e} dθ` for `0 ≤ w < 1`.
pub fn angular_kernel_mean(w: f64, e: f64) -> f64 {
    angular_mean(w, e, quad_opts())
}

fn angular_mean(w: f64, e: f64, opts: QuadOptions) -> f64 {
    if w == 0.0 {
        return 1.0;
    }
    let g = |t: f64| (1.0 - 2.0 * w * t.cos() + w * w).powf(-0.5 * e);
    let d = (1.0 - w).max(1e-15);
    let mut pts = vec![0.0];
    let mut x = d;
    while x < PI {
        pts.push(x);
        x *= 2.0;
    }
    pts.push(PI);
    integrate_breaks(g, &pts, opts).value / PI
}

/// Empirical doubling data of a weight.
#[derive(Debug, Clone, Serialize)]
pub struct DoublingReport {
    pub weight: String,
    pub r_max: f64,
    pub samples: usize,
    pub member: bool,
    #[serde(rename = "C")]
    pub c: f64,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub lambda0: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn tail_examples() {
        let one = RadialWeight::standard(0.0).unwrap();
        assert!(close(one.tail(0.5).unwrap(), 0.5, 1e-12));
        let w = RadialWeight::standard(1.0).unwrap();
        assert!(close(w.tail(0.0).unwrap(), 2.0 / 3.0, 1e-12));
        assert!(one.tail(1.0).is_err());
        let mut prev = f64::INFINITY;
        for i in 0..50 {
            let t = one.tail(1.0 - 0.8f64.powi(i)).unwrap();
            assert!(t < prev);
            prev = t;
        }
        assert!(prev < 1e-4);
    }

    #[test]
    fn log_tail_closed_form() {
        let w = RadialWeight::log();
        for r in [0.0, 0.3, 0.9, 0.999, 1.0 - 1e-9] {
            let exact = 1.0 / (1.0 - (1.0f64 - r).ln());
            assert!(close(w.tail(r).unwrap(), exact, 1e-9), "r={r}");
            assert!(close(w.tail_interp(r), exact, 1e-8), "r={r}");
        }
    }

    #[test]
    fn interpolated_tables_track_quadrature() {
        let w = RadialWeight::standard(1.5).unwrap();
        for r in [0.0, 0.123, 0.5, 0.77, 0.99, 0.9999] {
            assert!(close(w.tail_interp(r), w.tail(r).unwrap(), 1e-7), "r={r}");
            assert!(close(w.m1_interp(r), w.m1(r), 1e-7), "r={r} {} {}", w.m1_interp(r), w.m1(r));
        }
    }

    #[test]
    fn region_mass_examples() {
        let one = RadialWeight::standard(0.0).unwrap();
        let a = DiscPoint::from_polar(0.5, 0.0).unwrap();
        let s = one.region_mass(&Region::square_at(&a).unwrap()).unwrap();
        assert!(close(s, 0.5 * 0.75 / TAU, 1e-12));
        assert!(close(s, 0.059683, 1e-5));
        let t = one.region_mass(&Region::tent(a)).unwrap();
        assert!(close(t, 0.125 / PI, 1e-12));
        assert!(one.square_mass(&DiscPoint::origin()).is_err());
        let near = DiscPoint::from_polar(0.9999, 0.0).unwrap();
        assert!(one.square_mass(&near).unwrap() < 1e-7);
    }

    #[test]
    fn generic_slices_agree_with_closed_forms() {
        let w = RadialWeight::standard(0.7).unwrap();
        let z = DiscPoint::from_polar(0.6, 1.0).unwrap();
        for reg in [Region::tent(z), Region::square_at(&z).unwrap(), Region::lens(z).unwrap()] {
            assert!(close(w.slice_mass(&reg), w.region_mass(&reg).unwrap(), 1e-7), "{reg:?}");
        }
    }

    #[test]
    fn omega_star_examples() {
        let one = RadialWeight::standard(0.0).unwrap();
        let z = DiscPoint::from_polar(0.5, 0.2).unwrap();
        let r: f64 = 0.5;
        let oracle = -0.5 * r.ln() - 0.25 + 0.25 * r * r;
        assert!(close(one.omega_star(&z).unwrap(), oracle, 1e-12));
        assert!(close(oracle, 0.15907, 1e-4));
        assert!(one.omega_star(&DiscPoint::origin()).is_err());
    }

    #[test]
    fn doubling_of_lebesgue_is_two() {
        let one = RadialWeight::standard(0.0).unwrap();
        let rep = one.doubling_report(0.999);
        assert!(rep.member);
        assert!((rep.c - 2.0).abs() < 1e-6);
        let beta = rep.beta.unwrap();
        assert!(beta > 0.85 && beta <= 1.0, "beta = {beta}");
    }

    #[test]
    fn exponential_weight_rejected() {
        let rep = RadialWeight::exponential().doubling_report(0.999);
        assert!(!rep.member);
    }

    #[test]
    fn angular_mean_matches_series() {
        let (w, e): (f64, f64) = (0.6, 3.0);
        let a = e / 2.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 1..400 {
            let nf = n as f64;
            term *= ((a + nf - 1.0) / nf).powi(2) * w * w;
            sum += term;
        }
        assert!(close(angular_kernel_mean(w, e), sum, 1e-10));
    }
}
