//! Kernels, rational test functions and Bergman norms.

use crate::error::{domain, validation, Result};
use crate::geometry::{DiscPoint, Region};
use crate::grid::PolarGrid;
use crate::measure::SeparatedSequence;
use crate::quadrature::{integrate_breaks, integrate_to_infinity, QuadOptions};
use crate::weights::RadialWeight;
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

/// `h_λ(z, ζ) = ((1 − |z|)/|1 − ζ̄z|)^λ`.
pub fn kernel(z: &DiscPoint, zeta: &DiscPoint, lambda: f64) -> f64 {
    let d = (Complex64::new(1.0, 0.0) - zeta.z().conj() * z.z()).norm();
    ((1.0 - z.modulus()) / d).powf(lambda)
}

fn pochhammer(e: f64, n: u32) -> f64 {
    (0..n).map(|j| e + j as f64).product()
}

/// `f_{a,p}(z) = ((1 − |a|)/(1 − āz))^{(λ+1)/p} ω(S(a))^{−1/p}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub a: DiscPoint,
    pub p: f64,
    pub lambda: f64,
    scale: f64,
}

impl TestFunction {
    pub fn new(a: DiscPoint, p: f64, weight: &RadialWeight, lambda: f64) -> Result<Self> {
        if a.is_origin() {
            return domain("test function needs a ≠ 0");
        }
        if !(p > 0.0) || !(lambda > 0.0) {
            return validation("test function exponents must be positive");
        }
        let om = weight.square_mass(&a)?;
        if !(om > 0.0) {
            return domain("weight vanishes on S(a)");
        }
        let e = (lambda + 1.0) / p;
        Ok(TestFunction { a, p, lambda, scale: (1.0 - a.modulus()).powf(e) * om.powf(-1.0 / p) })
    }

    fn exponent(&self) -> f64 {
        (self.lambda + 1.0) / self.p
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.derivative(0, z)
    }

    /// `f^{(n)}(z) = c (e)_n ā^n (1 − āz)^{−e−n}`.
    pub fn derivative(&self, n: u32, z: Complex64) -> Complex64 {
        let e = self.exponent();
        let ab = self.a.z().conj();
        let base = Complex64::new(1.0, 0.0) - ab * z;
        base.powf(-e - n as f64) * ab.powi(n as i32) * (self.scale * pochhammer(e, n))
    }

    /// `|f^{(n)}(re^{iθ})|` from `gap = 1 − r`, without the cancellation in `1 − āz` near the
    /// boundary.
    fn abs_derivative_polar(&self, n: u32, gap: f64, theta: f64) -> f64 {
        let e = self.exponent() + n as f64;
        let m = self.a.modulus();
        let rho = m * (1.0 - gap);
        let near = (1.0 - m) + m * gap;
        let s = (0.5 * (theta - self.a.arg())).sin();
        let d2 = near * near + 4.0 * rho * s * s;
        d2.powf(-0.5 * e) * m.powi(n as i32) * self.scale * pochhammer(self.exponent(), n)
    }
}

/// `S_λ(b)(z) = Σ_k b_k ((1 − |z_k|)/(1 − z̄_k z))^λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSum {
    pub points: Vec<DiscPoint>,
    pub coeffs: Vec<f64>,
    pub lambda: f64,
}

impl KernelSum {
    pub fn new(seq: &SeparatedSequence, coeffs: &[f64], lambda: f64) -> Result<Self> {
        if seq.len() != coeffs.len() {
            return validation("coefficient vector does not match the sequence");
        }
        if !(lambda > 0.0) {
            return validation("kernel exponent must be positive");
        }
        Ok(KernelSum { points: seq.points.clone(), coeffs: coeffs.to_vec(), lambda })
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.derivative(0, z)
    }

    pub fn derivative(&self, n: u32, z: Complex64) -> Complex64 {
        let c = pochhammer(self.lambda, n);
        self.points
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, b)| **b != 0.0)
            .map(|(zk, b)| {
                let w = zk.z().conj();
                let base = Complex64::new(1.0, 0.0) - w * z;
                base.powf(-self.lambda - n as f64) * w.powi(n as i32) * (b * c * (1.0 - zk.modulus()).powf(self.lambda))
            })
            .sum()
    }
}

/// `S_λ(b)(z)` at a single point.
pub fn s_lambda(b: &[f64], seq: &SeparatedSequence, lambda: f64, z: &DiscPoint) -> Result<Complex64> {
    Ok(KernelSum::new(seq, b, lambda)?.eval(z.z()))
}

/// Analytic functions with closed-form derivatives.
#[derive(Debug, Clone, PartialEq)]
pub enum Analytic {
    Test(TestFunction),
    Kernel(KernelSum),
    /// Coefficients of `Σ c_j z^j`.
    Polynomial(Vec<Complex64>),
}

impl Analytic {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.derivative(0, z)
    }

    pub fn derivative(&self, n: u32, z: Complex64) -> Complex64 {
        match self {
            Analytic::Test(f) => f.derivative(n, z),
            Analytic::Kernel(f) => f.derivative(n, z),
            Analytic::Polynomial(c) => {
                let mut s = Complex64::new(0.0, 0.0);
                for (j, cj) in c.iter().enumerate().skip(n as usize).rev() {
                    let fall: f64 = ((j - n as usize + 1)..=j).map(|m| m as f64).product();
                    s = s * z + cj * fall;
                }
                s
            }
        }
    }

    /// Angular position and radial scale where the function concentrates, if any.
    fn peaks(&self) -> Vec<DiscPoint> {
        match self {
            Analytic::Test(f) => vec![f.a],
            Analytic::Kernel(k) => k.points.clone(),
            Analytic::Polynomial(_) => Vec::new(),
        }
    }
}

fn angular_breaks(peaks: &[DiscPoint], gap: f64) -> Vec<f64> {
    let mut pts = vec![-PI, PI];
    for a in peaks {
        let t = a.arg();
        let m = a.modulus();
        let w = ((1.0 - m) + m * gap).max(1e-15);
        for m in [0.0, -w, w, -4.0 * w, 4.0 * w, -16.0 * w, 16.0 * w] {
            let x = t + m;
            if x > -PI && x < PI {
                pts.push(x);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    pts
}

/// `(1/2π) ∫ |F^{(n)}(re^{iθ})|^p dθ`.
pub fn integral_mean(f: &Analytic, n: u32, p: f64, r: f64) -> f64 {
    integral_mean_tol(f, n, p, 1.0 - r, 1e-10)
}

/// Integral mean on the circle of radius `1 − gap`.
fn integral_mean_tol(f: &Analytic, n: u32, p: f64, gap: f64, rel_tol: f64) -> f64 {
    let peaks = f.peaks();
    let opts = QuadOptions { abs_tol: 0.0, rel_tol, max_intervals: 2000 };
    let r = 1.0 - gap;
    if peaks.len() > 8 {
        return periodic_trapezoid(|t| f.derivative(n, Complex64::from_polar(r, t)).norm().powf(p), rel_tol);
    }
    let breaks = angular_breaks(&peaks, gap);
    let v = match f {
        Analytic::Test(tf) => integrate_breaks(|t| tf.abs_derivative_polar(n, gap, t).powf(p), &breaks, opts),
        _ => integrate_breaks(|t| f.derivative(n, Complex64::from_polar(r, t)).norm().powf(p), &breaks, opts),
    };
    v.value / TAU
}

/// Mean of a periodic function by the trapezoid rule, doubling the node count until stable.
fn periodic_trapezoid(g: impl Fn(f64) -> f64, rel_tol: f64) -> f64 {
    let mut n = 128usize;
    let mut sum: f64 = (0..n).map(|j| g(TAU * j as f64 / n as f64)).sum();
    loop {
        let extra: f64 = (0..n).map(|j| g(TAU * (j as f64 + 0.5) / n as f64)).sum();
        let old = sum / n as f64;
        sum += extra;
        n *= 2;
        let new = sum / n as f64;
        if (new - old).abs() <= rel_tol * new.abs() || n >= 1 << 16 {
            return new;
        }
    }
}

/// `‖F^{(n)}‖_{A^p_ω}` by adaptive quadrature in `u = −ln(1 − r)` and `θ`.
pub fn bergman_norm(f: &Analytic, n: u32, weight: &RadialWeight, p: f64) -> Result<f64> {
    bergman_norm_tol(f, n, weight, p, 1e-9)
}

/// [`bergman_norm`] with a caller-chosen relative tolerance.
pub fn bergman_norm_tol(f: &Analytic, n: u32, weight: &RadialWeight, p: f64, rel_tol: f64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return validation("Bergman exponent must be finite and positive");
    }
    if !(rel_tol > 0.0) {
        return validation("quadrature tolerance must be positive");
    }
    let opts = QuadOptions { abs_tol: 0.0, rel_tol, max_intervals: 600 };
    let inner = (rel_tol * 0.1).max(1e-12);
    let g = |u: f64| {
        let gap = (-u).exp();
        weight.gap_density(u) * 2.0 * (1.0 - gap) * integral_mean_tol(f, n, p, gap, inner)
    };
    let mut us: Vec<f64> = f.peaks().iter().map(|a| -(-a.modulus()).ln_1p()).collect();
    us.sort_by(f64::total_cmp);
    us.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    let u_top = us.last().copied().unwrap_or(0.0) + 2.0;
    let mut pts = vec![0.0];
    if us.len() <= 12 {
        for u in &us {
            for d in [-1.0, -0.3, 0.0, 0.3, 1.0] {
                if u + d > 0.0 {
                    pts.push(u + d);
                }
            }
        }
    } else {
        let m = 48;
        pts.extend((1..m).map(|j| u_top * j as f64 / m as f64));
    }
    pts.push(u_top);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let head = integrate_breaks(g, &pts, opts).value;
    let tail = integrate_to_infinity(g, u_top, opts).value;
    Ok((head + tail).powf(1.0 / p))
}

/// `(Σ |F|^p ω w)^{1/p}` over the cells of a grid.
pub fn bergman_norm_grid(values: &[Complex64], grid: &PolarGrid, weight: &RadialWeight, p: f64) -> Result<f64> {
    if values.len() != grid.len() {
        return validation("sampled function does not match the grid");
    }
    let w = grid.omega_weights(weight);
    Ok(values.iter().zip(&w).map(|(v, w)| v.norm().powf(p) * w).sum::<f64>().powf(1.0 / p))
}

/// `N(F)(ζ)`: supremum of `|F|` over the grid points of `Γ_α(ζ)` and the origin.
pub fn nontangential_max(f: &Analytic, grid: &PolarGrid, aperture: f64, zeta: &DiscPoint) -> Result<f64> {
    if zeta.is_origin() {
        return domain("non-tangential maximal function at the origin");
    }
    let lens = Region::lens_with(*zeta, aperture)?;
    let mut best = f.eval(Complex64::new(0.0, 0.0)).norm();
    grid.for_each_in(&lens, |c| best = best.max(f.eval(grid.point(c).z()).norm()));
    Ok(best)
}

/// `λ₀ + 1` from the weight's doubling report; `None` when no exponent was certified.
pub fn default_lambda(weight: &RadialWeight) -> Option<f64> {
    weight.doubling_report(0.999).lambda0.map(|l| l + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(r: f64, t: f64) -> DiscPoint {
        DiscPoint::from_polar(r, t).unwrap()
    }

    fn cauchy_derivative(f: &Analytic, z: Complex64) -> Complex64 {
        let h = 1e-3;
        let m = 32;
        (0..m)
            .map(|j| {
                let e = Complex64::from_polar(1.0, TAU * j as f64 / m as f64);
                f.eval(z + e * h) / e
            })
            .sum::<Complex64>()
            / (m as f64 * h)
    }

    #[test]
    fn kernel_examples() {
        let z = p(0.5, 0.0);
        assert_eq!(kernel(&DiscPoint::origin(), &z, 2.0), 1.0);
        assert!((kernel(&z, &DiscPoint::origin(), 2.0) - 0.25).abs() < 1e-15);
        assert!((kernel(&z, &z, 2.0) - 4.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn test_function_values_and_derivatives() {
        let w = RadialWeight::standard(1.0).unwrap();
        let a = p(0.8, 1.1);
        let f = TestFunction::new(a, 2.0, &w, 3.0).unwrap();
        let om = w.square_mass(&a).unwrap();
        let at0 = f.eval(Complex64::new(0.0, 0.0));
        assert!((at0.re - 0.2f64.powf(2.0) / om.sqrt()).abs() < 1e-12 && at0.im.abs() < 1e-14);
        assert!(TestFunction::new(DiscPoint::origin(), 2.0, &w, 3.0).is_err());
        let g = Analytic::Test(f);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let z = Complex64::from_polar(rng.gen_range(0.0..0.7), rng.gen_range(0.0..TAU));
            let d = g.derivative(1, z);
            assert!((d - cauchy_derivative(&g, z)).norm() <= 1e-8 * d.norm().max(1.0));
        }
    }

    #[test]
    fn polynomial_derivatives() {
        let c = vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(0.0, 3.0)];
        let f = Analytic::Polynomial(c);
        let z = Complex64::new(0.3, -0.2);
        assert!((f.eval(z) - (1.0 + 2.0 * z + Complex64::i() * 3.0 * z * z)).norm() < 1e-15);
        assert!((f.derivative(1, z) - (2.0 + Complex64::i() * 6.0 * z)).norm() < 1e-15);
        assert!((f.derivative(2, z) - Complex64::i() * 6.0).norm() < 1e-15);
        assert_eq!(f.derivative(3, z), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn bergman_norm_examples() {
        let w = RadialWeight::standard(0.0).unwrap();
        let zero = Analytic::Polynomial(vec![]);
        assert_eq!(bergman_norm(&zero, 0, &w, 2.0).unwrap(), 0.0);
        let one = Analytic::Polynomial(vec![Complex64::new(1.0, 0.0)]);
        assert!((bergman_norm(&one, 0, &w, 3.0).unwrap() - 1.0).abs() < 1e-9);
        let id = Analytic::Polynomial(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert!((bergman_norm(&id, 0, &w, 2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-9);
        let g = PolarGrid::new(GridSpec::default()).unwrap();
        let ones = vec![Complex64::new(1.0, 0.0); g.len()];
        let n = bergman_norm_grid(&ones, &g, &w, 2.0).unwrap();
        assert!((n * n - g.outer_radius().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn s_lambda_single_term() {
        let seq = SeparatedSequence::new(vec![p(0.6, 0.4), p(0.3, 2.0)]).unwrap();
        let v = s_lambda(&[2.0, 0.0], &seq, 3.0, &DiscPoint::origin()).unwrap();
        assert!((v.re - 2.0 * 0.4f64.powi(3)).abs() < 1e-15);
        assert_eq!(s_lambda(&[0.0, 0.0], &seq, 3.0, &p(0.5, 0.0)).unwrap().norm(), 0.0);
    }

    #[test]
    fn nontangential_examples() {
        let g = PolarGrid::new(GridSpec::default()).unwrap();
        let c = Analytic::Polynomial(vec![Complex64::new(0.7, 0.0)]);
        assert!((nontangential_max(&c, &g, 0.5, &p(0.9, 0.2)).unwrap() - 0.7).abs() < 1e-15);
        let id = Analytic::Polynomial(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        let zeta = p(0.95, 0.2);
        let n = nontangential_max(&id, &g, 0.5, &zeta).unwrap();
        assert!(n < 0.95);
        for t in [0.3, 0.6, 0.9] {
            let r = g.rings().iter().map(|r| r.center).filter(|c| *c < 0.95 * t).last().unwrap_or(0.0);
            assert!(n >= r);
        }
        assert!(nontangential_max(&id, &g, 0.5, &DiscPoint::origin()).is_err());
    }
}
