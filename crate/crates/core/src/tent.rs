//! Tent-space functionals over a discrete or grid measure `ν`.
//!
//! Cone integrals `∫_Γ(ζ) |f|^q dν` are evaluated at the cells of a quadrature grid, so that
//! `L^p_ω` norms of area functions are finite sums over the same cells used for `ω(T(z))`.

use crate::analytic::kernel;
use crate::error::{domain, validation, Result};
use crate::geometry::{dyadic_arc, dyadic_count, dyadic_vertex, DiscPoint, Region, DEFAULT_APERTURE};
use crate::grid::{CellPrefix, PolarGrid};
use crate::measure::DiscMeasure;
use crate::weights::RadialWeight;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};
use std::sync::{Arc as Shared, OnceLock};

/// Points closer than this relative amount to the boundary of a lens are moved inward before
/// being used as candidate vertices.
const SHRINK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TentOptions {
    pub aperture: f64,
    pub n_max: u32,
}

impl Default for TentOptions {
    fn default() -> Self {
        TentOptions { aperture: DEFAULT_APERTURE, n_max: 8 }
    }
}

struct Cones {
    start: Vec<usize>,
    idx: Vec<u32>,
    modulus: Vec<f64>,
}

/// A measure `ν`, a weight and a quadrature grid, with everything needed to evaluate
/// `A_{q,ν}`, `C_{q,ν}` and the associated norms.
pub struct TentSpace {
    weight: RadialWeight,
    nu: DiscMeasure,
    grid: Shared<PolarGrid>,
    opts: TentOptions,
    omega: Vec<f64>,
    prefix: CellPrefix,
    points: Vec<DiscPoint>,
    masses: Vec<f64>,
    tent_mass: Vec<f64>,
    cand: Vec<DiscPoint>,
    cand_mass: Vec<f64>,
    cand_members: Vec<Vec<u32>>,
    dyadic_offset: Vec<usize>,
    free: Vec<usize>,
    cones: OnceLock<Cones>,
}

/// Result of the stopping-time construction at every grid cell.
#[derive(Debug, Clone, Serialize)]
pub struct StoppingProfile {
    pub q: f64,
    pub c1: f64,
    pub h: Vec<f64>,
    pub truncated: Vec<f64>,
    pub c_values: Vec<f64>,
    pub degenerate: usize,
}

impl TentSpace {
    pub fn new(nu: DiscMeasure, weight: &RadialWeight, grid: Shared<PolarGrid>, opts: TentOptions) -> Result<Self> {
        Self::with_candidates(nu, weight, grid, opts, &[])
    }

    /// Adds `extra` to the vertices over which `C_{q,ν}` takes its supremum.
    pub fn with_candidates(
        nu: DiscMeasure,
        weight: &RadialWeight,
        grid: Shared<PolarGrid>,
        opts: TentOptions,
        extra: &[DiscPoint],
    ) -> Result<Self> {
        if !(opts.aperture > 0.0 && opts.aperture < PI) {
            return validation(format!("aperture {} outside (0, π)", opts.aperture));
        }
        if opts.n_max > 16 {
            return validation("candidate depth above 16 is not supported");
        }
        let omega = grid.omega_weights(weight);
        let prefix = grid.prefix(&omega);
        let support = nu.support();
        let points: Vec<DiscPoint> = support.iter().map(|a| a.point).collect();
        let masses: Vec<f64> = support.iter().map(|a| a.mass).collect();
        let al = opts.aperture;
        let tent_mass: Vec<f64> = points
            .par_iter()
            .map(|z| grid.sum_in(&Region::Tent { vertex: *z, aperture: al }, &prefix))
            .collect();

        let mut cand = vec![DiscPoint::origin()];
        let mut dyadic_offset = Vec::new();
        for n in 0..=opts.n_max {
            dyadic_offset.push(cand.len());
            for k in 0..dyadic_count(n) {
                cand.push(dyadic_vertex(n, k));
            }
        }
        let mut free = Vec::new();
        for z in nu.atoms().iter().map(|a| &a.point).chain(extra.iter()) {
            if !z.is_origin() {
                free.push(cand.len());
                cand.push(z.scaled(1.0 - SHRINK));
            }
        }
        let (cand_mass, cand_members): (Vec<f64>, Vec<Vec<u32>>) = cand
            .par_iter()
            .map(|a| {
                let t = Region::Tent { vertex: *a, aperture: al };
                let mut m = Vec::new();
                nu.for_each_in(&t, |i| m.push(i as u32));
                (grid.sum_in(&t, &prefix), m)
            })
            .unzip();
        Ok(TentSpace {
            weight: weight.clone(),
            nu,
            grid,
            opts,
            omega,
            prefix,
            points,
            masses,
            tent_mass,
            cand,
            cand_mass,
            cand_members,
            dyadic_offset,
            free,
            cones: OnceLock::new(),
        })
    }

    pub fn measure(&self) -> &DiscMeasure {
        &self.nu
    }

    pub fn weight(&self) -> &RadialWeight {
        &self.weight
    }

    pub fn grid(&self) -> &Shared<PolarGrid> {
        &self.grid
    }

    pub fn aperture(&self) -> f64 {
        self.opts.aperture
    }

    pub fn options(&self) -> TentOptions {
        self.opts
    }

    /// Support points of `ν`, in the order used for sampled functions.
    pub fn points(&self) -> &[DiscPoint] {
        &self.points
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `ω(T(z_i))` on the quadrature grid.
    pub fn tent_masses(&self) -> &[f64] {
        &self.tent_mass
    }

    /// `ω` mass of each quadrature cell.
    pub fn cell_omega(&self) -> &[f64] {
        &self.omega
    }

    /// `ω(R)` on the quadrature grid.
    pub fn grid_mass(&self, region: &Region) -> f64 {
        self.grid.sum_in(region, &self.prefix)
    }

    fn tent(&self, z: DiscPoint) -> Region {
        Region::Tent { vertex: z, aperture: self.opts.aperture }
    }

    fn lens(&self, z: DiscPoint) -> Region {
        Region::Lens { vertex: z, aperture: self.opts.aperture }
    }

    fn check(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.points.len() {
            return validation(format!("function has {} values for a support of {}", f.len(), self.points.len()));
        }
        Ok(())
    }

    fn cones(&self) -> &Cones {
        self.cones.get_or_init(|| {
            let n = self.grid.len();
            let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
            for (i, z) in self.points.iter().enumerate() {
                if self.masses[i] > 0.0 {
                    self.grid.for_each_in(&self.tent(*z), |c| lists[c].push(i as u32));
                }
            }
            let mut start = Vec::with_capacity(n + 1);
            let mut idx = Vec::new();
            let mut modulus = Vec::new();
            for mut l in lists {
                start.push(idx.len());
                l.sort_by(|a, b| self.points[*b as usize].modulus().total_cmp(&self.points[*a as usize].modulus()));
                for i in l {
                    modulus.push(self.points[i as usize].modulus());
                    idx.push(i);
                }
            }
            start.push(idx.len());
            Cones { start, idx, modulus }
        })
    }

    /// `A_{q,ν}(f)(ζ)` over the truncated lens `Γ^h(ζ)`; `q` and `h` may be infinite.
    pub fn area(&self, f: &[f64], q: f64, zeta: &DiscPoint, h: f64) -> Result<f64> {
        self.check(f)?;
        if zeta.is_origin() {
            return domain("area function at the origin");
        }
        let region = Region::truncated(*zeta, self.opts.aperture, h)?;
        let mut acc: f64 = 0.0;
        for (i, z) in self.points.iter().enumerate() {
            if self.masses[i] > 0.0 && region.contains(z) {
                let v = f[i].abs();
                if q.is_infinite() {
                    acc = acc.max(v);
                } else {
                    acc += v.powf(q) * self.masses[i];
                }
            }
        }
        Ok(if q.is_infinite() { acc } else { acc.powf(1.0 / q) })
    }

    /// `A_{q,ν}(f)` at every quadrature cell.
    pub fn area_profile(&self, f: &[f64], q: f64) -> Result<Vec<f64>> {
        self.check(f)?;
        let n = self.grid.len();
        let chunk = 64.max(self.points.len() / (4 * rayon::current_num_threads().max(1)) + 1);
        let idx: Vec<usize> = (0..self.points.len()).filter(|i| self.masses[*i] > 0.0 && f[*i] != 0.0).collect();
        let inf = q.is_infinite();
        let acc = idx
            .par_chunks(chunk)
            .map(|ch| {
                let mut a = vec![0.0f64; n];
                for &i in ch {
                    let v = if inf { f[i].abs() } else { f[i].abs().powf(q) * self.masses[i] };
                    self.grid.for_each_in(&self.tent(self.points[i]), |c| {
                        if inf {
                            a[c] = a[c].max(v);
                        } else {
                            a[c] += v;
                        }
                    });
                }
                a
            })
            .reduce(
                || vec![0.0; n],
                |mut x, y| {
                    for (u, v) in x.iter_mut().zip(y) {
                        *u = if inf { u.max(v) } else { *u + v };
                    }
                    x
                },
            );
        Ok(if inf { acc } else { acc.into_iter().map(|v| v.powf(1.0 / q)).collect() })
    }

    /// `‖v‖_{L^p_ω}` for a function sampled on the quadrature cells.
    pub fn lp(&self, values: &[f64], p: f64) -> f64 {
        if p.is_infinite() {
            return values.iter().zip(&self.omega).filter(|(_, w)| **w > 0.0).fold(0.0, |m, (v, _)| m.max(v.abs()));
        }
        let s: f64 = values.iter().zip(&self.omega).map(|(v, w)| v.abs().powf(p) * w).sum();
        s.powf(1.0 / p)
    }

    /// `∫ A^q_{q,ν}(f) ω dA` on the grid.
    pub fn area_integral(&self, f: &[f64], q: f64) -> Result<f64> {
        let a = self.area_profile(f, q)?;
        Ok(a.iter().zip(&self.omega).map(|(v, w)| v.powf(q) * w).sum())
    }

    /// `Σ_k |f(z_k)|^q ω(T(z_k)) ν_k`.
    pub fn fubini_sum(&self, f: &[f64], q: f64) -> Result<f64> {
        self.check(f)?;
        Ok((0..f.len()).map(|i| f[i].abs().powf(q) * self.tent_mass[i] * self.masses[i]).sum())
    }

    /// Values `(1/ω(T(a))) ∫_T(a) |f|^q ω(T(z)) dν(z)` for every candidate vertex `a`.
    pub fn candidate_averages(&self, f: &[f64], q: f64) -> Result<Vec<f64>> {
        self.check(f)?;
        if !(q > 0.0 && q.is_finite()) {
            return validation("C functional needs a finite positive exponent");
        }
        let w: Vec<f64> = (0..f.len()).map(|i| f[i].abs().powf(q) * self.tent_mass[i] * self.masses[i]).collect();
        Ok(self
            .cand_members
            .par_iter()
            .zip(self.cand_mass.par_iter())
            .map(|(m, om)| {
                let s: f64 = m.iter().map(|i| w[*i as usize]).sum();
                if *om > 0.0 {
                    s / om
                } else {
                    0.0
                }
            })
            .collect())
    }

    fn for_each_candidate_in_lens<F: FnMut(usize)>(&self, zeta: &DiscPoint, mut f: F) {
        let lens = self.lens(*zeta);
        f(0);
        let r = zeta.modulus();
        let th = zeta.arg();
        for n in 0..=self.opts.n_max {
            let rv = 1.0 - 0.5f64.powi(n as i32 + 1);
            if rv >= r {
                break;
            }
            let width = self.opts.aperture * (1.0 - rv / r);
            let len = dyadic_arc(n, 0).len();
            let count = dyadic_count(n) as i64;
            let lo = ((th - width) / len - 0.5).floor() as i64;
            let hi = ((th + width) / len - 0.5).ceil() as i64;
            let span = (hi - lo + 1).min(count);
            for j in 0..span {
                let k = (lo + j).rem_euclid(count) as u64;
                if lens.contains(&dyadic_vertex(n, k)) {
                    f(self.dyadic_offset[n as usize] + k as usize);
                }
            }
        }
        for &c in &self.free {
            if lens.contains(&self.cand[c]) {
                f(c);
            }
        }
    }

    /// `C_{q,ν}(f)(ζ)` from precomputed candidate averages.
    pub fn c_at(&self, averages: &[f64], q: f64, zeta: &DiscPoint) -> Result<f64> {
        if zeta.is_origin() {
            return domain("C functional at the origin");
        }
        let mut best: f64 = 0.0;
        self.for_each_candidate_in_lens(zeta, |c| best = best.max(averages[c]));
        Ok(best.powf(1.0 / q))
    }

    pub fn c_function(&self, f: &[f64], q: f64, zeta: &DiscPoint) -> Result<f64> {
        let av = self.candidate_averages(f, q)?;
        self.c_at(&av, q, zeta)
    }

    /// `C_{q,ν}(f)` at every quadrature cell.
    pub fn c_profile(&self, f: &[f64], q: f64) -> Result<Vec<f64>> {
        let av = self.candidate_averages(f, q)?;
        Ok(self.grid.points().par_iter().map(|z| self.c_at(&av, q, z).unwrap_or(0.0)).collect())
    }

    /// `‖f‖_{T^p_q(ν,ω)}`; `p = ∞` uses `sup C_{q,ν}(f)` and `q = ∞` the cone supremum.
    pub fn norm(&self, f: &[f64], p: f64, q: f64) -> Result<f64> {
        if !(p > 0.0) || !(q > 0.0) {
            return validation("tent-space exponents must be positive");
        }
        if p.is_infinite() {
            if q.is_infinite() {
                return validation("T^∞_∞ is not supported");
            }
            let c = self.c_profile(f, q)?;
            return Ok(c.into_iter().fold(0.0, f64::max));
        }
        let a = self.area_profile(f, q)?;
        Ok(self.lp(&a, p))
    }

    /// `∫ f ḡ ω(T(z)) dν(z)`.
    pub fn pairing(&self, f: &[f64], g: &[f64]) -> Result<f64> {
        self.check(f)?;
        if g.len() != f.len() {
            return validation("paired functions live on different supports");
        }
        Ok((0..f.len()).map(|i| f[i] * g[i] * self.tent_mass[i] * self.masses[i]).sum())
    }

    fn cone_sums(&self, g: &[f64], q: f64) -> Vec<f64> {
        let cones = self.cones();
        let mut cum = vec![0.0; cones.idx.len()];
        for c in 0..self.grid.len() {
            let mut s = 0.0;
            for j in cones.start[c]..cones.start[c + 1] {
                let i = cones.idx[j] as usize;
                s += g[i].abs().powf(q) * self.masses[i];
                cum[j] = s;
            }
        }
        cum
    }

    /// `A^q(g|x)(ζ_c)` with the cone truncated to `|u| > t`.
    fn truncated_sum(&self, cum: &[f64], c: usize, t: f64) -> f64 {
        let cones = self.cones();
        let (a, b) = (cones.start[c], cones.start[c + 1]);
        let k = cones.modulus[a..b].partition_point(|m| *m > t);
        if k == 0 {
            0.0
        } else {
            cum[a + k - 1]
        }
    }

    /// Largest ratio between the `x = 1/|z| − 1` truncated cone average over `T(z)` and
    /// `inf_{T(z)} C^q`, over grid cells with `|z| ≥ r_min`.
    pub fn measure_c3(&self, g: &[f64], q: f64, r_min: f64) -> Result<f64> {
        self.check(g)?;
        let av = self.candidate_averages(g, q)?;
        let cvals: Vec<f64> = self.grid.points().par_iter().map(|z| self.c_at(&av, q, z).unwrap().powf(q)).collect();
        let cum = self.cone_sums(g, q);
        let pts = self.grid.points();
        let c3 = (0..self.grid.len())
            .into_par_iter()
            .filter(|c| pts[*c].modulus() >= r_min)
            .map(|c| {
                let z = pts[c];
                let mut num = 0.0;
                let mut om = 0.0;
                let mut inf = f64::INFINITY;
                self.grid.for_each_in(&self.tent(z), |cz| {
                    let t = pts[cz].modulus() * z.modulus();
                    num += self.omega[cz] * self.truncated_sum(&cum, cz, t);
                    om += self.omega[cz];
                    inf = inf.min(cvals[cz]);
                });
                if om == 0.0 || num == 0.0 {
                    0.0
                } else if inf == 0.0 {
                    f64::INFINITY
                } else {
                    num / om / inf
                }
            })
            .reduce(|| 0.0, f64::max);
        Ok(c3)
    }

    /// `h(ζ) = sup{h : A_{q,ν}(g|h)(ζ) ≤ C₁ C_{q,ν}(g)(ζ)}` at every quadrature cell.
    pub fn stopping_time(&self, g: &[f64], q: f64, c1: f64) -> Result<StoppingProfile> {
        self.check(g)?;
        if !(c1 > 0.0) {
            return validation("stopping-time constant must be positive");
        }
        let av = self.candidate_averages(g, q)?;
        let cum = self.cone_sums(g, q);
        let cones = self.cones();
        let pts = self.grid.points();
        let rows: Vec<(f64, f64, f64, bool)> = (0..self.grid.len())
            .into_par_iter()
            .map(|c| {
                let zeta = pts[c];
                let cv = self.c_at(&av, q, &zeta).unwrap();
                let bound = (c1 * cv).powf(q);
                let (a, b) = (cones.start[c], cones.start[c + 1]);
                let total = if b > a { cum[b - 1] } else { 0.0 };
                let mut degenerate = false;
                let mut h = f64::INFINITY;
                let mut trunc = total;
                if total > bound {
                    degenerate = cv == 0.0;
                    let j = cum[a..b].partition_point(|s| *s <= bound);
                    let m = cones.modulus[a + j];
                    h = if m > 0.0 { zeta.modulus() / m - 1.0 } else { f64::INFINITY };
                    if h.is_finite() {
                        trunc = self.truncated_sum(&cum, c, m);
                    }
                }
                (h, trunc.powf(1.0 / q), cv, degenerate)
            })
            .collect();
        Ok(StoppingProfile {
            q,
            c1,
            degenerate: rows.iter().filter(|r| r.3).count(),
            h: rows.iter().map(|r| r.0).collect(),
            truncated: rows.iter().map(|r| r.1).collect(),
            c_values: rows.iter().map(|r| r.2).collect(),
        })
    }

    /// `(1/ω(T(z))) ∫_{T(z)∩H(z)} ω dA`, or `None` when `T(z)` holds no quadrature cell.
    pub fn coverage(&self, profile: &StoppingProfile, z: &DiscPoint) -> Option<f64> {
        let pts = self.grid.points();
        let mut inside = 0.0;
        let mut om = 0.0;
        self.grid.for_each_in(&self.tent(*z), |c| {
            om += self.omega[c];
            if pts[c].modulus() <= (1.0 + profile.h[c]) * z.modulus() {
                inside += self.omega[c];
            }
        });
        (om > 0.0).then(|| inside / om)
    }

    /// `P₀(g)(z) = (1/ω(T(z))) ∫_{T(z)} g(ζ) ω(ζ) dA(ζ)`; `g` is indexed by quadrature cell.
    pub fn p0_average(&self, z: &DiscPoint, g: impl Fn(usize) -> f64) -> Result<f64> {
        let mut s = 0.0;
        let mut om = 0.0;
        self.grid.for_each_in(&self.tent(*z), |c| {
            s += g(c) * self.omega[c];
            om += self.omega[c];
        });
        if om == 0.0 {
            return domain("tent carries no weight on the quadrature grid");
        }
        Ok(s / om)
    }

    /// `P₀(g)` at the support points; `g(i, c)` pairs a support index with a cell index.
    pub fn p0_image(&self, g: impl Fn(usize, usize) -> f64 + Sync) -> Result<Vec<f64>> {
        (0..self.points.len()).into_par_iter().map(|i| self.p0_average(&self.points[i], |c| g(i, c))).collect()
    }

    /// `‖h‖_{L^pL^q(ν,ω)}` for `h(i, c)`; either exponent may be infinite.
    pub fn mixed_norm(&self, h: impl Fn(usize, usize) -> f64 + Sync, p: f64, q: f64) -> Result<f64> {
        if !(p > 0.0) || !(q > 0.0) {
            return validation("mixed-norm exponents must be positive");
        }
        let inner: Vec<f64> = (0..self.grid.len())
            .into_par_iter()
            .map(|c| {
                if q.is_infinite() {
                    (0..self.points.len()).filter(|i| self.masses[*i] > 0.0).fold(0.0f64, |m, i| m.max(h(i, c).abs()))
                } else {
                    let s: f64 = (0..self.points.len()).map(|i| h(i, c).abs().powf(q) * self.masses[i]).sum();
                    s.powf(1.0 / q)
                }
            })
            .collect();
        Ok(self.lp(&inner, p))
    }

    /// Both sides of the cone-kernel comparison
    /// `∫ (∫ h_λ(z,ζ) dν(z))^p ω dA(ζ)` against `∫ ν(Γ(ζ)∖{0})^p ω dA(ζ) + ν({0})`.
    pub fn cone_kernel_ratio(&self, p: f64, lambda: f64) -> Result<ConeKernel> {
        if !(p > 0.0) || !(lambda > 0.0) {
            return validation("cone-kernel exponents must be positive");
        }
        let pts = self.grid.points();
        let lhs: f64 = (0..self.grid.len())
            .into_par_iter()
            .map(|c| {
                let s: f64 = self
                    .points
                    .iter()
                    .zip(&self.masses)
                    .map(|(z, m)| m * kernel(z, &pts[c], lambda))
                    .sum();
                s.powf(p) * self.omega[c]
            })
            .sum();
        let ones: Vec<f64> = self.points.iter().map(|z| if z.is_origin() { 0.0 } else { 1.0 }).collect();
        let cone = self.area_profile(&ones, 1.0)?;
        let rhs = cone.iter().zip(&self.omega).map(|(v, w)| v.powf(p) * w).sum::<f64>() + self.nu.origin_mass();
        let flagged = rhs == 0.0 && lhs > 0.0;
        let ratio = if rhs == 0.0 {
            if lhs == 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            lhs / rhs
        };
        Ok(ConeKernel { lhs, rhs, ratio, flagged })
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConeKernel {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub flagged: bool,
}

/// `F(u, ρ, ν) = Σ_k χ_{D(z_k, ρ|z_k|(1−|z_k|))}(u) ν_k / (ρ²|z_k|²)` over the atoms of `ν`.
pub fn regularization(nu: &DiscMeasure, rho: f64, u: &DiscPoint) -> f64 {
    nu.atoms()
        .iter()
        .filter(|a| !a.point.is_origin())
        .filter(|a| {
            let r = a.point.modulus();
            (u.z() - a.point.z()).norm() < rho * r * (1.0 - r)
        })
        .map(|a| a.mass / (rho * rho * a.point.modulus().powi(2)))
        .sum()
}

/// `∫ F(u, ρ, ν) h_λ(u, ζ) dh(u)`, integrating each Euclidean disc separately.
pub fn regularized_kernel(nu: &DiscMeasure, rho: f64, lambda: f64, zeta: &DiscPoint) -> f64 {
    const NR: usize = 12;
    const NT: usize = 24;
    let (xs, ws) = gauss_legendre(NR);
    nu.atoms()
        .iter()
        .filter(|a| !a.point.is_origin())
        .map(|a| {
            let r0 = a.point.modulus();
            let rad = rho * r0 * (1.0 - r0);
            let mut s = 0.0;
            for (x, w) in xs.iter().zip(&ws) {
                let t = 0.5 * (x + 1.0) * rad;
                for j in 0..NT {
                    let phi = TAU * (j as f64 + 0.5) / NT as f64;
                    let u = a.point.z() + num_complex::Complex64::from_polar(t, phi);
                    let up = DiscPoint::new(u).expect("disc stays inside 𝔻");
                    let dh = 1.0 / (1.0 - u.norm_sqr()).powi(2);
                    s += w * 0.5 * rad * t * (TAU / NT as f64) / PI * kernel(&up, zeta, lambda) * dh;
                }
            }
            s * a.mass / (rho * rho * r0 * r0)
        })
        .sum()
}

fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
                break;
            }
        }
        xs[i] = x;
    }
    (xs, ws)
}

/// Greedy doubling selection: indices `k₁ < …` with `φ_{k_{j+1}} > 2 φ_{k_j}`.
pub fn luecking_select(phi: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let Some(first) = phi.iter().position(|v| *v > 0.0) else {
        return out;
    };
    out.push(first);
    let mut last = phi[first];
    while let Some(k) = phi.iter().position(|v| *v > 2.0 * last) {
        out.push(k);
        last = phi[k];
    }
    out
}

/// `φ̃_k` for a family of sampled functions, applying [`luecking_select`] pointwise.
pub fn luecking_filter(phis: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = phis.first().map_or(0, |v| v.len());
    let mut out = vec![vec![0.0; n]; phis.len()];
    let mut col = vec![0.0; phis.len()];
    for c in 0..n {
        for (k, p) in phis.iter().enumerate() {
            col[k] = p[c];
        }
        for k in luecking_select(&col) {
            out[k][c] = col[k];
        }
    }
    out
}

/// `(1 − 2^{−q})^{−1/q}`, the constant in `(Σ φ̃^q)^{1/q} ≤ c_q max φ̃`.
pub fn luecking_constant(q: f64) -> f64 {
    (1.0 - 2f64.powf(-q)).powf(-1.0 / q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::measure::SeparatedSequence;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(r: f64, t: f64) -> DiscPoint {
        DiscPoint::from_polar(r, t).unwrap()
    }

    fn grid(depth: u32) -> Shared<PolarGrid> {
        Shared::new(PolarGrid::new(GridSpec::default().with_depth(depth)).unwrap())
    }

    fn lattice(seed: u64) -> (DiscMeasure, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let seq = SeparatedSequence::lattice(0.4, 0.97, &mut rng).unwrap();
        let masses: Vec<f64> = (0..seq.len()).map(|_| rng.gen_range(0.1..1.0)).collect();
        let f: Vec<f64> = (0..seq.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        (DiscMeasure::from_sequence(&seq, &masses).unwrap(), f)
    }

    #[test]
    fn area_examples() {
        let w = RadialWeight::standard(0.0).unwrap();
        let z1 = p(0.6, 0.0);
        let z2 = p(0.3, 0.0);
        let nu = DiscMeasure::from_points(vec![(z1, 1.0), (z2, 1.0)]).unwrap();
        let ts = TentSpace::new(nu, &w, grid(5), TentOptions::default()).unwrap();
        let zeta = p(0.9, 0.0);
        assert_eq!(ts.area(&[0.0, 0.0], 2.0, &zeta, f64::INFINITY).unwrap(), 0.0);
        assert!((ts.area(&[0.7, 0.0], 2.0, &zeta, f64::INFINITY).unwrap() - 0.7).abs() < 1e-15);
        // |z₂| = 0.3 ≤ 0.9/(1+h) for h = 1.5, |z₁| = 0.6 > 0.36
        assert!((ts.area(&[0.7, 5.0], 1.0, &zeta, 1.5).unwrap() - 0.7).abs() < 1e-15);
        assert!(ts.area(&[0.7, 5.0], 1.0, &DiscPoint::origin(), 1.0).is_err());
    }

    #[test]
    fn fubini_identity() {
        let w = RadialWeight::standard(1.0).unwrap();
        let (nu, f) = lattice(3);
        let ts = TentSpace::new(nu, &w, grid(6), TentOptions::default()).unwrap();
        for q in [1.0, 2.0, 0.5] {
            let a = ts.area_integral(&f, q).unwrap();
            let b = ts.fubini_sum(&f, q).unwrap();
            assert!((a / b - 1.0).abs() < 1e-11, "{a} {b}");
        }
        let n1 = ts.norm(&f, 2.0, 2.0).unwrap();
        let g: Vec<f64> = f.iter().map(|v| -3.0 * v).collect();
        assert!((ts.norm(&g, 2.0, 2.0).unwrap() / n1 - 3.0).abs() < 1e-12);
    }

    #[test]
    fn c_function_examples() {
        let w = RadialWeight::standard(0.0).unwrap();
        let z0 = p(0.7, 0.3);
        let nu = DiscMeasure::from_points(vec![(z0, 1.0)]).unwrap();
        let ts = TentSpace::new(nu, &w, grid(6), TentOptions::default()).unwrap();
        assert_eq!(ts.c_function(&[0.0], 2.0, &p(0.9, 0.3)).unwrap(), 0.0);
        let c = ts.c_function(&[2.0], 2.0, &p(0.9, 0.3)).unwrap();
        assert!(c >= 2.0 * (1.0 - 1e-12));
    }

    #[test]
    fn pairing_examples() {
        let w = RadialWeight::standard(0.0).unwrap();
        let (nu, f) = lattice(5);
        let ts = TentSpace::new(nu, &w, grid(5), TentOptions::default()).unwrap();
        let zero = vec![0.0; f.len()];
        assert_eq!(ts.pairing(&f, &zero).unwrap(), 0.0);
        let mut e = zero.clone();
        e[2] = 1.0;
        assert_eq!(ts.pairing(&e, &e).unwrap(), ts.tent_masses()[2] * ts.masses()[2]);
        assert!(ts.pairing(&f, &f[1..]).is_err());
    }

    #[test]
    fn stopping_time_single_atom() {
        let w = RadialWeight::standard(0.0).unwrap();
        let z0 = p(0.6, 0.0);
        let nu = DiscMeasure::from_points(vec![(z0, 1.0)]).unwrap();
        let ts = TentSpace::new(nu, &w, grid(5), TentOptions::default()).unwrap();
        let prof = ts.stopping_time(&[0.0], 2.0, 1.0).unwrap();
        assert!(prof.h.iter().all(|h| h.is_infinite()));
        let g = [1.0];
        for c1 in [0.1, 10.0] {
            let prof = ts.stopping_time(&g, 2.0, c1).unwrap();
            for (c, zeta) in ts.grid().points().iter().enumerate() {
                if !ts.lens(*zeta).contains(&z0) {
                    assert!(prof.h[c].is_infinite());
                    continue;
                }
                let cv = ts.c_function(&g, 2.0, zeta).unwrap();
                let expect = if 1.0 <= (c1 * cv).powi(2) { f64::INFINITY } else { zeta.modulus() / 0.6 - 1.0 };
                assert_eq!(prof.h[c], expect);
            }
        }
    }

    #[test]
    fn coverage_with_measured_constant() {
        let w = RadialWeight::standard(0.0).unwrap();
        let (nu, g) = lattice(11);
        let ts = TentSpace::new(nu, &w, grid(5), TentOptions::default()).unwrap();
        let q = 2.0;
        let c3 = ts.measure_c3(&g, q, 5.0 / 6.0).unwrap();
        assert!(c3.is_finite() && c3 > 0.0);
        let prof = ts.stopping_time(&g, q, (4.0 * c3).powf(1.0 / q)).unwrap();
        for z in ts.grid().points().iter().filter(|z| z.modulus() >= 5.0 / 6.0) {
            if let Some(cov) = ts.coverage(&prof, z) {
                assert!(cov >= 0.5, "{cov}");
            }
        }
    }

    #[test]
    fn p0_and_mixed_norms() {
        let w = RadialWeight::standard(0.0).unwrap();
        let (nu, f) = lattice(7);
        let ts = TentSpace::new(nu, &w, grid(5), TentOptions::default()).unwrap();
        let z = p(0.5, 1.0);
        assert!((ts.p0_average(&z, |_| 1.0).unwrap() - 1.0).abs() < 1e-14);
        let zi = p(0.75, 1.0);
        let inner = ts.tent(zi);
        let pts = ts.grid().points().to_vec();
        let v = ts.p0_average(&z, |c| inner.contains(&pts[c]) as u8 as f64).unwrap();
        assert!((v - ts.grid_mass(&inner) / ts.grid_mass(&ts.tent(z))).abs() < 1e-14);
        assert_eq!(ts.mixed_norm(|_, _| 0.0, 2.0, 3.0).unwrap(), 0.0);
        let u: Vec<f64> = f.clone();
        let vv: Vec<f64> = pts.iter().map(|z| z.modulus()).collect();
        let prod = ts.mixed_norm(|i, c| u[i] * vv[c], 2.0, 3.0).unwrap();
        let lu = u.iter().zip(ts.masses()).map(|(a, m)| a.abs().powi(3) * m).sum::<f64>().cbrt();
        assert!((prod / (lu * ts.lp(&vv, 2.0)) - 1.0).abs() < 1e-12);
        let g = |i: usize, c: usize| (u[i] * (1.0 + vv[c])).sin();
        let img = ts.p0_image(g).unwrap();
        let lhs = ts.fubini_sum(&img, 2.0).unwrap().sqrt();
        assert!(lhs <= ts.mixed_norm(g, 2.0, 2.0).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn cone_kernel_conventions() {
        let w = RadialWeight::standard(0.0).unwrap();
        let g = grid(5);
        let ts = TentSpace::new(DiscMeasure::zero(), &w, g.clone(), TentOptions::default()).unwrap();
        let r = ts.cone_kernel_ratio(2.0, 3.0).unwrap();
        assert_eq!((r.lhs, r.rhs, r.ratio), (0.0, 0.0, 1.0));
        let delta = DiscMeasure::from_points(vec![(DiscPoint::origin(), 1.0)]).unwrap();
        let ts = TentSpace::new(delta, &w, g.clone(), TentOptions::default()).unwrap();
        let r = ts.cone_kernel_ratio(2.0, 3.0).unwrap();
        let area: f64 = g.area_weights().iter().sum();
        assert!((r.lhs - area).abs() < 1e-12 && r.rhs == 1.0);
    }

    #[test]
    fn regularization_matches_discrete_kernel() {
        let (nu, _) = lattice(2);
        let zeta = p(0.8, 0.5);
        let lhs: f64 = nu.atoms().iter().map(|a| a.mass * kernel(&a.point, &zeta, 3.0)).sum();
        let rhs = regularized_kernel(&nu, 0.25, 3.0, &zeta);
        let ratio = rhs / lhs;
        assert!(ratio > 0.2 && ratio < 1.1, "{ratio}");
        let a = nu.atoms()[0].point;
        assert!(regularization(&nu, 0.25, &a) > 0.0);
    }

    #[test]
    fn luecking_examples() {
        assert!(luecking_select(&[0.0, 0.0]).is_empty());
        assert_eq!(luecking_select(&[1.0, 3.0, 4.0]), vec![0, 1]);
        assert_eq!(luecking_select(&[1.0, 5.0, 3.0, 11.0]), vec![0, 1, 3]);
        let f = luecking_filter(&[vec![1.0, 0.0], vec![3.0, 2.0], vec![4.0, 5.0]]);
        assert_eq!(f, vec![vec![1.0, 0.0], vec![3.0, 2.0], vec![0.0, 5.0]]);
    }
}
