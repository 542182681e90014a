//! Weighted, dyadic and kernel-form maximal functions of measures.

use crate::error::{validation, Result};
use crate::geometry::{dyadic_arc, dyadic_count, dyadic_vertex, Arc, DiscPoint, Region, Square};
use crate::grid::{CellPrefix, PolarGrid};
use crate::measure::DiscMeasure;
use crate::weights::RadialWeight;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc as Shared;

/// Number of root squares of width one spread around the circle.
pub const ROOT_SQUARES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum MaximalMode {
    /// Dyadic squares at all rotations, root squares, atom-anchored and self-anchored squares.
    Standard,
    /// Squares over the arcs `I_{n,k}`.
    DyadicSquare,
    /// Tents over the arcs `I_{n,k}` plus the global term `μ(𝔻)/ω(𝔻)`.
    DyadicTent,
    /// `sup_{a ∈ Γ(ζ)} ω(S(a))^{−α} ∫ ((1 − |a|)/|1 − āz|)^λ dμ(z)`.
    Kernel { lambda: f64 },
    /// `sup_{a ∈ Γ(ζ)} μ(S(a))/ω(S(a))^α`.
    ConeSquare,
}

/// How `ω(R)` is evaluated.
#[derive(Debug, Clone)]
pub enum OmegaSource {
    Analytic,
    Grid { grid: Shared<PolarGrid>, prefix: CellPrefix },
}

impl OmegaSource {
    pub fn grid(grid: Shared<PolarGrid>, weight: &RadialWeight) -> Self {
        let w = grid.omega_weights(weight);
        let prefix = grid.prefix(&w);
        OmegaSource::Grid { grid, prefix }
    }

    pub fn mass(&self, weight: &RadialWeight, region: &Region) -> f64 {
        match self {
            OmegaSource::Analytic => match region {
                Region::Square(sq) => sq.arc.len() / PI * weight.m1_interp(sq.r_min),
                Region::Tent { vertex, aperture } => 2.0 * aperture / PI * weight.tail2(vertex.modulus()),
                Region::Disc => weight.disc_mass(),
                _ => weight.region_mass(region).unwrap_or(0.0),
            },
            OmegaSource::Grid { grid, prefix } => grid.sum_in(region, prefix),
        }
    }

    fn disc(&self, weight: &RadialWeight) -> f64 {
        self.mass(weight, &Region::Disc)
    }
}

#[derive(Debug, Clone, Copy)]
struct Cand {
    mu: f64,
    om: f64,
}

/// Precomputed maximal function `M_{ω,α}(μ)` for one mode.
pub struct MaximalEngine<'a> {
    measure: &'a DiscMeasure,
    weight: &'a RadialWeight,
    alpha: f64,
    mode: MaximalMode,
    n_max: u32,
    omega: OmegaSource,
    levels: Vec<Vec<Cand>>,
    shifted: Vec<Vec<Cand>>,
    roots: Vec<(Square, Cand)>,
    anchored: Vec<(Square, Cand)>,
    vertices: Vec<Vec<Cand>>,
    atom_vertices: Vec<(DiscPoint, Cand)>,
    global: Cand,
    skipped: AtomicUsize,
}

fn square_over(level: u32, k: u64, shift: bool) -> Square {
    let arc = dyadic_arc(level, k);
    let arc = if shift { Arc::half_open(arc.start() + 0.5 * arc.len(), arc.len()) } else { arc };
    Square::over(arc).expect("dyadic arcs are shorter than one")
}

impl<'a> MaximalEngine<'a> {
    pub fn new(
        measure: &'a DiscMeasure,
        weight: &'a RadialWeight,
        alpha: f64,
        mode: MaximalMode,
        n_max: u32,
        omega: OmegaSource,
    ) -> Result<Self> {
        if !(alpha > 0.0) {
            return validation(format!("maximal exponent {alpha} must be positive"));
        }
        if n_max > 20 {
            return validation("dyadic depth above 20 is not supported");
        }
        if let MaximalMode::Kernel { lambda } = mode {
            if !(lambda > 0.0) {
                return validation("kernel exponent must be positive");
            }
        }
        let mut e = MaximalEngine {
            measure,
            weight,
            alpha,
            mode,
            n_max,
            omega,
            levels: Vec::new(),
            shifted: Vec::new(),
            roots: Vec::new(),
            anchored: Vec::new(),
            vertices: Vec::new(),
            atom_vertices: Vec::new(),
            global: Cand { mu: 0.0, om: 0.0 },
            skipped: AtomicUsize::new(0),
        };
        e.build();
        Ok(e)
    }

    fn cand(&self, region: &Region) -> Cand {
        Cand { mu: self.measure.mass(region), om: self.omega.mass(self.weight, region) }
    }

    fn square_level(&self, n: u32, shift: bool) -> Vec<Cand> {
        (0..dyadic_count(n))
            .into_par_iter()
            .map(|k| self.cand(&Region::Square(square_over(n, k, shift))))
            .collect()
    }

    fn build(&mut self) {
        let levels = 0..=self.n_max;
        match self.mode {
            MaximalMode::Standard => {
                self.levels = levels.clone().map(|n| self.square_level(n, false)).collect();
                self.shifted = levels.map(|n| self.square_level(n, true)).collect();
                self.roots = (0..ROOT_SQUARES)
                    .map(|j| {
                        let sq = Square::over(Arc::closed(TAU * j as f64 / ROOT_SQUARES as f64, 1.0)).unwrap();
                        (sq, self.cand(&Region::Square(sq)))
                    })
                    .collect();
                self.anchored = self
                    .measure
                    .atoms()
                    .par_iter()
                    .filter(|a| !a.point.is_origin())
                    .map(|a| {
                        let sq = Square::at(&a.point).unwrap();
                        (sq, self.cand(&Region::Square(sq)))
                    })
                    .collect();
            }
            MaximalMode::DyadicSquare => {
                self.levels = levels.map(|n| self.square_level(n, false)).collect();
            }
            MaximalMode::DyadicTent => {
                self.levels = levels
                    .map(|n| {
                        (0..dyadic_count(n))
                            .into_par_iter()
                            .map(|k| self.cand(&Region::tent(dyadic_vertex(n, k))))
                            .collect()
                    })
                    .collect();
                self.global = Cand { mu: self.measure.total(), om: self.omega.disc(self.weight) };
            }
            MaximalMode::Kernel { lambda } => {
                self.vertices = levels
                    .map(|n| {
                        (0..dyadic_count(n))
                            .into_par_iter()
                            .map(|k| self.kernel_cand(&dyadic_vertex(n, k), lambda))
                            .collect()
                    })
                    .collect();
                self.atom_vertices = self
                    .measure
                    .atoms()
                    .iter()
                    .filter(|a| !a.point.is_origin())
                    .map(|a| (a.point, self.kernel_cand(&a.point, lambda)))
                    .collect();
            }
            MaximalMode::ConeSquare => {
                self.vertices = levels
                    .map(|n| {
                        (0..dyadic_count(n))
                            .into_par_iter()
                            .map(|k| self.cand(&Region::square_at(&dyadic_vertex(n, k)).unwrap()))
                            .collect()
                    })
                    .collect();
                self.atom_vertices = self
                    .measure
                    .atoms()
                    .iter()
                    .filter(|a| !a.point.is_origin())
                    .map(|a| (a.point, self.cand(&Region::square_at(&a.point).unwrap())))
                    .collect();
            }
        }
    }

    fn kernel_cand(&self, a: &DiscPoint, lambda: f64) -> Cand {
        let om = self.omega.mass(self.weight, &Region::square_at(a).unwrap());
        let n = self.measure.support_len();
        let mu = (0..n)
            .map(|i| {
                let z = self.measure.support_point(i);
                let k = (1.0 - a.modulus()) / (num_complex::Complex64::new(1.0, 0.0) - a.z().conj() * z.z()).norm();
                k.powf(lambda) * self.measure.support_mass(i)
            })
            .sum();
        Cand { mu, om }
    }

    fn ratio(&self, c: &Cand) -> Option<f64> {
        if c.om > 0.0 {
            Some(if c.mu == 0.0 { 0.0 } else { c.mu / c.om.powf(self.alpha) })
        } else {
            if c.mu > 0.0 {
                self.skipped.fetch_add(1, Ordering::Relaxed);
            }
            None
        }
    }

    /// Number of candidates skipped because `ω(R) = 0`.
    pub fn skipped(&self) -> usize {
        self.skipped.load(Ordering::Relaxed)
    }

    pub fn mode(&self) -> MaximalMode {
        self.mode
    }

    /// The maximal function at `z`.
    pub fn value(&self, z: &DiscPoint) -> f64 {
        let mut best: f64 = 0.0;
        let mut take = |c: &Cand| {
            if let Some(v) = self.ratio(c) {
                best = best.max(v);
            }
        };
        let theta = z.arg().rem_euclid(TAU);
        match self.mode {
            MaximalMode::Standard | MaximalMode::DyadicSquare => {
                for n in 0..=self.n_max {
                    let len = PI / (1u64 << (n + 2)) as f64;
                    let count = dyadic_count(n);
                    let k0 = (theta / len).floor() as i64;
                    for dk in -1..=1 {
                        let k = (k0 + dk).rem_euclid(count as i64) as u64;
                        if square_over(n, k, false).contains(z) {
                            take(&self.levels[n as usize][k as usize]);
                        }
                        if self.mode == MaximalMode::Standard && square_over(n, k, true).contains(z) {
                            take(&self.shifted[n as usize][k as usize]);
                        }
                    }
                }
                if self.mode == MaximalMode::Standard {
                    for (sq, c) in self.roots.iter().chain(self.anchored.iter()) {
                        if sq.contains(z) {
                            take(c);
                        }
                    }
                    if !z.is_origin() {
                        let own = Region::square_at(z).unwrap();
                        take(&self.cand(&own));
                    }
                }
            }
            MaximalMode::DyadicTent => {
                for n in 0..=self.n_max {
                    let len = PI / (1u64 << (n + 2)) as f64;
                    let count = dyadic_count(n);
                    let k0 = (theta / len).floor() as i64;
                    for dk in -1..=1 {
                        let k = (k0 + dk).rem_euclid(count as i64) as u64;
                        if Region::tent(dyadic_vertex(n, k)).contains(z) {
                            take(&self.levels[n as usize][k as usize]);
                        }
                    }
                }
                take(&self.global);
            }
            MaximalMode::Kernel { .. } | MaximalMode::ConeSquare => {
                if z.is_origin() {
                    return 0.0;
                }
                let lens = Region::lens(*z).unwrap();
                for n in 0..=self.n_max {
                    let len = PI / (1u64 << (n + 2)) as f64;
                    let count = dyadic_count(n);
                    let k0 = (theta / len).floor() as i64;
                    for dk in -1..=1 {
                        let k = (k0 + dk).rem_euclid(count as i64) as u64;
                        if lens.contains(&dyadic_vertex(n, k)) {
                            take(&self.vertices[n as usize][k as usize]);
                        }
                    }
                }
                for (a, c) in &self.atom_vertices {
                    if lens.contains(a) {
                        take(c);
                    }
                }
            }
        }
        best
    }

    /// Values at many points, in parallel.
    pub fn values(&self, points: &[DiscPoint]) -> Vec<f64> {
        points.par_iter().map(|z| self.value(z)).collect()
    }

    /// Sup over all members of the cached family, which bounds `‖M‖_∞` over the family.
    pub fn family_sup(&self) -> f64 {
        let mut best: f64 = 0.0;
        for c in self.levels.iter().chain(self.shifted.iter()).chain(self.vertices.iter()).flatten() {
            if let Some(v) = self.ratio(c) {
                best = best.max(v);
            }
        }
        for (_, c) in self.roots.iter().chain(self.anchored.iter()) {
            if let Some(v) = self.ratio(c) {
                best = best.max(v);
            }
        }
        for (_, c) in &self.atom_vertices {
            if let Some(v) = self.ratio(c) {
                best = best.max(v);
            }
        }
        if let Some(v) = self.ratio(&self.global) {
            best = best.max(v);
        }
        best
    }
}

/// `M_{ω,α}(μ)(z)` for a single point.
pub fn maximal_function(
    measure: &DiscMeasure,
    weight: &RadialWeight,
    alpha: f64,
    z: &DiscPoint,
    mode: MaximalMode,
    n_max: u32,
) -> Result<f64> {
    Ok(MaximalEngine::new(measure, weight, alpha, mode, n_max, OmegaSource::Analytic)?.value(z))
}

/// Maximal operator `[M_ω(φ^{1/α})]^α` of a non-negative grid function.
pub struct MaximalOperator {
    grid: Shared<PolarGrid>,
    weight: RadialWeight,
    alpha: f64,
    n_max: u32,
    omega: OmegaSource,
}

impl MaximalOperator {
    pub fn new(grid: Shared<PolarGrid>, weight: &RadialWeight, alpha: f64, n_max: u32) -> Result<Self> {
        if !(alpha > 0.0) {
            return validation("maximal exponent must be positive");
        }
        let omega = OmegaSource::grid(grid.clone(), weight);
        Ok(MaximalOperator { grid, weight: weight.clone(), alpha, n_max, omega })
    }

    fn engine_measure(&self, phi: &[f64]) -> Result<DiscMeasure> {
        if phi.len() != self.grid.len() {
            return validation("sampled function does not match the grid");
        }
        if let Some(v) = phi.iter().find(|v| !(**v >= 0.0)) {
            return validation(format!("maximal operator needs a non-negative function, found {v}"));
        }
        let psi: Vec<f64> = phi.iter().map(|v| v.powf(1.0 / self.alpha)).collect();
        DiscMeasure::weighted_density(self.grid.clone(), &psi, &self.weight)
    }

    /// The image evaluated at arbitrary points.
    pub fn image_at(&self, phi: &[f64], points: &[DiscPoint]) -> Result<Vec<f64>> {
        let mu = self.engine_measure(phi)?;
        let e = MaximalEngine::new(&mu, &self.weight, 1.0, MaximalMode::Standard, self.n_max, self.omega.clone())?;
        Ok(e.values(points).into_iter().map(|v| v.powf(self.alpha)).collect())
    }

    /// The image on the grid cells.
    pub fn image(&self, phi: &[f64]) -> Result<Vec<f64>> {
        let pts = self.grid.points().to_vec();
        self.image_at(phi, &pts)
    }

    pub fn grid(&self) -> &Shared<PolarGrid> {
        &self.grid
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn p(r: f64, t: f64) -> DiscPoint {
        DiscPoint::from_polar(r, t).unwrap()
    }

    #[test]
    fn zero_measure() {
        let w = RadialWeight::standard(0.0).unwrap();
        let mu = DiscMeasure::zero();
        for mode in [MaximalMode::Standard, MaximalMode::DyadicSquare, MaximalMode::DyadicTent] {
            assert_eq!(maximal_function(&mu, &w, 1.0, &p(0.7, 1.0), mode, 6).unwrap(), 0.0);
        }
    }

    #[test]
    fn single_atom_standard_mode() {
        let w = RadialWeight::standard(0.0).unwrap();
        let z0 = p(0.9, 0.4);
        let mu = DiscMeasure::from_points(vec![(z0, 1.0)]).unwrap();
        let e = MaximalEngine::new(&mu, &w, 1.0, MaximalMode::Standard, 8, OmegaSource::Analytic).unwrap();
        let oracle = TAU / (0.1 * 0.1 * 1.9);
        assert!((e.value(&z0) / oracle - 1.0).abs() < 1e-7);
        assert!((oracle - 330.69).abs() < 0.01);
        let far = p(0.95, 0.4 + PI);
        let v = e.value(&far);
        assert!(v < e.value(&z0));
        let min_square = w.region_mass(&Region::square_at(&p(0.5, 0.0)).unwrap()).unwrap().min(
            w.square_mass(&p(1.0 - PI / (1u64 << 10) as f64, 0.0)).unwrap(),
        );
        assert!(v <= mu.total() / min_square);
    }

    #[test]
    fn operator_on_constants_and_indicators() {
        let w = RadialWeight::standard(0.0).unwrap();
        let grid = Shared::new(PolarGrid::new(GridSpec::default()).unwrap());
        let op = MaximalOperator::new(grid.clone(), &w, 1.0, 6).unwrap();
        let ones = vec![1.0; grid.len()];
        let img = op.image(&ones).unwrap();
        assert!(img.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let zeros = vec![0.0; grid.len()];
        assert!(op.image(&zeros).unwrap().iter().all(|v| *v == 0.0));
        let s = Region::square_at(&p(0.8, 0.0)).unwrap();
        let chi: Vec<f64> = grid.points().iter().map(|z| s.contains(z) as u8 as f64).collect();
        let vals = op.image_at(&chi, &[p(0.8, 0.0), p(0.3, PI)]).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert_eq!(vals[1], 0.0);
        let neg: Vec<f64> = vec![-1.0; grid.len()];
        assert!(op.image(&neg).is_err());
    }
}
