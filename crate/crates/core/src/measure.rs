//! Positive measures on the disc as point clouds and polar-grid densities.

use crate::error::{validation, Result};
use crate::geometry::{pseudo_distance, DiscPoint, Region, Slice};
use crate::grid::{CellPrefix, PolarGrid};
use crate::quadrature::{integrate_breaks, QuadOptions};
use crate::weights::RadialWeight;
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::sync::Arc;

/// A point mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMass {
    pub point: DiscPoint,
    pub mass: f64,
}

#[derive(Debug, Clone)]
struct Density {
    grid: Arc<PolarGrid>,
    cells: Vec<f64>,
    prefix: CellPrefix,
    radial: Option<Radial>,
}

/// A radial density `φ(|z|) dA` cut off at `cutoff`, integrated exactly over regions by slices.
#[derive(Clone)]
struct Radial {
    phi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    scale: f64,
    cutoff: f64,
}

impl std::fmt::Debug for Radial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Radial").field("scale", &self.scale).field("cutoff", &self.cutoff).finish()
    }
}

impl Radial {
    fn mass(&self, region: &Region) -> f64 {
        let width = |s: f64| match region.slice_at(s) {
            Slice::Empty => 0.0,
            Slice::Full => TAU,
            Slice::Interval(a) => a.len(),
        };
        let mut breaks = vec![0.0];
        let mut k = 1;
        while 1.0 - 0.5f64.powi(k) < self.cutoff {
            breaks.push(1.0 - 0.5f64.powi(k));
            k += 1;
        }
        breaks.extend(region_radii(region).into_iter().filter(|r| *r > 0.0 && *r < self.cutoff));
        breaks.push(self.cutoff);
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let opts = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-10, max_intervals: 4000 };
        self.scale * integrate_breaks(|s| (self.phi)(s) * s * width(s) / PI, &breaks, opts).value
    }
}

/// Radii where the slices of `region` change shape.
fn region_radii(region: &Region) -> Vec<f64> {
    match region {
        Region::Square(sq) => vec![sq.r_min],
        Region::PseudoDisc { center, radius } => {
            let a = center.modulus();
            vec![((a - radius) / (1.0 - radius * a)).max(0.0), (a + radius) / (1.0 + radius * a), a]
        }
        Region::Tent { vertex, .. } | Region::Lens { vertex, .. } | Region::TruncatedLens { vertex, .. } => {
            vec![vertex.modulus()]
        }
        _ => Vec::new(),
    }
}

/// A positive measure: atoms plus an optional density given by cell masses on a grid.
///
/// Support points are indexed with the atoms first, followed by every cell of the density grid.
#[derive(Debug, Clone)]
pub struct DiscMeasure {
    atoms: Vec<PointMass>,
    density: Option<Density>,
    total: f64,
    divergent: bool,
    label: String,
}

impl DiscMeasure {
    pub fn zero() -> Self {
        DiscMeasure { atoms: Vec::new(), density: None, total: 0.0, divergent: false, label: "zero".into() }
    }

    pub fn from_points(points: Vec<(DiscPoint, f64)>) -> Result<Self> {
        let mut atoms = Vec::with_capacity(points.len());
        for (point, mass) in points {
            if !(mass >= 0.0) || !mass.is_finite() {
                return validation(format!("atom mass {mass} must be finite and non-negative"));
            }
            if mass > 0.0 {
                atoms.push(PointMass { point, mass });
            }
        }
        let total = atoms.iter().map(|a| a.mass).sum();
        Ok(DiscMeasure { atoms, density: None, total, divergent: false, label: "points".into() })
    }

    /// Reads atoms from a CSV of `x,y,mass` lines; a non-numeric first line is a header.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path.as_ref())?;
        let mut pts = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != 3 {
                return validation(format!("line {}: expected x,y,mass", line + 1));
            }
            let vals: Vec<std::result::Result<f64, _>> = rec.iter().map(|s| s.parse::<f64>()).collect();
            if vals.iter().any(|v| v.is_err()) {
                if line == 0 {
                    continue;
                }
                return validation(format!("line {}: unparseable number", line + 1));
            }
            let v: Vec<f64> = vals.into_iter().map(|v| v.unwrap()).collect();
            pts.push((DiscPoint::new(Complex64::new(v[0], v[1]))?, v[2]));
        }
        Self::from_points(pts)
    }

    /// A density given by cell masses on `grid`.
    pub fn from_cells(grid: Arc<PolarGrid>, cells: Vec<f64>) -> Result<Self> {
        if cells.len() != grid.len() {
            return validation("cell mass vector does not match the grid");
        }
        if cells.iter().any(|c| !(*c >= 0.0) || !c.is_finite()) {
            return validation("cell masses must be finite and non-negative");
        }
        let prefix = grid.prefix(&cells);
        let total = cells.iter().sum();
        Ok(DiscMeasure {
            atoms: Vec::new(),
            density: Some(Density { grid, cells, prefix, radial: None }),
            total,
            divergent: false,
            label: "density".into(),
        })
    }

    /// `φ ω dA` restricted to the grid, from cell values of `φ`.
    pub fn weighted_density(grid: Arc<PolarGrid>, phi: &[f64], weight: &RadialWeight) -> Result<Self> {
        if phi.len() != grid.len() {
            return validation("sampled function does not match the grid");
        }
        if phi.iter().any(|v| !(*v >= 0.0)) {
            return validation("density values must be non-negative");
        }
        let w = grid.omega_weights(weight);
        let cells = phi.iter().zip(&w).map(|(a, b)| a * b).collect();
        Self::from_cells(grid, cells)
    }

    /// Hyperbolic measure `dA/(1 − |z|²)²` truncated to the grid, with exact cell integrals.
    pub fn hyperbolic(grid: Arc<PolarGrid>) -> Self {
        let mut cells = Vec::with_capacity(grid.len());
        for ring in grid.rings() {
            let m = 1.0 / (1.0 - ring.outer * ring.outer) - 1.0 / (1.0 - ring.inner * ring.inner);
            let c = ring.dtheta() / TAU * m;
            cells.extend(std::iter::repeat(c).take(ring.n));
        }
        let mut out = Self::from_cells(grid, cells).expect("hyperbolic cells are positive");
        out.divergent = true;
        out.label = "hyperbolic".into();
        out
    }

    /// `ω(S(z))(1 − |z|)^{−2} dA` truncated to the grid.
    pub fn counterexample(grid: Arc<PolarGrid>, weight: &RadialWeight) -> Self {
        let opts = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-11, max_intervals: 500 };
        let mut cells = Vec::with_capacity(grid.len());
        for ring in grid.rings() {
            let g = |s: f64| 2.0 * s / PI * weight.m1_interp(s) / (1.0 - s);
            let m = integrate_breaks(g, &[ring.inner, ring.outer], opts).value;
            cells.extend(std::iter::repeat(ring.dtheta() / TAU * m).take(ring.n));
        }
        let cutoff = grid.outer_radius();
        let mut out = Self::from_cells(grid, cells).expect("counterexample cells are positive");
        let w = weight.clone();
        out.density.as_mut().unwrap().radial =
            Some(Radial { phi: Arc::new(move |s| w.m1_interp(s) / (PI * (1.0 - s))), scale: 1.0, cutoff });
        out.divergent = true;
        out.label = format!("counterexample({})", weight.name());
        out
    }

    pub fn from_sequence(seq: &SeparatedSequence, masses: &[f64]) -> Result<Self> {
        if masses.len() != seq.points.len() {
            return validation("mass vector does not match the sequence");
        }
        let mut m = Self::from_points(seq.points.iter().copied().zip(masses.iter().copied()).collect())?;
        m.label = format!("lattice({})", seq.delta);
        Ok(m)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn atoms(&self) -> &[PointMass] {
        &self.atoms
    }

    pub fn density_grid(&self) -> Option<&Arc<PolarGrid>> {
        self.density.as_ref().map(|d| &d.grid)
    }

    pub fn density_cells(&self) -> Option<&[f64]> {
        self.density.as_ref().map(|d| d.cells.as_slice())
    }

    /// Cached total mass of the (truncated) measure.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// Whether the untruncated measure has infinite total mass.
    pub fn is_divergent(&self) -> bool {
        self.divergent
    }

    pub fn is_zero(&self) -> bool {
        self.total == 0.0
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c >= 0.0) {
            return validation("measures can only be scaled by non-negative factors");
        }
        let mut out = self.clone();
        for a in &mut out.atoms {
            a.mass *= c;
        }
        if let Some(d) = &mut out.density {
            for v in &mut d.cells {
                *v *= c;
            }
            d.prefix = d.grid.prefix(&d.cells);
            if let Some(r) = &mut d.radial {
                r.scale *= c;
            }
        }
        out.total *= c;
        Ok(out)
    }

    /// `μ(R)`: atoms in `R` plus density cells whose centres lie in `R`.
    ///
    /// Radial presets integrate their density over the slices of `R` instead, up to the cutoff.
    pub fn mass(&self, region: &Region) -> f64 {
        let mut m: f64 = self.atoms.iter().filter(|a| region.contains(&a.point)).map(|a| a.mass).sum();
        if let Some(d) = &self.density {
            m += match &d.radial {
                Some(r) => r.mass(region),
                None => d.grid.sum_in(region, &d.prefix),
            };
        }
        m
    }

    /// Whether `mass` integrates a rotation-invariant density exactly.
    pub fn is_radial(&self) -> bool {
        self.density.as_ref().is_some_and(|d| d.radial.is_some())
    }

    /// Mass of the atom located exactly at the origin.
    pub fn origin_mass(&self) -> f64 {
        self.atoms.iter().filter(|a| a.point.is_origin()).map(|a| a.mass).sum()
    }

    pub fn support_len(&self) -> usize {
        self.atoms.len() + self.density.as_ref().map_or(0, |d| d.cells.len())
    }

    pub fn support_point(&self, i: usize) -> DiscPoint {
        if i < self.atoms.len() {
            self.atoms[i].point
        } else {
            *self.density.as_ref().unwrap().grid.point(i - self.atoms.len())
        }
    }

    pub fn support_mass(&self, i: usize) -> f64 {
        if i < self.atoms.len() {
            self.atoms[i].mass
        } else {
            self.density.as_ref().unwrap().cells[i - self.atoms.len()]
        }
    }

    pub fn support(&self) -> Vec<PointMass> {
        (0..self.support_len()).map(|i| PointMass { point: self.support_point(i), mass: self.support_mass(i) }).collect()
    }

    /// Calls `f(i)` for every support index whose point lies in `region`.
    pub fn for_each_in<F: FnMut(usize)>(&self, region: &Region, mut f: F) {
        for (i, a) in self.atoms.iter().enumerate() {
            if region.contains(&a.point) {
                f(i);
            }
        }
        if let Some(d) = &self.density {
            let off = self.atoms.len();
            d.grid.for_each_in(region, |c| f(off + c));
        }
    }
}

/// A finite separated sequence of nonzero points.
#[derive(Debug, Clone)]
pub struct SeparatedSequence {
    pub points: Vec<DiscPoint>,
    pub delta: f64,
}

impl SeparatedSequence {
    pub fn new(points: Vec<DiscPoint>) -> Result<Self> {
        if points.iter().any(|p| p.is_origin()) {
            return validation("separated sequences must avoid the origin");
        }
        let delta = separation(&points);
        if points.len() > 1 && !(delta > 0.0) {
            return validation("sequence points must be distinct");
        }
        Ok(SeparatedSequence { points, delta })
    }

    /// Ring-by-ring lattice with consecutive ring radii at pseudohyperbolic distance `d` and
    /// points on each ring at distance at least `d`, randomly rotated, up to radius `r_max`.
    pub fn lattice<R: Rng>(d: f64, r_max: f64, rng: &mut R) -> Result<Self> {
        if !(d > 0.0 && d < 1.0) {
            return validation(format!("lattice spacing {d} not in (0, 1)"));
        }
        if !(r_max > d && r_max < 1.0) {
            return validation(format!("lattice radius {r_max} must lie in ({d}, 1)"));
        }
        let mut points = Vec::new();
        let mut r = d;
        while r <= r_max {
            let n = ring_count(r, d);
            let phase: f64 = rng.gen::<f64>() * TAU;
            for j in 0..n {
                points.push(DiscPoint::polar(r, phase + TAU * j as f64 / n as f64));
            }
            r = (r + d) / (1.0 + d * r);
        }
        Self::new(points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn ring_count(r: f64, d: f64) -> usize {
    let ok = |n: usize| {
        let a = DiscPoint::polar(r, 0.0);
        let b = DiscPoint::polar(r, TAU / n as f64);
        n == 1 || pseudo_distance(&a, &b) >= d
    };
    let (mut lo, mut hi) = (1usize, 2usize);
    while ok(hi) {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Minimum pairwise pseudohyperbolic distance.
pub fn separation(points: &[DiscPoint]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.min(pseudo_distance(a, b));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{dyadic_tents, Region};
    use crate::grid::GridSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(r: f64, t: f64) -> DiscPoint {
        DiscPoint::from_polar(r, t).unwrap()
    }

    #[test]
    fn point_examples() {
        let mu = DiscMeasure::from_points(vec![(p(0.9, 0.0), 1.0)]).unwrap();
        assert_eq!(mu.atoms().len(), 1);
        assert_eq!(mu.mass(&Region::square_at(&p(0.9, 0.0)).unwrap()), 1.0);
        let d = Region::pseudo_disc(p(0.5, 0.0), 0.3).unwrap();
        assert_eq!(mu.mass(&d), 0.0);
        assert!((pseudo_distance(&p(0.9, 0.0), &p(0.5, 0.0)) - 0.4 / 0.55).abs() < 1e-12);
        assert!(DiscMeasure::from_points(vec![(p(0.2, 0.0), -1.0)]).is_err());
        assert_eq!(DiscMeasure::zero().mass(&Region::Disc), 0.0);
    }

    #[test]
    fn hyperbolic_cells_match_integrand() {
        let g = Arc::new(PolarGrid::new(GridSpec::default()).unwrap());
        let h = DiscMeasure::hyperbolic(g.clone());
        let cells = h.density_cells().unwrap();
        for (i, pt) in g.points().iter().enumerate() {
            let r = pt.modulus();
            let approx = g.area_weights()[i] / ((1.0 - r * r) * (1.0 - r * r));
            assert!((cells[i] / approx - 1.0).abs() < 0.1);
        }
        assert!(h.is_divergent());
    }

    #[test]
    fn dyadic_tents_add_up() {
        let g = Arc::new(PolarGrid::new(GridSpec::default()).unwrap());
        let h = DiscMeasure::hyperbolic(g);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let seq = SeparatedSequence::lattice(0.3, 0.95, &mut rng).unwrap();
        let masses: Vec<f64> = (0..seq.len()).map(|_| rng.gen()).collect();
        let mu = DiscMeasure::from_sequence(&seq, &masses).unwrap();
        for m in [&h, &mu] {
            let level: Vec<_> = dyadic_tents(3).into_iter().filter(|c| c.level == 3).collect();
            let parts: f64 = level.iter().map(|c| m.mass(&Region::dyadic_tent(3, c.index).unwrap())).sum();
            let mut flags = vec![0u8; m.support_len()];
            for c in &level {
                m.for_each_in(&Region::dyadic_tent(3, c.index).unwrap(), |i| flags[i] += 1);
            }
            assert!(flags.iter().all(|f| *f <= 1));
            let direct: f64 = (0..m.support_len()).filter(|i| flags[*i] == 1).map(|i| m.support_mass(i)).sum();
            assert!((parts - direct).abs() <= 1e-12 * direct.max(1.0));
        }
    }

    #[test]
    fn lattice_is_separated() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let seq = SeparatedSequence::lattice(0.4, 0.97, &mut rng).unwrap();
        assert!(seq.delta >= 0.4 - 1e-12);
        assert!(seq.points.iter().all(|z| z.modulus() <= 0.97 && !z.is_origin()));
        assert!(seq.len() > 20 && seq.len() < 500);
    }
}
