//! Polar grid on the disc: inner uniform rings followed by geometric rings toward the boundary.

use crate::error::{validation, Result};
use crate::geometry::{DiscPoint, Region, Slice};
use crate::quadrature::{integrate_breaks, QuadOptions};
use crate::weights::RadialWeight;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    /// Number of geometric steps: the outer radius is `1 − ρ^depth`.
    pub depth: u32,
    /// Geometric ratio `ρ` of `1 − r` between consecutive ring groups.
    pub ratio: f64,
    /// Sub-rings per geometric step.
    pub radial_sub: u32,
    /// Uniform rings inside radius `1 − ρ`.
    pub inner_rings: u32,
    /// Multiplier on the angular resolution.
    pub angular_factor: f64,
    /// Cap on cells per ring (rounded to a power of two).
    pub max_angular: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { depth: 6, ratio: 0.5, radial_sub: 2, inner_rings: 4, angular_factor: 1.0, max_angular: 4096 }
    }
}

impl GridSpec {
    pub fn with_depth(mut self, depth: u32) -> Self {
        self.depth = depth;
        self
    }

    pub fn outer_radius(&self) -> f64 {
        1.0 - self.ratio.powi(self.depth as i32)
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth < 1 || self.depth > 60 {
            return validation(format!("grid depth {} not in 1..=60", self.depth));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return validation(format!("grid ratio {} not in (0, 1)", self.ratio));
        }
        if self.radial_sub == 0 || self.inner_rings == 0 {
            return validation("grid needs at least one sub-ring and one inner ring");
        }
        if !(self.angular_factor > 0.0) || self.max_angular < 4 {
            return validation("grid angular resolution must be positive, max_angular >= 4");
        }
        Ok(())
    }
}

/// One ring of cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ring {
    pub inner: f64,
    pub outer: f64,
    pub center: f64,
    pub n: usize,
    pub offset: usize,
}

impl Ring {
    pub fn dtheta(&self) -> f64 {
        TAU / self.n as f64
    }

    fn angle(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dtheta()
    }
}

/// A polar grid with cell centres and normalized area weights.
#[derive(Debug, Clone)]
pub struct PolarGrid {
    spec: GridSpec,
    rings: Vec<Ring>,
    points: Vec<DiscPoint>,
    area: Vec<f64>,
}

impl PolarGrid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        let mut bounds = vec![0.0];
        let r_in = 1.0 - spec.ratio;
        for i in 1..=spec.inner_rings {
            bounds.push(r_in * i as f64 / spec.inner_rings as f64);
        }
        for g in 1..spec.depth {
            let d0 = spec.ratio.powi(g as i32);
            for s in 1..=spec.radial_sub {
                bounds.push(1.0 - d0 * spec.ratio.powf(s as f64 / spec.radial_sub as f64));
            }
        }
        let cap = spec.max_angular.next_power_of_two().max(4);
        let mut rings = Vec::with_capacity(bounds.len());
        let mut offset = 0;
        for w in bounds.windows(2) {
            let (inner, outer) = (w[0], w[1]);
            let center = 0.5 * (inner + outer);
            let want = spec.angular_factor * TAU * center / (outer - inner);
            let n = (want.ceil().max(4.0) as usize).next_power_of_two().clamp(4, cap);
            rings.push(Ring { inner, outer, center, n, offset });
            offset += n;
        }
        let mut points = Vec::with_capacity(offset);
        let mut area = Vec::with_capacity(offset);
        for ring in &rings {
            let a = ring.dtheta() / TAU * (ring.outer * ring.outer - ring.inner * ring.inner);
            for j in 0..ring.n {
                points.push(DiscPoint::polar(ring.center, ring.angle(j)));
                area.push(a);
            }
        }
        Ok(PolarGrid { spec, rings, points, area })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn rings(&self) -> &[Ring] {
        &self.rings
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn outer_radius(&self) -> f64 {
        self.rings.last().map(|r| r.outer).unwrap_or(0.0)
    }

    pub fn points(&self) -> &[DiscPoint] {
        &self.points
    }

    pub fn point(&self, idx: usize) -> &DiscPoint {
        &self.points[idx]
    }

    /// Normalized area `dA = dx dy/π` of each cell.
    pub fn area_weights(&self) -> &[f64] {
        &self.area
    }

    pub fn ring_of(&self, idx: usize) -> usize {
        self.rings.partition_point(|r| r.offset <= idx) - 1
    }

    /// Exact `∫_cell ω dA` for every cell.
    pub fn omega_weights(&self, w: &RadialWeight) -> Vec<f64> {
        let opts = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-13, max_intervals: 500 };
        let mut out = Vec::with_capacity(self.len());
        for ring in &self.rings {
            let m = integrate_breaks(|s| w.eval(s) * s, &[ring.inner, ring.outer], opts).value;
            let c = ring.dtheta() / PI * m;
            out.extend(std::iter::repeat(c).take(ring.n));
        }
        out
    }

    /// Index of the cell containing `z`, if `|z|` is below the outer radius.
    pub fn locate(&self, z: &DiscPoint) -> Option<usize> {
        let r = z.modulus();
        if r >= self.outer_radius() {
            return None;
        }
        let i = self.rings.partition_point(|ring| ring.outer <= r);
        let ring = &self.rings[i];
        let j = ((z.arg().rem_euclid(TAU)) / ring.dtheta()).floor() as usize;
        Some(ring.offset + j.min(ring.n - 1))
    }

    /// Pushes the global index ranges `[start, end)` of cells of `ring` whose centres lie in `region`.
    pub fn ring_runs(&self, ring_idx: usize, region: &Region, out: &mut Vec<(usize, usize)>) {
        let ring = &self.rings[ring_idx];
        let n = ring.n;
        let base = ring.offset;
        let inside = |j: i64| region.contains(&self.points[base + j.rem_euclid(n as i64) as usize]);
        match region.slice_at(ring.center) {
            Slice::Empty => {}
            Slice::Full => out.push((base, base + n)),
            Slice::Interval(arc) => {
                let d = ring.dtheta();
                let span = arc.len() / d;
                if span + 4.0 >= n as f64 {
                    let mut start: Option<usize> = None;
                    for j in 0..n {
                        match (inside(j as i64), start) {
                            (true, None) => start = Some(j),
                            (false, Some(s)) => {
                                out.push((base + s, base + j));
                                start = None;
                            }
                            _ => {}
                        }
                    }
                    if let Some(s) = start {
                        out.push((base + s, base + n));
                    }
                    return;
                }
                let lo_a = arc.start();
                let mut lo = (lo_a / d - 0.5).floor() as i64 - 1;
                let mut hi = ((lo_a + arc.len()) / d - 0.5).ceil() as i64 + 1;
                while lo <= hi && !inside(lo) {
                    lo += 1;
                }
                while hi >= lo && !inside(hi) {
                    hi -= 1;
                }
                if lo > hi {
                    return;
                }
                let s = lo.rem_euclid(n as i64) as usize;
                let len = (hi - lo + 1) as usize;
                if s + len <= n {
                    out.push((base + s, base + s + len));
                } else {
                    out.push((base + s, base + n));
                    out.push((base, base + s + len - n));
                }
            }
        }
    }

    /// Global index ranges of all cells whose centres lie in `region`.
    pub fn runs(&self, region: &Region) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.rings.len() {
            self.ring_runs(i, region, &mut out);
        }
        out
    }

    pub fn for_each_in<F: FnMut(usize)>(&self, region: &Region, mut f: F) {
        let mut buf = Vec::with_capacity(4);
        for i in 0..self.rings.len() {
            buf.clear();
            self.ring_runs(i, region, &mut buf);
            for &(a, b) in &buf {
                for idx in a..b {
                    f(idx);
                }
            }
        }
    }

    /// Sum of `values` over the cells of `region`.
    pub fn sum_in(&self, region: &Region, values: &CellPrefix) -> f64 {
        let mut buf = Vec::with_capacity(4);
        let mut total = 0.0;
        for i in 0..self.rings.len() {
            buf.clear();
            self.ring_runs(i, region, &mut buf);
            for &(a, b) in &buf {
                total += values.range(i, a, b);
            }
        }
        total
    }

    pub fn prefix(&self, values: &[f64]) -> CellPrefix {
        CellPrefix::new(self, values)
    }
}

/// Per-ring prefix sums of a cell array.
#[derive(Debug, Clone)]
pub struct CellPrefix {
    prefix: Vec<f64>,
}

impl CellPrefix {
    pub fn new(grid: &PolarGrid, values: &[f64]) -> Self {
        assert_eq!(values.len(), grid.len());
        let mut prefix = Vec::with_capacity(values.len() + grid.rings.len());
        for ring in &grid.rings {
            let mut acc = 0.0;
            prefix.push(0.0);
            for v in &values[ring.offset..ring.offset + ring.n] {
                acc += v;
                prefix.push(acc);
            }
        }
        CellPrefix { prefix }
    }

    fn range(&self, ring: usize, a: usize, b: usize) -> f64 {
        let base = ring;
        self.prefix[b + base] - self.prefix[a + base]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DEFAULT_APERTURE;

    #[test]
    fn area_sums_to_outer_radius_squared() {
        let g = PolarGrid::new(GridSpec::default()).unwrap();
        let s: f64 = g.area_weights().iter().sum();
        let rm = g.outer_radius();
        assert!((s - rm * rm).abs() < 1e-13);
        assert!((rm - (1.0 - 0.5f64.powi(6))).abs() < 1e-15);
        assert!(g.points().iter().all(|p| p.modulus() < 1.0));
    }

    #[test]
    fn omega_weights_match_disc_mass() {
        let w = RadialWeight::standard(0.0).unwrap();
        let g = PolarGrid::new(GridSpec::default()).unwrap();
        let s: f64 = g.omega_weights(&w).iter().sum();
        let rm = g.outer_radius();
        assert!((s - rm * rm).abs() < 1e-12);
    }

    #[test]
    fn runs_agree_with_predicate() {
        let g = PolarGrid::new(GridSpec { depth: 5, ..GridSpec::default() }).unwrap();
        let regions = [
            Region::tent(DiscPoint::from_polar(0.6, 3.0).unwrap()),
            Region::Tent { vertex: DiscPoint::from_polar(0.3, -0.1).unwrap(), aperture: 2.5 },
            Region::lens(DiscPoint::from_polar(0.93, -3.1).unwrap()).unwrap(),
            Region::square_at(&DiscPoint::from_polar(0.8, 3.14).unwrap()).unwrap(),
            Region::pseudo_disc(DiscPoint::from_polar(0.7, 1.0).unwrap(), 0.6).unwrap(),
            Region::truncated(DiscPoint::from_polar(0.95, 0.2).unwrap(), DEFAULT_APERTURE, 0.3).unwrap(),
            Region::Disc,
        ];
        for reg in &regions {
            let mut flags = vec![false; g.len()];
            g.for_each_in(reg, |i| {
                assert!(!flags[i]);
                flags[i] = true;
            });
            for (i, p) in g.points().iter().enumerate() {
                assert_eq!(flags[i], reg.contains(p), "{reg:?} cell {i}");
            }
        }
    }

    #[test]
    fn locate_round_trip() {
        let g = PolarGrid::new(GridSpec::default()).unwrap();
        for (i, p) in g.points().iter().enumerate() {
            assert_eq!(g.locate(p), Some(i));
            assert_eq!(g.ring_of(i), g.rings().partition_point(|r| r.offset <= i) - 1);
        }
    }
}
