//! Points, arcs and regions of the unit disc with exact membership predicates.

use crate::error::{domain, validation, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// Default lens aperture.
pub const DEFAULT_APERTURE: f64 = 0.5;

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x % TAU;
    if y > PI {
        y -= TAU;
    } else if y <= -PI {
        y += TAU;
    }
    y
}

/// A point of the open unit disc with cached polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscPoint {
    z: Complex64,
    r: f64,
    theta: f64,
}

impl DiscPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        let r = z.norm();
        if !(r < 1.0) || !r.is_finite() {
            return domain(format!("point {z} is not in the unit disc"));
        }
        let theta = if r == 0.0 { 0.0 } else { wrap_angle(z.arg()) };
        Ok(DiscPoint { z, r, theta })
    }

    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return domain(format!("radius {r} is not in [0, 1)"));
        }
        Ok(Self::polar(r, theta))
    }

    pub fn origin() -> Self {
        DiscPoint { z: Complex64::new(0.0, 0.0), r: 0.0, theta: 0.0 }
    }

    pub(crate) fn polar(r: f64, theta: f64) -> Self {
        let theta = wrap_angle(theta);
        DiscPoint { z: Complex64::from_polar(r, theta), r, theta }
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn modulus(&self) -> f64 {
        self.r
    }

    pub fn arg(&self) -> f64 {
        self.theta
    }

    pub fn is_origin(&self) -> bool {
        self.r == 0.0
    }

    /// The point `t·z` for `t ∈ [0, 1/|z|)`.
    pub fn scaled(&self, t: f64) -> Self {
        DiscPoint::polar(self.r * t, self.theta)
    }
}

/// Pseudohyperbolic distance `|(a − b)/(1 − āb)|`.
pub fn pseudo_distance(a: &DiscPoint, b: &DiscPoint) -> f64 {
    let num = (a.z - b.z).norm();
    if num == 0.0 {
        return 0.0;
    }
    let den = (Complex64::new(1.0, 0.0) - a.z.conj() * b.z).norm();
    (num / den).min(1.0 - f64::EPSILON)
}

/// Endpoint convention of an arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArcKind {
    /// `[start, start + len)`.
    HalfOpen,
    /// Closed arc, tested as `|θ − centre| ≤ half`.
    Closed,
    /// Open arc, tested as `|θ − centre| < half`.
    Open,
}

/// An arc of the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arc {
    start: f64,
    len: f64,
    kind: ArcKind,
}

impl Arc {
    /// `[start, start + len)`.
    pub fn half_open(start: f64, len: f64) -> Self {
        Arc { start, len: len.min(TAU), kind: ArcKind::HalfOpen }
    }

    pub fn closed(center: f64, len: f64) -> Self {
        let len = len.min(TAU);
        Arc { start: center - 0.5 * len, len, kind: ArcKind::Closed }
    }

    pub fn open(center: f64, len: f64) -> Self {
        let len = len.min(TAU);
        Arc { start: center - 0.5 * len, len, kind: ArcKind::Open }
    }

    /// The arc `[θ₀, θ₁)` with `θ₀ < θ₁ ≤ θ₀ + 2π`.
    pub fn between(theta0: f64, theta1: f64) -> Result<Self> {
        if !(theta1 > theta0) || theta1 - theta0 > TAU + 1e-12 {
            return validation(format!("invalid arc [{theta0}, {theta1})"));
        }
        Ok(Arc::half_open(theta0, theta1 - theta0))
    }

    pub fn full() -> Self {
        Arc { start: -PI, len: TAU, kind: ArcKind::Closed }
    }

    pub fn center(&self) -> f64 {
        wrap_angle(self.start + 0.5 * self.len)
    }

    pub fn len(&self) -> f64 {
        self.len
    }

    pub fn half(&self) -> f64 {
        0.5 * self.len
    }

    pub fn kind(&self) -> ArcKind {
        self.kind
    }

    /// Start angle as given at construction.
    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn is_full(&self) -> bool {
        self.kind == ArcKind::Closed && self.len >= TAU
    }

    pub fn contains_angle(&self, theta: f64) -> bool {
        match self.kind {
            ArcKind::HalfOpen => (theta - self.start).rem_euclid(TAU) < self.len,
            ArcKind::Closed => wrap_angle(theta - (self.start + 0.5 * self.len)).abs() <= 0.5 * self.len,
            ArcKind::Open => wrap_angle(theta - (self.start + 0.5 * self.len)).abs() < 0.5 * self.len,
        }
    }

    /// Concentric arc with length multiplied by `c`, capped at the full circle.
    pub fn dilate(&self, c: f64) -> Self {
        let len = self.len * c;
        if len >= TAU {
            return Arc::full();
        }
        let center = self.start + 0.5 * self.len;
        Arc { start: center - 0.5 * len, len, kind: self.kind }
    }

    /// Whether `other ⊂ self` as point sets, up to endpoint conventions.
    pub fn contains_arc(&self, other: &Arc) -> bool {
        if self.is_full() {
            return true;
        }
        let d = wrap_angle(other.center() - self.center()).abs();
        d + other.half() <= self.half() * (1.0 + 1e-12)
    }
}

fn lens_predicate(vertex: &DiscPoint, aperture: f64, z: &DiscPoint) -> bool {
    if z.is_origin() {
        return true;
    }
    wrap_angle(z.theta - vertex.theta).abs() < aperture * (1.0 - z.r / vertex.r)
}

/// Vertex `a_I = (1 − |I|)·midpoint`, so that `S(a_I) = S(I)`.
pub fn carleson_vertex(arc: &Arc) -> DiscPoint {
    DiscPoint::polar((1.0 - arc.len()).max(0.0), arc.center())
}

/// Number of arcs `I_{n,k}` at level `n`; they have length `π/2^{n+2}` and tile the circle.
pub fn dyadic_count(level: u32) -> u64 {
    1u64 << (level + 3)
}

/// The arc `I_{n,k}` of the tent family `Υ`.
pub fn dyadic_arc(level: u32, index: u64) -> Arc {
    let len = PI / (1u64 << (level + 2)) as f64;
    Arc::half_open(index as f64 * len, len)
}

/// Vertex `z = (1 − 2|I|/π)·midpoint` of the `Υ` tent over `I_{n,k}`.
pub fn dyadic_vertex(level: u32, index: u64) -> DiscPoint {
    let arc = dyadic_arc(level, index);
    DiscPoint::polar(1.0 - 2.0 * arc.len() / PI, arc.center())
}

/// One member of the dyadic tent family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicCell {
    pub level: u32,
    pub index: u64,
    pub arc: Arc,
    pub vertex: DiscPoint,
}

/// All tents of `Υ` up to level `n_max`.
pub fn dyadic_tents(n_max: u32) -> Vec<DyadicCell> {
    let mut out = Vec::new();
    for n in 0..=n_max {
        for k in 0..dyadic_count(n) {
            out.push(DyadicCell { level: n, index: k, arc: dyadic_arc(n, k), vertex: dyadic_vertex(n, k) });
        }
    }
    out
}

/// Exact test of `T_α(inner) ⊂ T_α(outer)`.
pub fn tent_nested(inner: &DiscPoint, outer: &DiscPoint, aperture: f64) -> bool {
    if outer.is_origin() {
        return true;
    }
    if inner.r < outer.r {
        return false;
    }
    wrap_angle(inner.theta - outer.theta).abs() <= aperture * (inner.r - outer.r)
}

/// A Carleson square `{z : |z| ≥ r_min, arg z ∈ arc}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Square {
    pub arc: Arc,
    pub r_min: f64,
}

impl Square {
    /// `S(a)`, with the closed centred arc of length `1 − |a|`.
    pub fn at(a: &DiscPoint) -> Result<Self> {
        if a.is_origin() {
            return domain("S(a) is undefined at a = 0");
        }
        Ok(Square { arc: Arc::closed(a.theta, 1.0 - a.r), r_min: a.r })
    }

    /// `S(I)` for an arc with `|I| ≤ 1`.
    pub fn over(arc: Arc) -> Result<Self> {
        if arc.len() > 1.0 + 1e-12 {
            return validation(format!("S(I) needs |I| <= 1, got {}", arc.len()));
        }
        Ok(Square { arc, r_min: (1.0 - arc.len()).max(0.0) })
    }

    pub fn contains(&self, z: &DiscPoint) -> bool {
        if z.is_origin() {
            return self.r_min <= 0.0;
        }
        z.r >= self.r_min && self.arc.contains_angle(z.theta)
    }
}

/// Angular section of a region on a circle `|z| = s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slice {
    Empty,
    Full,
    Interval(Arc),
}

impl Slice {
    pub fn contains_angle(&self, theta: f64) -> bool {
        match self {
            Slice::Empty => false,
            Slice::Full => true,
            Slice::Interval(a) => a.contains_angle(theta),
        }
    }
}

/// Regions of the disc used throughout the library.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Square(Square),
    Tent { vertex: DiscPoint, aperture: f64 },
    Lens { vertex: DiscPoint, aperture: f64 },
    TruncatedLens { vertex: DiscPoint, aperture: f64, h: f64 },
    PseudoDisc { center: DiscPoint, radius: f64 },
    DyadicTent { level: u32, index: u64 },
    /// `T(I)`: the tent over `a_I` when `|I| < 1`, the open sector over `I` with the origin otherwise.
    ArcTent(Arc),
    /// Radial sector `U(I)` over an arc.
    Arc(Arc),
    Disc,
}

impl Region {
    pub fn square_at(a: &DiscPoint) -> Result<Self> {
        Ok(Region::Square(Square::at(a)?))
    }

    pub fn tent(vertex: DiscPoint) -> Self {
        Region::Tent { vertex, aperture: DEFAULT_APERTURE }
    }

    pub fn lens(vertex: DiscPoint) -> Result<Self> {
        Region::lens_with(vertex, DEFAULT_APERTURE)
    }

    pub fn lens_with(vertex: DiscPoint, aperture: f64) -> Result<Self> {
        if vertex.is_origin() {
            return domain("lens at the origin");
        }
        check_aperture(aperture)?;
        Ok(Region::Lens { vertex, aperture })
    }

    pub fn truncated(vertex: DiscPoint, aperture: f64, h: f64) -> Result<Self> {
        if vertex.is_origin() {
            return domain("lens at the origin");
        }
        check_aperture(aperture)?;
        if !(h >= 0.0) {
            return validation(format!("truncation h = {h} must be in [0, ∞]"));
        }
        Ok(Region::TruncatedLens { vertex, aperture, h })
    }

    pub fn pseudo_disc(center: DiscPoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < 1.0) {
            return validation(format!("pseudohyperbolic radius {radius} not in (0, 1)"));
        }
        Ok(Region::PseudoDisc { center, radius })
    }

    pub fn dyadic_tent(level: u32, index: u64) -> Result<Self> {
        if level > 60 || index >= dyadic_count(level) {
            return validation(format!("dyadic index ({level}, {index}) out of range"));
        }
        Ok(Region::DyadicTent { level, index })
    }

    /// Whether `z` lies in the region.
    pub fn contains(&self, z: &DiscPoint) -> bool {
        match self {
            Region::Square(s) => s.contains(z),
            Region::Tent { vertex, aperture } => tent_contains(vertex, *aperture, z),
            Region::Lens { vertex, aperture } => lens_predicate(vertex, *aperture, z),
            Region::TruncatedLens { vertex, aperture, h } => {
                if h.is_infinite() {
                    lens_predicate(vertex, *aperture, z)
                } else {
                    lens_predicate(vertex, *aperture, z) && z.r > vertex.r / (1.0 + h)
                }
            }
            Region::PseudoDisc { center, radius } => pseudo_distance(center, z) < *radius,
            Region::DyadicTent { level, index } => {
                tent_contains(&dyadic_vertex(*level, *index), DEFAULT_APERTURE, z)
            }
            Region::ArcTent(arc) => {
                if arc.len() < 1.0 {
                    tent_contains(&carleson_vertex(arc), DEFAULT_APERTURE, z)
                } else if z.is_origin() || arc.is_full() {
                    true
                } else {
                    Arc::open(arc.center(), arc.len()).contains_angle(z.theta)
                }
            }
            Region::Arc(arc) => !z.is_origin() && arc.contains_angle(z.theta),
            Region::Disc => true,
        }
    }

    /// Angular section at radius `s > 0`.
    pub fn slice_at(&self, s: f64) -> Slice {
        match self {
            Region::Square(sq) => {
                if s >= sq.r_min {
                    interval(sq.arc)
                } else {
                    Slice::Empty
                }
            }
            Region::Tent { vertex, aperture } => tent_slice(vertex, *aperture, s),
            Region::Lens { vertex, aperture } => lens_slice(vertex, *aperture, s),
            Region::TruncatedLens { vertex, aperture, h } => {
                if h.is_infinite() || s > vertex.r / (1.0 + h) {
                    lens_slice(vertex, *aperture, s)
                } else {
                    Slice::Empty
                }
            }
            Region::PseudoDisc { center, radius } => pseudo_disc_slice(center, *radius, s),
            Region::DyadicTent { level, index } => {
                tent_slice(&dyadic_vertex(*level, *index), DEFAULT_APERTURE, s)
            }
            Region::ArcTent(arc) => {
                if arc.len() < 1.0 {
                    tent_slice(&carleson_vertex(arc), DEFAULT_APERTURE, s)
                } else if arc.is_full() {
                    Slice::Full
                } else {
                    Slice::Interval(Arc::open(arc.center(), arc.len()))
                }
            }
            Region::Arc(arc) => interval(*arc),
            Region::Disc => Slice::Full,
        }
    }
}

fn check_aperture(aperture: f64) -> Result<()> {
    if aperture > 0.0 && aperture < PI {
        Ok(())
    } else {
        validation(format!("aperture {aperture} not in (0, π)"))
    }
}

fn interval(arc: Arc) -> Slice {
    if arc.is_full() {
        Slice::Full
    } else {
        Slice::Interval(arc)
    }
}

fn tent_contains(vertex: &DiscPoint, aperture: f64, zeta: &DiscPoint) -> bool {
    if zeta.is_origin() {
        return false;
    }
    lens_predicate(zeta, aperture, vertex)
}

fn tent_slice(vertex: &DiscPoint, aperture: f64, s: f64) -> Slice {
    if vertex.is_origin() {
        return Slice::Full;
    }
    if s <= vertex.r {
        return Slice::Empty;
    }
    Slice::Interval(Arc::open(vertex.theta, 2.0 * aperture * (1.0 - vertex.r / s)))
}

fn lens_slice(vertex: &DiscPoint, aperture: f64, s: f64) -> Slice {
    if s >= vertex.r {
        return Slice::Empty;
    }
    Slice::Interval(Arc::open(vertex.theta, 2.0 * aperture * (1.0 - s / vertex.r)))
}

fn pseudo_disc_slice(c: &DiscPoint, rho: f64, s: f64) -> Slice {
    let den = 1.0 - rho * rho * c.r * c.r;
    let big_c = c.r * (1.0 - rho * rho) / den;
    let big_r = rho * (1.0 - c.r * c.r) / den;
    if big_c == 0.0 {
        return if s < big_r { Slice::Full } else { Slice::Empty };
    }
    let one_minus_c = (1.0 - c.r) * (1.0 + rho * rho * c.r) / den;
    let d = one_minus_c - (1.0 - s);
    let gap = (big_r - d) * (big_r + d) / (2.0 * s * big_c);
    if gap > 2.0 {
        Slice::Full
    } else if gap <= 0.0 {
        Slice::Empty
    } else {
        Slice::Interval(Arc::open(c.theta, 4.0 * (0.5 * gap).sqrt().asin()))
    }
}

/// Whitney covering of a finite union of open arcs.
///
/// Arcs shorter than `min_len` are not subdivided further; the uncovered remainders next to
/// the component endpoints are emitted as arcs of their own so the union is exact.
pub fn whitney_cover(open: &[Arc], min_len: f64) -> Vec<Arc> {
    let comps = match union_components(open) {
        Components::Empty => return Vec::new(),
        Components::Full => return vec![Arc::full()],
        Components::Some(c) => c,
    };
    let mut out = Vec::new();
    for (a, b) in comps {
        let mut found = Vec::new();
        whitney_visit(a, b, 0, (a / TAU).floor() as i64, min_len, &mut found);
        let hi = (b / TAU).floor() as i64;
        for j in ((a / TAU).floor() as i64 + 1)..=hi {
            whitney_visit(a, b, 0, j, min_len, &mut found);
        }
        found.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut cursor = a;
        let mut open_left = true;
        for (l, r) in found {
            if l > cursor + GAP_EPS {
                out.push(gap_arc(cursor, l, open_left));
            }
            out.push(Arc::half_open(l, r - l));
            cursor = r;
            open_left = false;
        }
        if b > cursor + GAP_EPS {
            out.push(gap_arc(cursor, b, open_left));
        }
    }
    out
}

const GAP_EPS: f64 = 1e-13;

fn gap_arc(l: f64, r: f64, open_left: bool) -> Arc {
    if open_left {
        Arc::open(0.5 * (l + r), r - l)
    } else {
        Arc::half_open(l, r - l)
    }
}

fn whitney_visit(a: f64, b: f64, m: u32, j: i64, min_len: f64, out: &mut Vec<(f64, f64)>) {
    let len = TAU / (1u64 << m) as f64;
    let l = j as f64 * len;
    let r = l + len;
    if r <= a || l >= b {
        return;
    }
    if len <= (l - a).min(b - r) {
        out.push((l, r));
        return;
    }
    if len < min_len || m >= 52 {
        return;
    }
    whitney_visit(a, b, m + 1, 2 * j, min_len, out);
    whitney_visit(a, b, m + 1, 2 * j + 1, min_len, out);
}

enum Components {
    Empty,
    Full,
    Some(Vec<(f64, f64)>),
}

fn union_components(open: &[Arc]) -> Components {
    let mut iv: Vec<(f64, f64)> = Vec::new();
    for arc in open {
        if arc.len <= 0.0 {
            continue;
        }
        if arc.len() >= TAU {
            return Components::Full;
        }
        let s = arc.start().rem_euclid(TAU);
        iv.push((s, s + arc.len()));
    }
    if iv.is_empty() {
        return Components::Empty;
    }
    iv.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (l, r) in iv {
        match merged.last_mut() {
            Some(last) if l < last.1 => last.1 = last.1.max(r),
            _ => merged.push((l, r)),
        }
    }
    if merged.len() > 1 {
        let first = merged[0];
        let last = *merged.last().unwrap();
        if last.1 > first.0 + TAU {
            merged.pop();
            merged[0] = (last.0, last.1.max(first.1 + TAU));
            while merged.len() > 1 && merged[0].1 > merged[1].0 + TAU {
                let next = merged.remove(1);
                merged[0].1 = merged[0].1.max(next.1 + TAU);
            }
        }
    }
    if merged.len() == 1 && merged[0].1 - merged[0].0 > TAU {
        return Components::Full;
    }
    Components::Some(merged)
}

/// Covering of the full circle by successive bisection toward `ξ`, stopping once the
/// two arcs ending at `ξ` are shorter than `dist`.
pub fn whitney_cover_full(xi: f64, dist: f64) -> Vec<Arc> {
    let mut out = Vec::new();
    let x = xi;
    let mut len = PI / 2.0;
    out.push(Arc::half_open(x + len, len));
    out.push(Arc::half_open(x + 2.0 * len, len));
    while len >= dist && len > 1e-15 {
        len *= 0.5;
        out.push(Arc::half_open(x + len, len));
        out.push(Arc::half_open(x + TAU - 2.0 * len, len));
    }
    out.push(Arc::half_open(x, len));
    out.push(Arc::half_open(x + TAU - len, len));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(r: f64, t: f64) -> DiscPoint {
        DiscPoint::from_polar(r, t).unwrap()
    }

    #[test]
    fn lens_examples() {
        let zeta = p(0.9, 0.3);
        let lens = Region::lens(zeta).unwrap();
        assert!(!lens.contains(&zeta));
        assert!(lens.contains(&zeta.scaled(0.5)));
        let v = dyadic_vertex(2, 0);
        assert!((v.modulus() - 0.875).abs() < 1e-15);
        assert!((v.arg() - 0.0982).abs() < 1e-4);
        assert!(!Region::lens(p(0.9, 0.0)).unwrap().contains(&v));
        assert!(Region::lens(DiscPoint::origin()).is_err());
    }

    #[test]
    fn pseudo_distance_examples() {
        let z = p(0.3, 1.0);
        assert!((pseudo_distance(&DiscPoint::origin(), &z) - 0.3).abs() < 1e-15);
        assert_eq!(pseudo_distance(&p(0.5, 0.0), &p(0.5, 0.0)), 0.0);
        assert!((pseudo_distance(&p(0.5, 0.0), &p(0.5, PI)) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn dyadic_family() {
        let t = dyadic_tents(2);
        assert_eq!(t.len(), 8 + 16 + 32);
        for c in t.iter().filter(|c| c.level == 0) {
            assert!((c.arc.len() - PI / 4.0).abs() < 1e-15);
            assert!((c.vertex.modulus() - 0.5).abs() < 1e-15);
        }
        for c in t.iter().filter(|c| c.level == 2) {
            assert!((c.vertex.modulus() - 0.875).abs() < 1e-15);
        }
    }

    #[test]
    fn tent_nesting_needs_arc_nesting() {
        let cells = dyadic_tents(5);
        for a in &cells {
            for b in &cells {
                if tent_nested(&a.vertex, &b.vertex, DEFAULT_APERTURE) && a.level != b.level {
                    assert!(b.arc.contains_arc(&a.arc));
                }
            }
        }
        let child = dyadic_vertex(3, 0);
        let parent = dyadic_vertex(2, 0);
        assert!(dyadic_arc(2, 0).contains_arc(&dyadic_arc(3, 0)));
        assert!(!tent_nested(&child, &parent, DEFAULT_APERTURE));
    }

    #[test]
    fn square_examples() {
        let a = p(0.9, 0.0);
        let s = Region::square_at(&a).unwrap();
        assert!(s.contains(&a));
        assert!(s.contains(&p(0.95, 0.0499)));
        assert!(!s.contains(&p(0.95, 0.051)));
        assert!(!s.contains(&p(0.89, 0.0)));
        assert!(Region::square_at(&DiscPoint::origin()).is_err());
    }

    #[test]
    fn truncation_limits() {
        let zeta = p(0.8, 1.0);
        let z = p(0.5, 1.05);
        assert!(Region::lens(zeta).unwrap().contains(&z));
        assert!(Region::truncated(zeta, 0.5, f64::INFINITY).unwrap().contains(&z));
        assert!(Region::truncated(zeta, 0.5, f64::INFINITY).unwrap().contains(&DiscPoint::origin()));
        assert!(!Region::truncated(zeta, 0.5, 0.0).unwrap().contains(&z));
        assert!(!Region::truncated(zeta, 0.5, 0.5).unwrap().contains(&z));
        assert!(Region::truncated(zeta, 0.5, 0.7).unwrap().contains(&z));
    }

    #[test]
    fn pseudo_disc_slices_match_predicate() {
        let c = p(0.6, 2.0);
        let d = Region::pseudo_disc(c, 0.5).unwrap();
        for i in 0..200 {
            let s = 0.005 + i as f64 * 0.00495;
            let sl = d.slice_at(s);
            for j in 0..64 {
                let t = -PI + (j as f64 + 0.37) * TAU / 64.0;
                let z = p(s, t);
                let dist = pseudo_distance(&c, &z);
                if (dist - 0.5).abs() > 1e-9 {
                    assert_eq!(sl.contains_angle(t), d.contains(&z), "s={s} t={t}");
                }
            }
        }
    }

    #[test]
    fn whitney_half_circle() {
        let o = [Arc::open(PI / 2.0, PI)];
        let cover = whitney_cover(&o, 1e-4);
        for (i, a) in cover.iter().enumerate() {
            for b in &cover[i + 1..] {
                for j in 0..400 {
                    let t = a.start() + (j as f64 + 0.5) * a.len() / 400.0;
                    assert!(!b.contains_angle(t), "{a:?} {b:?} {t}");
                }
            }
        }
        for j in 0..20000 {
            let t = -PI + (j as f64 + 0.31) * TAU / 20000.0;
            let inside = t > 0.0 && t < PI;
            let n = cover.iter().filter(|a| a.contains_angle(t)).count();
            assert_eq!(n, inside as usize, "t = {t}");
        }
    }

    #[test]
    fn whitney_full_circle() {
        let cover = whitney_cover_full(0.4, 0.1);
        let min = cover.iter().map(|a| a.len()).fold(f64::INFINITY, f64::min);
        assert!((0.05..0.1).contains(&min));
        for j in 0..5000 {
            let t = -PI + (j as f64 + 0.5) * TAU / 5000.0;
            assert_eq!(cover.iter().filter(|a| a.contains_angle(t)).count(), 1);
        }
        assert!(whitney_cover(&[], 1e-3).is_empty());
    }
}
