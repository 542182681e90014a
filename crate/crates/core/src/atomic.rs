//! Atoms, constructive atomic decompositions, factorization and balayage.

use crate::error::{validation, LabError, Result};
use crate::geometry::{whitney_cover, whitney_cover_full, wrap_angle, Arc, DiscPoint, Region, DEFAULT_APERTURE};
use crate::maximal::{MaximalEngine, MaximalMode, MaximalOperator, OmegaSource};
use crate::measure::DiscMeasure;
use crate::tent::TentSpace;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

/// Angular samples used to locate the point of `𝕋` nearest to the complement of a level set.
const XI_SAMPLES: usize = 8192;

/// One atom `a_j` with its coefficient `λ_j`, supported in `T(J)`.
#[derive(Debug, Clone, Serialize)]
pub struct AtomPiece {
    pub level: i32,
    /// Whitney arc `I` whose radial sector selects the points of the piece.
    pub whitney: Arc,
    /// Dilated arc `J`; the atom lives in `T(J)`.
    pub support: Arc,
    pub tent_mass: f64,
    pub lambda: f64,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl AtomPiece {
    pub fn region(&self) -> Region {
        Region::ArcTent(self.support)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub p: f64,
    /// `∞` for `T^p_∞` atoms.
    pub q: f64,
    pub pieces: Vec<AtomPiece>,
    /// Dilation constant found for each level.
    pub dilations: Vec<(i32, f64)>,
    /// `‖f‖_{T^p_q}` of the decomposed function.
    pub source_norm: f64,
    /// `Σ |λ_j|^p`.
    pub lambda_sum: f64,
    /// Normalizing constant for `h` when the atoms come from a factorization.
    pub h_scale: Option<f64>,
}

impl Decomposition {
    /// `Σ λ_j a_j` on the support of `ν`.
    pub fn reconstruct(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for piece in &self.pieces {
            for (i, v) in piece.indices.iter().zip(&piece.values) {
                out[*i] += piece.lambda * v;
            }
        }
        out
    }

    /// `max |f − Σ λ_j a_j| / max |f|`.
    pub fn reconstruction_error(&self, f: &[f64]) -> f64 {
        let r = self.reconstruct(f.len());
        let top = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if top == 0.0 {
            return r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        }
        f.iter().zip(&r).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / top
    }

    /// `Σ |λ_j|^p / ‖f‖^p`; 1 for the empty decomposition of `f = 0`.
    pub fn ratio(&self) -> f64 {
        if self.source_norm == 0.0 {
            return 1.0;
        }
        self.lambda_sum / self.source_norm.powf(self.p)
    }

    /// True when no support point belongs to two pieces.
    pub fn supports_disjoint(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        for piece in &self.pieces {
            for &i in &piece.indices {
                if std::mem::replace(&mut seen[i], true) {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decomposition serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AtomCheck {
    pub valid: bool,
    pub measured: f64,
    pub bound: f64,
}

/// Checks the defining inequality of a `T^p_q` atom (`q = ∞` for `T^p_∞`).
pub fn validate_atom(ts: &TentSpace, piece: &AtomPiece, p: f64, q: f64) -> Result<AtomCheck> {
    let region = piece.region();
    if piece.indices.len() != piece.values.len() {
        return validation("atom values do not match its indices");
    }
    for (&i, v) in piece.indices.iter().zip(&piece.values) {
        if *v != 0.0 && !region.contains(&ts.points()[i]) {
            return validation("atom is not supported in its tent");
        }
    }
    let om = ts.grid_mass(&region);
    if !(om > 0.0) {
        return validation("atom tent carries no weight");
    }
    let (measured, bound) = if q.is_infinite() {
        (piece.values.iter().fold(0.0f64, |m, v| m.max(v.abs())), om.powf(-1.0 / p))
    } else {
        let s: f64 = piece
            .indices
            .iter()
            .zip(&piece.values)
            .map(|(&i, v)| v.abs().powf(q) * ts.tent_masses()[i] * ts.masses()[i])
            .sum();
        (s, om.powf((p - q) / p))
    };
    Ok(AtomCheck { valid: measured <= bound * (1.0 + 1e-12), measured, bound })
}

fn check_space(ts: &TentSpace, f: &[f64], p: f64) -> Result<()> {
    if f.len() != ts.len() {
        return validation("function does not match the support of ν");
    }
    if !(p > 0.0 && p.is_finite()) {
        return validation("atomic decomposition needs 0 < p < ∞");
    }
    if (ts.aperture() - DEFAULT_APERTURE).abs() > 0.0 {
        return validation("atomic decomposition uses the default aperture");
    }
    if ts.measure().origin_mass() > 0.0 {
        return validation("atomic decomposition needs ν({0}) = 0");
    }
    Ok(())
}

/// `2^k < v ≤ 2^{k+1}`.
fn level_of(v: f64) -> i32 {
    let mut k = v.log2().ceil() as i32 - 1;
    while 2f64.powi(k) >= v {
        k -= 1;
    }
    while 2f64.powi(k + 1) < v {
        k += 1;
    }
    k
}

/// Max of `|f|` over the closed lens at each support point, including the point itself.
fn closed_cone_sup(ts: &TentSpace, f: &[f64]) -> Vec<f64> {
    let pts = ts.points();
    let m = ts.masses();
    let al = ts.aperture();
    (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let lens = Region::Lens { vertex: pts[i], aperture: al };
            let mut best = f[i].abs();
            for (j, u) in pts.iter().enumerate() {
                if m[j] > 0.0 && lens.contains(u) {
                    best = best.max(f[j].abs());
                }
            }
            best
        })
        .collect()
}

/// Point `ξ` and `dist(ξ, 𝔻∖O)` for `O = ∪ T(u)` whose projection is the whole circle.
fn nearest_complement(vertices: &[DiscPoint], aperture: f64) -> (f64, f64) {
    let mut best = (0.0, 0.0f64);
    for j in 0..XI_SAMPLES {
        let th = TAU * j as f64 / XI_SAMPLES as f64;
        let mut s_star = 1.0f64;
        for u in vertices {
            let d = wrap_angle(th - u.arg()).abs();
            if d < aperture * (1.0 - u.modulus()) {
                s_star = s_star.min(u.modulus() / (1.0 - d / aperture));
            }
        }
        if s_star > best.1 {
            best = (th, s_star);
        }
    }
    (best.0, 1.0 - best.1)
}

struct Level {
    k: i32,
    c: f64,
    pieces: Vec<AtomPiece>,
}

fn decompose_level(ts: &TentSpace, f: &[f64], p: f64, k: i32, members: &[usize], upper: &[DiscPoint]) -> Result<Level> {
    let al = ts.aperture();
    let arcs: Vec<Arc> = upper.iter().map(|u| Arc::open(u.arg(), 2.0 * al * (1.0 - u.modulus()))).collect();
    let pts = ts.points();
    let min_len = members.iter().map(|&i| al * (1.0 - pts[i].modulus()) / 8.0).fold(f64::INFINITY, f64::min);
    let mut cover = whitney_cover(&arcs, min_len);
    if cover.len() == 1 && cover[0].is_full() {
        let (xi, dist) = nearest_complement(upper, al);
        cover = whitney_cover_full(xi, dist);
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); cover.len()];
    for &i in members {
        let th = pts[i].arg();
        let hits: Vec<usize> = (0..cover.len()).filter(|a| cover[*a].contains_angle(th)).collect();
        if hits.len() != 1 {
            return Err(LabError::Construction(format!(
                "level {k}: support point lies in {} Whitney arcs",
                hits.len()
            )));
        }
        groups[hits[0]].push(i);
    }
    let used: Vec<(Arc, Vec<usize>)> = cover.into_iter().zip(groups).filter(|(_, g)| !g.is_empty()).collect();
    let mut c = 2.0;
    for _ in 0..64 {
        let fits = used.iter().all(|(arc, g)| {
            let t = Region::ArcTent(arc.dilate(c));
            g.iter().all(|&i| t.contains(&pts[i])) && ts.grid_mass(&t) > 0.0
        });
        if fits {
            let scale = 2f64.powf((k + 1) as f64 / p);
            let pieces = used
                .iter()
                .map(|(arc, g)| {
                    let j = arc.dilate(c);
                    let om = ts.grid_mass(&Region::ArcTent(j));
                    let lambda = scale * om.powf(1.0 / p);
                    AtomPiece {
                        level: k,
                        whitney: *arc,
                        support: j,
                        tent_mass: om,
                        lambda,
                        indices: g.clone(),
                        values: g.iter().map(|&i| f[i] / lambda).collect(),
                    }
                })
                .collect();
            return Ok(Level { k, c, pieces });
        }
        c *= 2.0;
    }
    Err(LabError::Construction(format!("level {k}: no admissible dilation found")))
}

/// Decomposition of `f ∈ T^p_∞(ν,ω)` into `T^p_∞` atoms with disjoint supports.
pub fn decompose_tp_infty(ts: &TentSpace, f: &[f64], p: f64) -> Result<Decomposition> {
    check_space(ts, f, p)?;
    let sup = closed_cone_sup(ts, f);
    let m = ts.masses();
    let active: Vec<usize> = (0..f.len()).filter(|i| m[*i] > 0.0 && f[*i] != 0.0).collect();
    if let Some(i) = active.iter().find(|i| !f[**i].is_finite()) {
        return validation(format!("non-finite value at support point {i}"));
    }
    let level: Vec<i32> = (0..f.len()).map(|i| if sup[i] > 0.0 { level_of(sup[i].powf(p)) } else { i32::MIN }).collect();
    let mut ks: Vec<i32> = active.iter().map(|i| level[*i]).collect();
    ks.sort_unstable();
    ks.dedup();
    let pts = ts.points();
    let levels: Vec<Level> = ks
        .par_iter()
        .map(|&k| {
            let members: Vec<usize> = active.iter().copied().filter(|i| level[*i] == k).collect();
            let thr = 2f64.powi(k);
            let upper: Vec<DiscPoint> =
                (0..f.len()).filter(|j| m[*j] > 0.0 && f[*j].abs().powf(p) > thr).map(|j| pts[j]).collect();
            decompose_level(ts, f, p, k, &members, &upper)
        })
        .collect::<Result<_>>()?;
    let mut pieces = Vec::new();
    let mut dilations = Vec::new();
    for l in levels {
        dilations.push((l.k, l.c));
        pieces.extend(l.pieces);
    }
    let lambda_sum = pieces.iter().map(|a| a.lambda.abs().powf(p)).sum();
    Ok(Decomposition {
        p,
        q: f64::INFINITY,
        pieces,
        dilations,
        source_norm: ts.norm(f, p, f64::INFINITY)?,
        lambda_sum,
        h_scale: None,
    })
}

/// `f = gh` with `g ∈ T^p_∞` and `h ∈ T^∞_q`, together with the measured norms.
#[derive(Debug, Clone, Serialize)]
pub struct Factorization {
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    pub f_norm: f64,
    pub g_norm: f64,
    pub h_norm: f64,
    /// `max |g(z)|^{−q}/(Sμ)(z)` over the support of `f`, with `dμ = |f|^q ω(T(z)) dν`.
    pub balayage_constant: f64,
}

impl Factorization {
    /// `max |f − gh| / |f|` over points where `f ≠ 0`, and `max |gh|` where `f = 0`.
    pub fn product_error(&self, f: &[f64]) -> f64 {
        f.iter()
            .zip(self.g.iter().zip(&self.h))
            .map(|(a, (g, h))| if *a == 0.0 { (g * h).abs() } else { ((a - g * h) / a).abs() })
            .fold(0.0, f64::max)
    }
}

/// `g^s(z) = (1/ω(T(z))) ∫_{T(z)} M_ω(A^s_{q,ν}(f)) ω dA` and `h = f/g`.
pub fn factorize(ts: &TentSpace, f: &[f64], p: f64, q: f64, s: Option<f64>) -> Result<Factorization> {
    if f.len() != ts.len() {
        return validation("function does not match the support of ν");
    }
    if !(p > 0.0 && p.is_finite() && q > 0.0 && q.is_finite()) {
        return validation("factorization needs finite positive exponents");
    }
    let s = s.unwrap_or(p / 2.0);
    if !(s > 0.0 && s < p) {
        return validation(format!("auxiliary exponent {s} outside (0, p)"));
    }
    let area = ts.area_profile(f, q)?;
    let phi: Vec<f64> = area.iter().map(|a| a.powf(s)).collect();
    let op = MaximalOperator::new(ts.grid().clone(), ts.weight(), 1.0, ts.options().n_max)?;
    let mphi = op.image(&phi)?;
    let gs = ts.p0_image(|_, c| mphi[c])?;
    let g: Vec<f64> = gs.iter().map(|v| v.powf(1.0 / s)).collect();
    let mut h = vec![0.0; f.len()];
    for i in 0..f.len() {
        if f[i] != 0.0 {
            if !(g[i] > 0.0) {
                return Err(LabError::Construction(format!("g vanishes at support point {i} where f ≠ 0")));
            }
            h[i] = f[i] / g[i];
        }
    }
    let aq: Vec<f64> = area.iter().map(|a| a.powf(q)).collect();
    let omega = ts.cell_omega();
    let pts = ts.points();
    let balayage_constant = (0..f.len())
        .into_par_iter()
        .filter(|i| f[*i] != 0.0)
        .map(|i| {
            let mut sm = 0.0;
            let mut om = 0.0;
            ts.grid().for_each_in(&Region::Tent { vertex: pts[i], aperture: ts.aperture() }, |c| {
                om += omega[c];
                sm += omega[c] / aq[c];
            });
            if om == 0.0 {
                0.0
            } else {
                g[i].powf(-q) / (sm / om)
            }
        })
        .reduce(|| 0.0, f64::max);
    Ok(Factorization {
        p,
        q,
        s,
        f_norm: ts.norm(f, p, q)?,
        g_norm: ts.norm(&g, p, f64::INFINITY)?,
        h_norm: ts.norm(&h, f64::INFINITY, q)?,
        g,
        h,
        balayage_constant,
    })
}

/// Decomposition of `f ∈ T^p_q(ν,ω)`, `p ≤ q`, into `T^p_q` atoms via `f = gh`.
pub fn decompose_tp_q(ts: &TentSpace, f: &[f64], p: f64, q: f64) -> Result<(Decomposition, Factorization)> {
    if !(p <= q) {
        return validation("atomic decomposition of T^p_q needs p ≤ q");
    }
    let fac = factorize(ts, f, p, q, None)?;
    let dg = decompose_tp_infty(ts, &fac.g, p)?;
    let h = &fac.h;
    let mut scale = fac.h_norm;
    for piece in &dg.pieces {
        if piece.tent_mass > 0.0 {
            let region = piece.region();
            let mut s = 0.0;
            ts.measure().for_each_in(&region, |i| s += h[i].abs().powf(q) * ts.tent_masses()[i] * ts.masses()[i]);
            scale = scale.max((s / piece.tent_mass).powf(1.0 / q));
        }
    }
    let mut pieces = Vec::new();
    for mut piece in dg.pieces {
        let keep: Vec<(usize, f64)> =
            piece.indices.iter().zip(&piece.values).filter(|(i, _)| f[**i] != 0.0).map(|(i, v)| (*i, *v)).collect();
        if keep.is_empty() {
            continue;
        }
        piece.indices = keep.iter().map(|x| x.0).collect();
        piece.values = keep.iter().map(|(i, v)| h[*i] * v / scale).collect();
        piece.lambda *= scale;
        pieces.push(piece);
    }
    let lambda_sum = pieces.iter().map(|a| a.lambda.abs().powf(p)).sum();
    let dec = Decomposition {
        p,
        q,
        pieces,
        dilations: dg.dilations,
        source_norm: fac.f_norm,
        lambda_sum,
        h_scale: Some(scale),
    };
    Ok((dec, fac))
}

#[derive(Debug, Clone, Serialize)]
pub struct Balayage {
    /// `(Sμ)_ψ` at the support points of `μ`.
    pub s_values: Vec<f64>,
    /// `B_{μ,ψ}` at the quadrature cells.
    pub b_values: Vec<f64>,
    /// Largest `μ'(R)/ω(R)` over the standard square family, `dμ' = (Sμ)_ψ dμ`.
    pub maximal_sup: f64,
    /// Support points where the integrand `ω/B_{μ,ψ}` was undefined.
    pub undefined: usize,
}

/// `B_{μ,ψ}(ζ) = ∫_{Γ(ζ)} ψ dμ` and `(Sμ)_ψ(z) = ψ(z) ∫_{T(z)} ω/B_{μ,ψ} dA`, with `μ` the measure of `ts`.
pub fn balayage(ts: &TentSpace, psi: &[f64]) -> Result<Balayage> {
    if psi.len() != ts.len() {
        return validation("ψ does not match the support of μ");
    }
    if psi.iter().any(|v| !(*v >= 0.0)) {
        return validation("ψ must be non-negative");
    }
    let b = ts.area_profile(psi, 1.0)?;
    let omega = ts.cell_omega();
    let pts = ts.points();
    let rows: Vec<(f64, bool)> = (0..ts.len())
        .into_par_iter()
        .map(|i| {
            if psi[i] == 0.0 || ts.masses()[i] == 0.0 {
                return (0.0, false);
            }
            let mut s = 0.0;
            let mut bad = false;
            ts.grid().for_each_in(&Region::Tent { vertex: pts[i], aperture: ts.aperture() }, |c| {
                if omega[c] > 0.0 {
                    if b[c] > 0.0 {
                        s += omega[c] / b[c];
                    } else {
                        bad = true;
                    }
                }
            });
            (psi[i] * s, bad)
        })
        .collect();
    let s_values: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let atoms: Vec<(DiscPoint, f64)> =
        (0..ts.len()).map(|i| (pts[i], s_values[i] * ts.masses()[i])).filter(|a| a.1 > 0.0).collect();
    let mu2 = DiscMeasure::from_points(atoms)?;
    let engine = MaximalEngine::new(&mu2, ts.weight(), 1.0, MaximalMode::Standard, ts.options().n_max, OmegaSource::Analytic)?;
    Ok(Balayage {
        maximal_sup: engine.family_sup(),
        undefined: rows.iter().filter(|r| r.1).count(),
        s_values,
        b_values: b,
    })
}

/// [`balayage`] with `ψ(z) = 1/ω(T(z))`.
pub fn balayage_default(ts: &TentSpace) -> Result<Balayage> {
    let psi: Vec<f64> = ts.tent_masses().iter().map(|m| if *m > 0.0 { 1.0 / m } else { 0.0 }).collect();
    balayage(ts, &psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridSpec, PolarGrid};
    use crate::measure::SeparatedSequence;
    use crate::tent::TentOptions;
    use crate::weights::RadialWeight;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc as Shared;

    fn p(r: f64, t: f64) -> DiscPoint {
        DiscPoint::from_polar(r, t).unwrap()
    }

    fn space(nu: DiscMeasure) -> TentSpace {
        let w = RadialWeight::standard(0.0).unwrap();
        let g = Shared::new(PolarGrid::new(GridSpec::default()).unwrap());
        TentSpace::new(nu, &w, g, TentOptions::default()).unwrap()
    }

    fn lattice(seed: u64) -> (TentSpace, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let seq = SeparatedSequence::lattice(0.5, 0.95, &mut rng).unwrap();
        let masses: Vec<f64> = (0..seq.len()).map(|_| rng.gen_range(0.2..1.0)).collect();
        let f: Vec<f64> = (0..seq.len()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        (space(DiscMeasure::from_sequence(&seq, &masses).unwrap()), f)
    }

    #[test]
    fn levels() {
        assert_eq!(level_of(1.0), -1);
        assert_eq!(level_of(1.5), 0);
        assert_eq!(level_of(2.0), 0);
        assert_eq!(level_of(0.3), -2);
    }

    #[test]
    fn atom_validation() {
        let (ts, _) = lattice(1);
        let arc = Arc::closed(0.5, 0.6);
        let t = Region::ArcTent(arc);
        let idx: Vec<usize> = (0..ts.len()).filter(|i| t.contains(&ts.points()[*i])).collect();
        assert!(!idx.is_empty());
        let om = ts.grid_mass(&t);
        let mk = |v: f64| AtomPiece {
            level: 0,
            whitney: arc,
            support: arc,
            tent_mass: om,
            lambda: 1.0,
            indices: idx.clone(),
            values: vec![v; idx.len()],
        };
        assert!(validate_atom(&ts, &mk(0.0), 2.0, f64::INFINITY).unwrap().valid);
        assert!(validate_atom(&ts, &mk(om.powf(-0.5)), 2.0, f64::INFINITY).unwrap().valid);
        let bad = validate_atom(&ts, &mk(2.0 * om.powf(-0.5)), 2.0, f64::INFINITY).unwrap();
        assert!(!bad.valid && (bad.measured / bad.bound - 2.0).abs() < 1e-12);
        let mut outside = mk(1.0);
        outside.support = Arc::closed(3.5, 0.2);
        assert!(validate_atom(&ts, &outside, 2.0, f64::INFINITY).is_err());
    }

    #[test]
    fn single_atom_decomposition() {
        let z0 = p(0.7, 1.0);
        let ts = space(DiscMeasure::from_points(vec![(z0, 1.0)]).unwrap());
        assert!(decompose_tp_infty(&ts, &[0.0], 1.0).unwrap().pieces.is_empty());
        let d = decompose_tp_infty(&ts, &[1.0], 1.0).unwrap();
        assert_eq!(d.pieces.len(), 1);
        let a = &d.pieces[0];
        assert_eq!(a.level, -1);
        assert!((a.lambda - a.tent_mass).abs() < 1e-15);
        assert!(a.region().contains(&z0));
        assert!(d.reconstruction_error(&[1.0]) < 1e-15);
        let (dq, _) = decompose_tp_q(&ts, &[1.0], 2.0, 2.0).unwrap();
        assert_eq!(dq.pieces.len(), 1);
        assert!(validate_atom(&ts, &dq.pieces[0], 2.0, 2.0).unwrap().valid);
        assert!(dq.reconstruction_error(&[1.0]) < 1e-12);
    }

    #[test]
    fn lattice_decompositions() {
        let (ts, f) = lattice(9);
        let d = decompose_tp_infty(&ts, &f, 1.0).unwrap();
        assert!(d.reconstruction_error(&f) <= 1e-12);
        assert!(d.supports_disjoint(f.len()));
        for a in &d.pieces {
            assert!(validate_atom(&ts, a, 1.0, f64::INFINITY).unwrap().valid);
        }
        assert!(d.ratio() > 0.0 && d.ratio().is_finite());
        let (dq, fac) = decompose_tp_q(&ts, &f, 1.0, 2.0).unwrap();
        assert!(fac.product_error(&f) < 1e-12);
        assert!(dq.reconstruction_error(&f) <= 1e-12);
        for a in &dq.pieces {
            assert!(validate_atom(&ts, a, 1.0, 2.0).unwrap().valid);
        }
        let json = dq.to_json();
        assert!(json.contains("\"lambda\""));
    }

    #[test]
    fn full_circle_levels() {
        // A ring of points whose tent projections cover the whole circle.
        let pts: Vec<(DiscPoint, f64)> = (0..12).map(|j| (p(0.3, TAU * j as f64 / 12.0), 1.0)).collect();
        let ts = space(DiscMeasure::from_points(pts).unwrap());
        let f = vec![1.0; 12];
        let d = decompose_tp_infty(&ts, &f, 2.0).unwrap();
        assert!(d.reconstruction_error(&f) < 1e-15);
        assert!(d.supports_disjoint(12));
        for a in &d.pieces {
            assert!(validate_atom(&ts, a, 2.0, f64::INFINITY).unwrap().valid);
        }
    }

    #[test]
    fn factorization_single_atom() {
        let z0 = p(0.6, 2.0);
        let ts = space(DiscMeasure::from_points(vec![(z0, 0.5)]).unwrap());
        let zero = factorize(&ts, &[0.0], 2.0, 2.0, None).unwrap();
        assert_eq!((zero.g[0], zero.h[0]), (0.0, 0.0));
        let a = factorize(&ts, &[1.0], 2.0, 2.0, None).unwrap();
        let b = factorize(&ts, &[3.0], 2.0, 2.0, None).unwrap();
        assert!((b.g[0] / a.g[0] - 3.0).abs() < 1e-12);
        assert!((b.h[0] - a.h[0]).abs() < 1e-12);
        assert!(b.product_error(&[3.0]) < 1e-15);
    }

    #[test]
    fn balayage_examples() {
        let ts = space(DiscMeasure::zero());
        let b = balayage(&ts, &[]).unwrap();
        assert_eq!(b.maximal_sup, 0.0);
        let z0 = p(0.7, 0.4);
        let ts = space(DiscMeasure::from_points(vec![(z0, 1.0)]).unwrap());
        let b = balayage_default(&ts).unwrap();
        let om = ts.tent_masses()[0];
        assert!((b.s_values[0] / om - 1.0).abs() < 1e-12);
        assert_eq!(b.undefined, 0);
        let (ts, _) = lattice(4);
        let b = balayage_default(&ts).unwrap();
        assert!(b.maximal_sup.is_finite() && b.maximal_sup > 0.0);
    }
}
