//! Adaptive Gauss-Kronrod (7, 15) quadrature on finite intervals.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of a quadrature call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

/// Tolerances and subdivision budget.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-14, rel_tol: 1e-11, max_intervals: 4000 }
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Integrates `f` over `[a, b]` with the given options.
pub fn integrate_with<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Quad {
    integrate_breaks(f, &[a, b], opts)
}

/// Integrates `f` over `[a, b]` with default options.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Quad {
    integrate_with(f, a, b, QuadOptions::default())
}

/// Integrates over consecutive pieces `[pts[i], pts[i+1]]`, refining the piece with the
/// largest error estimate until the total error meets the tolerance.
pub fn integrate_breaks<F: Fn(f64) -> f64>(f: F, pts: &[f64], opts: QuadOptions) -> Quad {
    let mut parts: Vec<(f64, f64, f64, f64)> = Vec::new();
    for w in pts.windows(2) {
        if w[1] > w[0] {
            let (v, e) = gk15(&f, w[0], w[1]);
            parts.push((w[0], w[1], v, e));
        }
    }
    if parts.is_empty() {
        return Quad { value: 0.0, error: 0.0, intervals: 0 };
    }
    loop {
        let value: f64 = parts.iter().map(|p| p.2).sum();
        let error: f64 = parts.iter().map(|p| p.3).sum();
        let tol = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= tol || parts.len() >= opts.max_intervals {
            return Quad { value, error, intervals: parts.len() };
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (a, b, _, _) = parts[idx];
        let m = 0.5 * (a + b);
        if !(m > a && m < b) {
            return Quad { value, error, intervals: parts.len() };
        }
        let (v1, e1) = gk15(&f, a, m);
        let (v2, e2) = gk15(&f, m, b);
        parts[idx] = (a, m, v1, e1);
        parts.push((m, b, v2, e2));
    }
}

/// Integrates `g` over `[u0, ∞)` through the substitution `u = u0 + x/(1 − x)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(g: F, u0: f64, opts: QuadOptions) -> Quad {
    let h = move |x: f64| {
        if x >= 1.0 {
            return 0.0;
        }
        let y = 1.0 - x;
        let v = g(u0 + x / y) / (y * y);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate_breaks(h, &[0.0, 0.25, 0.5, 0.75, 0.9, 0.97, 1.0], opts)
}
