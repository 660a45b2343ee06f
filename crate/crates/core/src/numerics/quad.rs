//! Adaptive Gauss-Kronrod quadrature and the heavy-tail substitution.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

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
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-9, rel_tol: 1e-10, max_intervals: 4000 }
    }
}

impl QuadOptions {
    pub fn abs(tol: f64) -> Self {
        QuadOptions { abs_tol: tol, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// One 15-point Kronrod panel with its embedded 7-point Gauss error.
fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Estimate { value: kron * h, error: ((kron - gauss) * h).abs() }
}

struct Panel {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Globally adaptive integration over consecutive breakpoints.
pub fn integrate<F: Fn(f64) -> f64>(f: F, breaks: &[f64], opts: QuadOptions) -> Result<Estimate> {
    if breaks.len() < 2 {
        return Err(Error::InvalidArgument("need at least two breakpoints".into()));
    }
    let mut heap = BinaryHeap::new();
    let (mut total, mut err) = (0.0, 0.0);
    for w in breaks.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let est = kronrod15(&f, w[0], w[1]);
        total += est.value;
        err += est.error;
        heap.push(Panel { a: w[0], b: w[1], est });
    }
    while err > opts.abs_tol.max(opts.rel_tol * total.abs()) {
        if heap.len() >= opts.max_intervals {
            return Err(Error::Quadrature { estimate: total, error: err });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine precision
            heap.push(worst);
            return Err(Error::Quadrature { estimate: total, error: err });
        }
        let left = kronrod15(&f, worst.a, mid);
        let right = kronrod15(&f, mid, worst.b);
        total += left.value + right.value - worst.est.value;
        err += left.error + right.error - worst.est.error;
        heap.push(Panel { a: worst.a, b: mid, est: left });
        heap.push(Panel { a: mid, b: worst.b, est: right });
    }
    // re-sum to shed accumulated rounding from the running updates
    let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.est.value, e + p.est.error));
    Ok(Estimate { value, error })
}

pub fn integrate_interval<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Estimate> {
    integrate(f, &[a, b], opts)
}

/// Breakpoints 0, top·2^-levels, ..., top/2, top.
pub fn dyadic_mesh(top: f64, levels: usize) -> Vec<f64> {
    let mut m = Vec::with_capacity(levels + 2);
    m.push(0.0);
    for k in (0..=levels).rev() {
        m.push(top * 0.5f64.powi(k as i32));
    }
    m
}

/// Upper end of the s-axis beyond which every density in the crate is
/// below e^{-100}.
pub const S_MAX: f64 = 12.0;

/// ∫₀^∞ f(s) ds for integrands that decay at least like a Gaussian in s and
/// may have structure at arbitrarily small s.
pub fn integrate_s_axis<F: Fn(f64) -> f64>(f: F, opts: QuadOptions) -> Result<Estimate> {
    integrate(f, &dyadic_mesh(S_MAX, 48), opts)
}

/// ∫₀^∞ f(χ) dχ for heavy-tailed integrands, evaluated on s = 2√(χ*/χ).
pub fn quad_heavy_tail<F: Fn(f64) -> f64>(f: F, chi_star: f64, tol: f64) -> Result<f64> {
    if !(chi_star > 0.0) {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {chi_star}")));
    }
    let g = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        let chi = 4.0 * chi_star / (s * s);
        let v = f(chi) * 8.0 * chi_star / (s * s * s);
        if v.is_finite() { v } else { 0.0 }
    };
    let opts = QuadOptions::abs(tol);
    let mut total = integrate(&g, &dyadic_mesh(S_MAX, 48), opts)?;
    // extend while the far blocks still contribute
    let mut lo = S_MAX;
    for _ in 0..16 {
        let block = integrate_interval(&g, lo, 2.0 * lo, QuadOptions::abs(0.1 * tol))?;
        total.value += block.value;
        total.error += block.error;
        if block.value.abs() < 0.01 * tol {
            return Ok(total.value);
        }
        lo *= 2.0;
    }
    Err(Error::Quadrature { estimate: total.value, error: total.error })
}

/// Tensor-product rule: adaptive outer integral of adaptive inner integrals,
/// each given half of the tolerance budget.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    outer: &[f64],
    inner: &[f64],
    opts: QuadOptions,
) -> Result<Estimate> {
    let half = QuadOptions { abs_tol: 0.5 * opts.abs_tol, rel_tol: 0.5 * opts.rel_tol, ..opts };
    let failure = std::cell::Cell::new(None);
    let outer_fn = |x: f64| match integrate(|y| f(x, y), inner, half) {
        Ok(e) => e.value,
        Err(Error::Quadrature { estimate, error }) => {
            failure.set(Some((estimate, error)));
            estimate
        }
        Err(_) => f64::NAN,
    };
    let est = integrate(outer_fn, outer, half)?;
    if let Some((_, error)) = failure.get() {
        if error > opts.abs_tol {
            return Err(Error::Quadrature { estimate: est.value, error });
        }
    }
    Ok(est)
}
