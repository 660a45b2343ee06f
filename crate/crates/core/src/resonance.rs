//! Two-level resonance model: transition probability, cat-state entropy,
//! the entanglement-entropy distribution f_EE and its moments, plus
//! measured spin entropies of exact eigenstates.

use std::f64::consts::{LN_2, PI};

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fidelity::{DistributionModel, Family};
use crate::linalg::C64;
use crate::numerics::{bisect_newton, dyadic_mesh, integrate, quad_heavy_tail, QuadOptions};
use crate::spectra::{match_eigenstates, overlap_abs2, EigenSystem, Vectors};

fn check_x(x: f64) -> Result<()> {
    if x >= 0.0 && !x.is_nan() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("x = J²χ must be non-negative, got {x}")))
    }
}

/// p = ½(1 − 1/√(1+4x)), written to avoid cancellation at small x.
pub fn transition_p(x: f64) -> Result<f64> {
    check_x(x)?;
    if x.is_infinite() {
        return Ok(0.5);
    }
    let r = (1.0 + 4.0 * x).sqrt();
    Ok(2.0 * x / ((1.0 + r) * r))
}

fn entropy_of_p(p: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    -p * p.ln() - (1.0 - p) * (-p).ln_1p()
}

/// S = −p log p − q log q of the resonant cat state.
pub fn cat_entropy(x: f64) -> Result<f64> {
    Ok(entropy_of_p(transition_p(x)?))
}

/// dS/dx = log(q/p)·(1+4x)^{−3/2}.
pub fn cat_entropy_derivative(x: f64) -> Result<f64> {
    check_x(x)?;
    let p = transition_p(x)?;
    if p == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(((1.0 - p) / p).ln() * (1.0 + 4.0 * x).powf(-1.5))
}

/// x with S(x) = s, found on the log-x axis.
pub fn x_of_entropy(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < LN_2) {
        return Err(Error::InvalidArgument(format!("entropy {s} outside (0, log 2)")));
    }
    let g = |y: f64| {
        let x = y.exp();
        let p = transition_p(x).unwrap_or(0.0);
        (entropy_of_p(p) - s, cat_entropy_derivative(x).unwrap_or(0.0) * x)
    };
    let y = bisect_newton(g, -740.0, 40.0, 1e-15)?;
    Ok(y.exp())
}

/// Reduced spin density matrix of a state ordered spin-major, entries (uu, dd, ud).
fn reduced_spin(state: ArrayView1<C64>, d: usize) -> (f64, f64, C64) {
    let (up, down) = (state.slice(ndarray::s![..d]), state.slice(ndarray::s![d..]));
    let uu: f64 = up.iter().map(|z| z.norm_sqr()).sum();
    let dd: f64 = down.iter().map(|z| z.norm_sqr()).sum();
    let ud: C64 = up.iter().zip(down.iter()).map(|(a, b)| a * b.conj()).sum();
    (uu, dd, ud)
}

fn two_by_two_entropy(uu: f64, dd: f64, ud_abs2: f64) -> f64 {
    let half_gap = ((uu - dd) * (uu - dd) / 4.0 + ud_abs2).sqrt();
    let mean = 0.5 * (uu + dd);
    let small = (mean - half_gap).max(0.0);
    // the larger eigenvalue is 1 − small for a normalized state
    entropy_of_p(small.min(0.5))
}

/// von Neumann entropy of the spin for a normalized state of dimension 2d.
pub fn spin_entropy_from_eigenvector(state: ArrayView1<C64>, d: usize) -> Result<f64> {
    if state.len() != 2 * d {
        return Err(Error::DimensionMismatch(format!("state of length {} for bath dimension {d}", state.len())));
    }
    let (uu, dd, ud) = reduced_spin(state, d);
    let norm = uu + dd;
    if (norm.sqrt() - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized(norm.sqrt()));
    }
    Ok(two_by_two_entropy(uu, dd, ud.norm_sqr()))
}

/// Spin entropies of the listed eigenvectors of a full spin + bath spectrum.
pub fn spin_entropies(full: &EigenSystem, states: &[usize]) -> Result<Vec<f64>> {
    let d = full.dim() / 2;
    match &full.vectors {
        Vectors::Real(v) => states
            .iter()
            .map(|&k| {
                let c = v.column(k);
                let uu: f64 = c.slice(ndarray::s![..d]).iter().map(|x| x * x).sum();
                let dd: f64 = c.slice(ndarray::s![d..]).iter().map(|x| x * x).sum();
                let ud: f64 = c.slice(ndarray::s![..d]).dot(&c.slice(ndarray::s![d..]));
                Ok(two_by_two_entropy(uu, dd, ud * ud))
            })
            .collect(),
        Vectors::Complex(v) => states.iter().map(|&k| spin_entropy_from_eigenvector(v.column(k), d)).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbativeEntropy {
    pub value: f64,
    /// J²χ above 0.1, where the expansion is not trustworthy
    pub flagged: bool,
}

/// J²χ(1 − log J²χ).
pub fn perturbative_entropy(j: f64, chi: f64) -> Result<PerturbativeEntropy> {
    let x = j * j * chi;
    check_x(x)?;
    let value = if x == 0.0 { 0.0 } else { x * (1.0 - x.ln()) };
    Ok(PerturbativeEntropy { value, flagged: x > 0.1 })
}

/// Measured entropy of one eigenstate together with its model inputs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyRecord {
    /// decoupled index s·d + a
    pub alpha: usize,
    pub s_measured: f64,
    pub chi: f64,
    pub j: f64,
    pub overlap: f64,
}

/// Eigenvectors of the decoupled model in the spin-major layout
/// (block-diagonal copies of the bath eigenvectors).
pub fn decoupled_vectors(bath: &EigenSystem) -> Vectors {
    let d = bath.dim();
    match &bath.vectors {
        Vectors::Real(u) => {
            let mut m = Array2::<f64>::zeros((2 * d, 2 * d));
            m.slice_mut(ndarray::s![..d, ..d]).assign(u);
            m.slice_mut(ndarray::s![d.., d..]).assign(u);
            Vectors::Real(m)
        }
        Vectors::Complex(u) => {
            let mut m = Array2::<C64>::zeros((2 * d, 2 * d));
            m.slice_mut(ndarray::s![..d, ..d]).assign(u);
            m.slice_mut(ndarray::s![d.., d..]).assign(u);
            Vectors::Complex(m)
        }
    }
}

/// For each decoupled state s·d + a, the matched coupled eigenstate and the
/// squared overlap of the pair.
pub fn match_to_decoupled(bath: &EigenSystem, full: &EigenSystem) -> Result<Vec<(usize, f64)>> {
    if full.dim() != 2 * bath.dim() {
        return Err(Error::DimensionMismatch(format!("full {} vs bath {}", full.dim(), bath.dim())));
    }
    let bare = decoupled_vectors(bath);
    let perm = match_eigenstates(&bare, &full.vectors)?;
    let overlaps = overlap_abs2(&bare, &full.vectors)?;
    Ok(perm.iter().enumerate().map(|(a, &b)| (b, overlaps[[a, b]])).collect())
}

/// Matched pairs with a squared overlap below this are left out of
/// model-versus-measurement statistics.
pub const MIN_MATCH_OVERLAP: f64 = 1e-6;

fn require_coupling(j: f64) -> Result<()> {
    if j > 0.0 && j.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("coupling must be positive, got {j}")))
    }
}

/// Density of S when χ ~ `dist`: f_FS(x(S)/J²)/(J²S′(x(S))).
pub fn f_ee_pdf(s: f64, j: f64, dist: &DistributionModel) -> Result<f64> {
    require_coupling(j)?;
    let x = x_of_entropy(s)?;
    let j2 = j * j;
    Ok(dist.pdf(x / j2)? / (j2 * cat_entropy_derivative(x)?))
}

/// ∫ f_EE dS evaluated in the x variable; the density itself is recomputed
/// through the inverse map at every node.
pub fn f_ee_mass(j: f64, dist: &DistributionModel) -> Result<f64> {
    require_coupling(j)?;
    let j2 = j * j;
    let integrand = |chi: f64| {
        let x = j2 * chi;
        let s = match cat_entropy(x) {
            Ok(s) if s > 0.0 && s < LN_2 => s,
            _ => return 0.0,
        };
        match (f_ee_pdf(s, j, dist), cat_entropy_derivative(x)) {
            (Ok(f), Ok(ds)) => f * ds * j2,
            _ => 0.0,
        }
    };
    quad_heavy_tail(integrand, dist.chi_star, 1e-7)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EeMoments {
    pub mean: f64,
    pub median: f64,
    pub variance: f64,
}

const MOMENT_TOL: f64 = 1e-15;

/// Mean, median and variance of S(J²χ) for χ ~ `dist`.
pub fn ee_moments(j: f64, dist: &DistributionModel) -> Result<EeMoments> {
    if j == 0.0 {
        return Ok(EeMoments { mean: 0.0, median: 0.0, variance: 0.0 });
    }
    require_coupling(j)?;
    let j2 = j * j;
    let s = |chi: f64| cat_entropy(j2 * chi).unwrap_or(LN_2);
    let mean = dist.expect(s, MOMENT_TOL)?.value;
    let second = dist.expect(|c| s(c).powi(2), MOMENT_TOL)?.value;
    let median = cat_entropy(j2 * dist.median()?)?;
    Ok(EeMoments { mean, median, variance: (second - mean * mean).max(0.0) })
}

/// ∫₀^∞ g(x) x^{−3/2} dx over a log-spread mesh.
fn power_law_integral<G: Fn(f64) -> f64>(g: G) -> Result<f64> {
    // x = t², dx = 2t dt: ∫ 2 g(t²) t^{−2} dt
    let h = |t: f64| if t > 0.0 { 2.0 * g(t * t) / (t * t) } else { 0.0 };
    let mut mesh = dyadic_mesh(1.0, 60);
    let mut top = 1.0;
    while top < 1e9 {
        top *= 2.0;
        mesh.push(top);
    }
    let body = integrate(h, &mesh, QuadOptions { abs_tol: 1e-13, rel_tol: 1e-13, max_intervals: 20_000 })?;
    // beyond t_max, S ≈ log 2: ∫ 2 log2 t^{−2} dt = 2 log 2 / t_max
    Ok(body.value + 2.0 * g(top * top) / top)
}

/// ∫ S(x) x^{−3/2} dx, the weak-coupling slope of the mean entropy (= 2π).
pub fn weak_mean_constant() -> Result<f64> {
    power_law_integral(|x| cat_entropy(x).unwrap_or(0.0))
}

/// c_v = ∫ S(x)² x^{−3/2} dx, the weak-coupling slope of the variance.
pub fn c_v() -> Result<f64> {
    power_law_integral(|x| cat_entropy(x).unwrap_or(0.0).powi(2))
}

/// c_a = χ*·E[1/χ], fixing log 2 − mean ≈ c_a/(8J²χ*) at strong coupling.
pub fn c_a(dist: &DistributionModel) -> Result<f64> {
    dist.mean_inverse_ratio()
}

/// Leading weak-coupling forms: mean 2πJ√χ*, median c_m x(1 − log x) with
/// x = c_m J²χ*, variance c_v J√χ*.
pub fn ee_weak_asymptotes(j: f64, chi_star: f64, family: Family) -> Result<EeMoments> {
    if j == 0.0 {
        return Ok(EeMoments { mean: 0.0, median: 0.0, variance: 0.0 });
    }
    let g = j * chi_star.sqrt();
    let dist = DistributionModel::new(family, chi_star)?;
    let c_m = dist.median()? / chi_star;
    let x = c_m * j * j * chi_star;
    Ok(EeMoments { mean: 2.0 * PI * g, median: x * (1.0 - x.ln()), variance: c_v()? * g })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array1;

    #[test]
    fn closed_form_points() {
        assert_eq!(transition_p(0.0).unwrap(), 0.0);
        assert_eq!(cat_entropy(0.0).unwrap(), 0.0);
        assert!((transition_p(2.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let want = 3f64.ln() - 2.0 / 3.0 * LN_2;
        assert!((cat_entropy(2.0).unwrap() - want).abs() < 1e-14);
        assert!((cat_entropy(1e12).unwrap() - LN_2).abs() < 1e-12);
        assert!(transition_p(-1.0).is_err());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for x in [1e-6, 0.01, 0.3, 2.0, 50.0] {
            let h = 1e-6 * x;
            let fd = (cat_entropy(x + h).unwrap() - cat_entropy(x - h).unwrap()) / (2.0 * h);
            let an = cat_entropy_derivative(x).unwrap();
            assert!((fd - an).abs() < 1e-6 * an.abs(), "{x}");
        }
    }

    #[test]
    fn inverse_round_trip() {
        for k in -6..=6 {
            let x = 10f64.powi(k);
            let back = x_of_entropy(cat_entropy(x).unwrap()).unwrap();
            // near log 2 the map flattens; compare in S there
            if k <= 4 {
                assert!((back / x - 1.0).abs() < 1e-10, "{x} {back}");
            } else {
                assert!((cat_entropy(back).unwrap() - cat_entropy(x).unwrap()).abs() < 1e-14);
            }
        }
        assert!(x_of_entropy(0.0).is_err());
        assert!(x_of_entropy(LN_2).is_err());
    }

    #[test]
    fn product_and_cat_states() {
        let d = 3;
        let mut psi = Array1::<C64>::zeros(2 * d);
        psi[1] = C64::new(1.0, 0.0);
        assert_eq!(spin_entropy_from_eigenvector(psi.view(), d).unwrap(), 0.0);
        let mut cat = Array1::<C64>::zeros(2 * d);
        cat[0] = C64::new(0.5f64.sqrt(), 0.0);
        cat[d + 2] = C64::new(0.0, 0.5f64.sqrt());
        assert!((spin_entropy_from_eigenvector(cat.view(), d).unwrap() - LN_2).abs() < 1e-14);
        let mut biased = Array1::<C64>::zeros(2 * d);
        biased[0] = C64::new((2.0f64 / 3.0).sqrt(), 0.0);
        biased[d + 1] = C64::new((1.0f64 / 3.0).sqrt(), 0.0);
        let s = spin_entropy_from_eigenvector(biased.view(), d).unwrap();
        assert!((s - cat_entropy(2.0).unwrap()).abs() < 1e-14);
        biased[0] *= 2.0;
        assert!(matches!(spin_entropy_from_eigenvector(biased.view(), d), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn perturbative_expansion() {
        assert_eq!(perturbative_entropy(0.0, 5.0).unwrap().value, 0.0);
        let x = (-4.0f64).exp();
        let p = perturbative_entropy(1.0, x).unwrap();
        assert!((p.value - 5.0 * x).abs() < 1e-15 && !p.flagged);
        assert!(perturbative_entropy(1.0, 0.2).unwrap().flagged);
    }

    #[test]
    fn weak_coupling_constants() {
        assert!((weak_mean_constant().unwrap() - 2.0 * PI).abs() < 1e-6);
        assert!((c_v().unwrap() - 1.91755).abs() < 1e-5);
    }

    #[test]
    fn f_ee_is_normalized() {
        let dist = DistributionModel::levy(1.0).unwrap();
        for g in [1e-3, 1e-1, 10.0] {
            let m = f_ee_mass(g, &dist).unwrap();
            assert!((m - 1.0).abs() < 1e-5, "{g} {m}");
        }
    }

    #[test]
    fn zero_coupling_moments_vanish() {
        let z = ee_weak_asymptotes(0.0, 1.0, Family::Levy).unwrap();
        assert_eq!((z.mean, z.median, z.variance), (0.0, 0.0, 0.0));
        let m = ee_moments(0.0, &DistributionModel::levy(1.0).unwrap()).unwrap();
        assert_eq!(m.mean, 0.0);
    }
}
