//! The spin + bath seen by a second weakly coupled probe: distribution of
//! off-diagonal elements, the matrix-element entropy ΔS and the probe's
//! fidelity susceptibilities.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::fidelity::{estimate_chi_star, susceptibilities, ChiSample, DistributionModel, Family};
use crate::linalg::Operator;
use crate::numerics::{dyadic_mesh, integrate_2d, Estimate, QuadOptions, S_MAX};
use crate::resonance::transition_p;
use crate::spectra::{EigenSystem, MicroWindow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

/// (p, q) for x = J²χ.
fn pq(x: f64) -> (f64, f64) {
    let p = transition_p(x).unwrap_or(0.5);
    (p, 1.0 - p)
}

/// Gaussian variances of R for the pair (x, x′): (v_e, v_o).
pub fn kernel_variances(x: f64, y: f64) -> (f64, f64) {
    let (p, q) = pq(x);
    let (p2, q2) = pq(y);
    (2.0 * (q * q2 + p * p2), 2.0 * (q * p2 + p * q2))
}

fn mesh() -> Vec<f64> {
    dyadic_mesh(S_MAX, 40)
}

/// E[g(J²χ, J²χ′)] for independent χ, χ′ from the unit-scale family with
/// J = `g` (so that J√χ* = g).
pub fn expect_pair<G: Fn(f64, f64) -> f64>(g_coupling: f64, family: Family, g: G, tol: f64) -> Result<Estimate> {
    let unit = DistributionModel::new(family, 1.0)?;
    let j2 = g_coupling * g_coupling;
    let m = mesh();
    integrate_2d(
        |s, t| {
            if s <= 0.0 || t <= 0.0 {
                return 0.0;
            }
            unit.pdf_s(s) * unit.pdf_s(t) * g(j2 * unit.chi_of_s(s), j2 * unit.chi_of_s(t))
        },
        &m,
        &m,
        QuadOptions { abs_tol: tol, rel_tol: 1e-12, max_intervals: 4000 },
    )
}

fn parity_weight<F: Fn(f64) -> f64>(parity: Parity, x: f64, y: f64, f: F) -> f64 {
    let (ve, vo) = kernel_variances(x, y);
    match parity {
        Parity::Even => f(ve),
        Parity::Odd => f(vo),
        Parity::Mixed => 0.5 * (f(ve) + f(vo)),
    }
}

fn normal_pdf(r: f64, v: f64) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    (-r * r / (2.0 * v)).exp() / (2.0 * PI * v).sqrt()
}

fn normal_cdf(r: f64, v: f64) -> f64 {
    if v <= 0.0 {
        return if r >= 0.0 { 1.0 } else { 0.0 };
    }
    0.5 * (1.0 + erf(r / (2.0 * v).sqrt()))
}

const OD_TOL: f64 = 1e-10;

/// f_OD(R) = ∬ f_FS f_FS Normal(R | 0, v) for the chosen parity.
pub fn f_od_pdf(r: f64, g: f64, family: Family, parity: Parity) -> Result<f64> {
    Ok(expect_pair(g, family, |x, y| parity_weight(parity, x, y, |v| normal_pdf(r, v)), OD_TOL)?.value)
}

pub fn f_od_cdf(r: f64, g: f64, family: Family, parity: Parity) -> Result<f64> {
    Ok(expect_pair(g, family, |x, y| parity_weight(parity, x, y, |v| normal_cdf(r, v)), OD_TOL)?.value)
}

/// P(|R| < ε).
pub fn f_od_mass_within(eps: f64, g: f64, family: Family, parity: Parity) -> Result<f64> {
    let inside = |v: f64| if v <= 0.0 { 1.0 } else { erf(eps / (2.0 * v).sqrt()) };
    Ok(expect_pair(g, family, |x, y| parity_weight(parity, x, y, inside), OD_TOL)?.value)
}

/// E[R²].
pub fn f_od_second_moment(g: f64, family: Family, parity: Parity) -> Result<f64> {
    Ok(expect_pair(g, family, |x, y| parity_weight(parity, x, y, |v| v), OD_TOL)?.value)
}

/// Variance of R conditioned on |R| ≥ ε.
pub fn f_od_conditional_variance(eps: f64, g: f64, family: Family, parity: Parity) -> Result<f64> {
    // ∫_{|R|≥ε} R² Normal(R|0,v) dR = v(1 − erf(a) + 2a e^{−a²}/√π), a = ε/√(2v)
    let outside_r2 = |v: f64| {
        if v <= 0.0 {
            return 0.0;
        }
        let a = eps / (2.0 * v).sqrt();
        v * (1.0 - erf(a) + 2.0 * a * (-a * a).exp() / PI.sqrt())
    };
    let num = expect_pair(g, family, |x, y| parity_weight(parity, x, y, outside_r2), OD_TOL)?.value;
    let mass = 1.0 - f_od_mass_within(eps, g, family, parity)?;
    if mass <= 0.0 {
        return Err(Error::InvalidArgument(format!("no mass outside |R| < {eps}")));
    }
    Ok(num / mass)
}

/// ΔS = 2 log ∬ f_FS f_FS k(J²χ, J²χ′), with
/// k = √(pp′ + qq′) + √(pq′ + qp′).
pub fn delta_s_theory(g: f64, family: Family) -> Result<f64> {
    if g == 0.0 {
        return Ok(0.0);
    }
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::InvalidArgument(format!("reduced coupling must be positive, got {g}")));
    }
    // integrate k − 1 so that the small result is not swamped by the constant
    let k_minus_one = |x: f64, y: f64| {
        let (p, q) = pq(x);
        let (p2, q2) = pq(y);
        let b = p * q2 + q * p2;
        b.sqrt() - b / (1.0 + (1.0 - b).max(0.0).sqrt())
    };
    let excess = expect_pair(g, family, k_minus_one, 1e-11)?.value;
    Ok((2.0 * excess.ln_1p()).clamp(0.0, LN_2))
}

/// Running statistics of |V′_αβ| over window pairs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ElementStats {
    pub sum_abs: f64,
    pub sum_sq: f64,
    pub pairs: u64,
    /// Σ over pairs of |V′|/rms_window, so each window is normalized on its own
    pub sum_r: f64,
}

impl ElementStats {
    /// Add all pairs α ∈ W(E), β ∈ W(E + ω) of one spectrum.
    pub fn accumulate(&mut self, eig: &EigenSystem, op: &Operator, window: MicroWindow, omega: f64) -> Result<()> {
        let rows: Vec<usize> = window.range_in(&eig.energies).collect();
        let target = MicroWindow { center: window.center + omega, width: window.width };
        let cols: Vec<usize> = target.range_in(&eig.energies).collect();
        if rows.is_empty() {
            return Err(Error::EmptyWindow { center: window.center, width: window.width });
        }
        if cols.is_empty() {
            return Err(Error::EmptyWindow { center: target.center, width: target.width });
        }
        let w = eig.abs2_block(op, &rows, &cols)?;
        let sq: f64 = w.sum();
        let n = w.len() as f64;
        let rms = (sq / n).sqrt();
        let abs: f64 = w.iter().map(|x| x.sqrt()).sum();
        self.sum_abs += abs;
        self.sum_sq += sq;
        self.pairs += w.len() as u64;
        if rms > 0.0 {
            self.sum_r += abs / rms;
        }
        Ok(())
    }

    pub fn mean_abs(&self) -> f64 {
        self.sum_abs / self.pairs as f64
    }

    /// Mean of |R| with R normalized to unit rms inside each window pair.
    pub fn mean_r(&self) -> f64 {
        self.sum_r / self.pairs as f64
    }

    pub fn rms(&self) -> f64 {
        (self.sum_sq / self.pairs as f64).sqrt()
    }

    /// Rényi-½ entropy 2 log Σ√P of P = |V′|²/Σ|V′|² over the pooled pairs.
    pub fn renyi_half(&self) -> f64 {
        2.0 * (self.sum_abs / self.sum_sq.sqrt()).ln()
    }
}

/// ΔS from mean absolute elements, 2 log([|R|]/[|R|]_{J=0}), with R the
/// elements scaled to unit rms in their own window pair.
pub fn measure_delta_s_matrix_elements(coupled: &ElementStats, baseline: &ElementStats) -> Result<f64> {
    if coupled.pairs == 0 || baseline.pairs == 0 {
        return Err(Error::EmptyWindow { center: f64::NAN, width: f64::NAN });
    }
    Ok(2.0 * (coupled.mean_r() / baseline.mean_r()).ln())
}

/// Rényi-½ difference with the pair-count term removed,
/// [H − log N] − [H − log N]_{J=0}. For a single window pair this is
/// identical to the matrix-element route.
pub fn renyi_delta_s(coupled: &ElementStats, baseline: &ElementStats) -> f64 {
    (coupled.renyi_half() - (coupled.pairs as f64).ln()) - (baseline.renyi_half() - (baseline.pairs as f64).ln())
}

/// χ′ of the probe for the listed eigenstates of the spin + bath, both τ.
pub fn chi_prime_samples(full: &EigenSystem, v_prime: &Operator, h_s_prime: f64, states: &[usize]) -> Result<Vec<ChiSample>> {
    susceptibilities(full, v_prime, states, h_s_prime)
}

/// ΔS = log(χ*′/χ*′_{J=0}) from tail estimates of the two samples.
pub fn delta_s_from_tails(coupled: &[f64], baseline: &[f64]) -> Result<f64> {
    Ok(estimate_chi_star(coupled, None)? - estimate_chi_star(baseline, None)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Hermitian;
    use crate::models::{assemble_full, build_ising_bath, sigma_x_site, CouplingSpec, IsingBathSpec, SectorMap};
    use crate::rng::stream;
    use crate::spectra::diagonalize;

    #[test]
    fn kernel_variances_sum_to_two() {
        for (x, y) in [(0.0, 0.0), (0.1, 3.0), (1e4, 1e-3)] {
            let (e, o) = kernel_variances(x, y);
            assert!((e + o - 2.0).abs() < 1e-14);
        }
        assert_eq!(kernel_variances(0.0, 0.0), (2.0, 0.0));
    }

    #[test]
    fn even_odd_moments_sum_to_two() {
        let e = f_od_second_moment(0.3, Family::Goe, Parity::Even).unwrap();
        let o = f_od_second_moment(0.3, Family::Goe, Parity::Odd).unwrap();
        assert!((e + o - 2.0).abs() < 1e-8);
    }

    #[test]
    fn f_od_normalization() {
        for g in [1e-3, 0.3, 30.0] {
            for parity in [Parity::Even, Parity::Odd, Parity::Mixed] {
                let m = f_od_cdf(40.0, g, Family::Levy, parity).unwrap() - f_od_cdf(-40.0, g, Family::Levy, parity).unwrap();
                assert!((m - 1.0).abs() < 1e-5, "{g} {parity:?} {m}");
            }
        }
    }

    #[test]
    fn delta_s_limits() {
        assert_eq!(delta_s_theory(0.0, Family::Goe).unwrap(), 0.0);
        let big = delta_s_theory(1e3, Family::Goe).unwrap();
        assert!((big - LN_2).abs() < 1e-3, "{big}");
        let mut last = 0.0;
        for k in 0..10 {
            let g = 10f64.powf(-3.0 + 0.5 * k as f64);
            let v = delta_s_theory(g, Family::Goe).unwrap();
            assert!(v >= last - 1e-9 && v <= LN_2);
            last = v;
        }
    }

    fn probe_setup(j: f64) -> (EigenSystem, Operator, SectorMap) {
        let spec = IsingBathSpec::with_sites(6);
        let hb = build_ising_bath(&spec, &mut stream(9, 0)).unwrap();
        let v = sigma_x_site(6, spec.mid_site()).unwrap();
        let m = assemble_full(&hb, &v, CouplingSpec { j, j_z: 0.0, h_s: spec.matched_splitting() }).unwrap();
        let Operator::Diagonal(vp) = sigma_x_site(6, spec.mid_site() - 1).unwrap() else { unreachable!() };
        let lifted = Operator::Diagonal(m.sectors.lift_diagonal(&vp));
        (diagonalize(m.h).unwrap(), lifted, m.sectors)
    }

    #[test]
    fn self_ratio_vanishes_and_matches_renyi() {
        let (eig0, vp, _) = probe_setup(0.0);
        let (eig1, _, _) = probe_setup(0.5);
        let window = MicroWindow::new(0.0, 1.0).unwrap();
        let h = IsingBathSpec::default().matched_splitting();
        let mut base = ElementStats::default();
        base.accumulate(&eig0, &vp, window, h).unwrap();
        assert_eq!(measure_delta_s_matrix_elements(&base, &base).unwrap(), 0.0);
        let mut coupled = ElementStats::default();
        coupled.accumulate(&eig1, &vp, window, h).unwrap();
        let a = measure_delta_s_matrix_elements(&coupled, &base).unwrap();
        let b = renyi_delta_s(&coupled, &base);
        assert!((a - b).abs() < 1e-10, "{a} {b}");
    }

    #[test]
    fn degenerate_probe_denominator_is_reported() {
        let eig = diagonalize(Hermitian::Real(ndarray::Array2::from_diag(&ndarray::array![0.0, 1.0]))).unwrap();
        let v = Operator::Dense(Hermitian::Real(ndarray::array![[0.0, 1.0], [1.0, 0.0]]));
        assert!(chi_prime_samples(&eig, &v, 1.0, &[0]).is_err());
    }
}
