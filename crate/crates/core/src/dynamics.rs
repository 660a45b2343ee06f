//! The spin autocorrelator C_zz(t): exact evaluation in the eigenbasis,
//! its infinite-time plateau, the golden-rule rate and plateau theory.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::ensembles::semicircle_density;
use crate::error::{Error, Result};
use crate::fidelity::{c_beta, ChiStarProfile, DistributionModel, Family};
use crate::linalg::Operator;
use crate::models::SectorMap;
use crate::numerics::{integrate, QuadOptions};
use crate::spectra::{target_weight, EigenSystem};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

/// |⟨α|σᶻ⊗1|β⟩|² over the full eigenbasis.
pub fn sigma_z_weights(full: &EigenSystem, sectors: SectorMap) -> Result<Array2<f64>> {
    if full.dim() != sectors.dim() {
        return Err(Error::DimensionMismatch(format!("spectrum {} vs sectors {}", full.dim(), sectors.dim())));
    }
    full.abs2_elements(&Operator::Diagonal(sectors.sigma_z()))
}

/// Time evaluator holding the σᶻ weights so repeated grids cost O(d²) each.
pub struct Correlator {
    energies: Array1<f64>,
    weights: Array2<f64>,
}

impl Correlator {
    pub fn new(full: &EigenSystem, sectors: SectorMap) -> Result<Self> {
        Ok(Correlator { energies: Array1::from(full.energies.clone()), weights: sigma_z_weights(full, sectors)? })
    }

    /// (1/2d)Σ_αβ cos((E_α − E_β)t) W_αβ = (cᵀWc + sᵀWs)/2d.
    pub fn at(&self, t: f64) -> f64 {
        let c = self.energies.mapv(|e| (e * t).cos());
        let s = self.energies.mapv(|e| (e * t).sin());
        let n = self.energies.len() as f64;
        (c.dot(&self.weights.dot(&c)) + s.dot(&self.weights.dot(&s))) / n
    }

    pub fn series(&self, times: &[f64]) -> CorrelatorSeries {
        CorrelatorSeries { times: times.to_vec(), values: times.iter().map(|&t| self.at(t)).collect() }
    }
}

/// C_zz on a time grid. For real symmetric weights the imaginary part vanishes
/// identically, so only the cosine kernel is evaluated.
pub fn czz_t(full: &EigenSystem, sectors: SectorMap, times: &[f64]) -> Result<CorrelatorSeries> {
    Ok(Correlator::new(full, sectors)?.series(times))
}

/// Log-spaced grid of `n` times on [t0, t1], with t = 0 prepended.
pub fn log_time_grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    let mut ts = vec![0.0];
    if n == 1 {
        ts.push(t0);
    } else {
        let step = (t1 / t0).ln() / (n - 1) as f64;
        ts.extend((0..n).map(|k| t0 * (step * k as f64).exp()));
    }
    ts
}

/// Levels closer than this are merged into one block of the diagonal ensemble.
pub const DEGENERACY_GAP: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    pub value: f64,
    /// number of blocks with more than one level
    pub degenerate_blocks: usize,
}

/// Diagonal-ensemble value (1/2d)Σ_α ⟨α|σᶻ|α⟩², using the block-diagonal
/// ensemble wherever levels are degenerate.
pub fn czz_infinite_exact(full: &EigenSystem, sectors: SectorMap) -> Result<Plateau> {
    if full.dim() != sectors.dim() {
        return Err(Error::DimensionMismatch(format!("spectrum {} vs sectors {}", full.dim(), sectors.dim())));
    }
    let sz = sectors.sigma_z();
    let n = full.dim();
    let diag = full.diagonal_expectations(sz.view());
    let mut total = 0.0;
    let mut degenerate_blocks = 0;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && full.energies[end] - full.energies[end - 1] < DEGENERACY_GAP {
            end += 1;
        }
        if end - start == 1 {
            total += diag[start] * diag[start];
        } else {
            degenerate_blocks += 1;
            let block: Vec<usize> = (start..end).collect();
            let w = full.abs2_block(&Operator::Diagonal(sz.clone()), &block, &block)?;
            total += w.sum();
        }
        start = end;
    }
    Ok(Plateau { value: total / n as f64, degenerate_blocks })
}

/// γ = (2πJ²/d)Σ_{a,σ} ṽ_a(σh_S), with ṽ_a(ω) the weight of |V_ab|² in the
/// window of width Δ at E_a + ω divided by Δ. States whose target window
/// holds no levels contribute zero.
pub fn fgr_gamma(bath: &EigenSystem, v: &Operator, j: f64, h_s: f64, width: f64) -> Result<f64> {
    if !(width > 0.0) {
        return Err(Error::InvalidArgument(format!("window width must be positive, got {width}")));
    }
    let table = bath.abs2_elements(v)?;
    let reps = bath.representatives();
    let mut sum = 0.0;
    for &a in &reps {
        for sigma in [1.0, -1.0] {
            sum += target_weight(&bath.energies, &table, a, sigma * h_s, width);
        }
    }
    Ok(2.0 * PI * j * j * sum / (width * reps.len() as f64))
}

/// h(x) = E[1/(1 + 4xχ̃)] for χ̃ from the unit-scale family.
fn plateau_kernel(x: f64, unit: &DistributionModel) -> Result<f64> {
    if x == 0.0 {
        return Ok(1.0);
    }
    Ok(unit.expect(|c| 1.0 / (1.0 + 4.0 * x * c), 1e-12)?.value)
}

/// (1/2d)Σ_σ ∫dE ρ(E) ∫dχ f_FS(χ|E,σh_S)/(1 + 4J²χ).
pub fn czz_infinite_theory(j: f64, h_s: f64, profile: &ChiStarProfile, family: Family) -> Result<f64> {
    let unit = DistributionModel::new(family, 1.0)?;
    let j2 = j * j;
    let opts = QuadOptions { abs_tol: 1e-10, rel_tol: 1e-10, max_intervals: 2000 };
    match *profile {
        ChiStarProfile::Constant { chi_star } => plateau_kernel(j2 * chi_star, &unit),
        ChiStarProfile::EthGaussian { chi0, .. } => {
            // E = u·s_E with u standard normal; χ* = χ0 e^{−u²/2} in both sectors
            let norm = (2.0 * PI).sqrt();
            let f = |u: f64| {
                let w = (-0.5 * u * u).exp() / norm;
                w * plateau_kernel(j2 * chi0 * (-0.5 * u * u).exp(), &unit).unwrap_or(f64::NAN)
            };
            let breaks: Vec<f64> = (-10..=10).map(|k| k as f64).collect();
            Ok(integrate(f, &breaks, opts)?.value)
        }
        ChiStarProfile::Semicircle { beta, d } => {
            let cb = c_beta(beta.beta())?;
            let df = d as f64;
            let f = |e: f64| {
                let w = semicircle_density(e, 1.0);
                let mut acc = 0.0;
                for sigma in [1.0, -1.0] {
                    let rho = semicircle_density(e + sigma * h_s, df);
                    acc += plateau_kernel(j2 * cb * rho * rho / df, &unit).unwrap_or(f64::NAN);
                }
                0.5 * w * acc
            };
            let breaks: Vec<f64> = (0..=16).map(|k| -2.0 + 0.25 * k as f64).collect();
            Ok(integrate(f, &breaks, opts)?.value)
        }
    }
}

/// Reduced coupling J√χ* for a profile at the band centre.
pub fn reduced_coupling(j: f64, h_s: f64, profile: &ChiStarProfile) -> Result<f64> {
    Ok(j * profile.chi_star(0.0, h_s)?.sqrt())
}

/// Raw σᶻ expectation values per eigenstate, for output rows.
pub fn sigma_z_diagonal(full: &EigenSystem, sectors: SectorMap) -> Vec<f64> {
    full.diagonal_expectations(sectors.sigma_z().view())
}
