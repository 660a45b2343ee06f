//! Per-realization building blocks shared by the experiments.

use ndarray::Axis;
use rand::Rng;

use crate::bath_probe::{chi_prime_samples, ElementStats};
use crate::error::{Error, Result};
use crate::fidelity::{c_beta, susceptibilities, ChiSample, ChiStarProfile};
use crate::linalg::{Hermitian, Operator};
use crate::models::{assemble_full, build_coupling_operator, BathSpec, CouplingKind, CouplingSpec, IsingBathSpec, SectorMap, Spin};
use crate::resonance::{decoupled_vectors, match_to_decoupled, spin_entropies};
use crate::spectra::{
    diagonalize, dos_estimate, mid_spectrum_indices, pair_dos, spectral_function, EigenSystem, MicroWindow, Vectors,
};

/// Default coupling for a bath: alternating diagonal for random matrices,
/// σˣ on the mid-chain site for chains.
pub fn default_coupling(bath: &BathSpec) -> CouplingKind {
    match bath {
        BathSpec::RandomMatrix { .. } => CouplingKind::DiagAlternating,
        BathSpec::Ising(_) => CouplingKind::MidChainSigmaX,
    }
}

/// Default spin splitting: 0.1 for random matrices, matched to a chain site otherwise.
pub fn default_h_s(bath: &BathSpec) -> f64 {
    match bath {
        BathSpec::RandomMatrix { .. } => 0.1,
        BathSpec::Ising(s) => s.matched_splitting(),
    }
}

/// A sampled and diagonalized bath with its coupling operator.
pub struct SampledBath {
    pub spec: BathSpec,
    pub h: Hermitian,
    pub eig: EigenSystem,
    pub v: Operator,
}

pub fn sample_bath<R: Rng + ?Sized>(spec: &BathSpec, kind: CouplingKind, rng: &mut R) -> Result<SampledBath> {
    let h = spec.sample(rng)?;
    let mut eig = diagonalize(h.clone())?;
    if spec.kramers() {
        eig = eig.with_kramers_pairs();
    }
    let v = build_coupling_operator(kind, spec)?;
    Ok(SampledBath { spec: *spec, h, eig, v })
}

impl SampledBath {
    /// Mid-spectrum representatives (one per Kramers pair).
    pub fn mid_states(&self, fraction: f64) -> Result<Vec<usize>> {
        let reps = self.eig.representatives();
        Ok(reps[mid_spectrum_indices(reps.len(), fraction)?].to_vec())
    }

    pub fn chi_samples(&self, h_s: f64, fraction: f64) -> Result<Vec<ChiSample>> {
        susceptibilities(&self.eig, &self.v, &self.mid_states(fraction)?, h_s)
    }

    /// Chain baths: energy width √(tr H²/2^L) of the disorder average.
    pub fn energy_width(&self) -> f64 {
        match &self.spec {
            BathSpec::Ising(s) => s.mean_energy_variance().sqrt(),
            BathSpec::RandomMatrix { .. } => 1.0,
        }
    }

    /// Density of states at the band centre, counted in `window`.
    pub fn rho0(&self, window: f64) -> Result<f64> {
        dos_estimate(&self.eig.levels(), MicroWindow::new(0.0, window)?)
    }

    pub fn full(&self, j: f64, h_s: f64) -> Result<Coupled> {
        diagonalize_coupled(&self.h, &self.v, j, h_s)
    }
}

/// ṽ(E, ±h_S), ρ(E ± h_S) and χ*(E, h_S) = c_1 ṽ ρ measured on one chain,
/// averaged over the two signs of ω and over the listed window centres.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EthAnchor {
    pub v_tilde: f64,
    pub rho_target: f64,
    pub chi_star: f64,
}

pub fn eth_anchor(bath: &SampledBath, h_s: f64, window: f64, centers: &[f64]) -> Result<EthAnchor> {
    let levels = bath.eig.levels();
    let c1 = c_beta(1)?;
    let (mut v_sum, mut rho_sum, mut chi_sum) = (0.0, 0.0, 0.0);
    let mut n = 0.0;
    for &c in centers {
        let w = MicroWindow::new(c, window)?;
        for omega in [h_s, -h_s] {
            let v = spectral_function(&bath.eig, &bath.v, omega, w)?;
            let rho = pair_dos(&levels, w, omega)?;
            v_sum += v;
            rho_sum += rho;
            chi_sum += c1 * v * rho;
            n += 1.0;
        }
    }
    Ok(EthAnchor { v_tilde: v_sum / n, rho_target: rho_sum / n, chi_star: chi_sum / n })
}

/// Gaussian-DOS profile anchored at a measured χ*(0, h_S).
pub fn eth_profile(anchor: &EthAnchor, spec: &IsingBathSpec) -> ChiStarProfile {
    ChiStarProfile::EthGaussian { chi0: anchor.chi_star, s_e: spec.mean_energy_variance().sqrt() }
}

/// Spectrum of the coupled spin + bath.
pub struct Coupled {
    pub eig: EigenSystem,
    pub sectors: SectorMap,
    pub j: f64,
    pub h_s: f64,
}

pub fn diagonalize_coupled(h_b: &Hermitian, v: &Operator, j: f64, h_s: f64) -> Result<Coupled> {
    let model = assemble_full(h_b, v, CouplingSpec { j, j_z: 0.0, h_s })?;
    let sectors = model.sectors;
    Ok(Coupled { eig: diagonalize(model.h)?, sectors, j, h_s })
}

/// Exact spectrum of the uncoupled spin + bath, assembled from the bath
/// eigenpairs without another diagonalization.
pub fn decoupled_system(bath: &EigenSystem, h_s: f64) -> Coupled {
    let d = bath.dim();
    let mut energies: Vec<(f64, usize)> = (0..2 * d)
        .map(|i| if i < d { (bath.energies[i] + 0.5 * h_s, i) } else { (bath.energies[i - d] - 0.5 * h_s, i) })
        .collect();
    energies.sort_by(|a, b| a.0.total_cmp(&b.0));
    let order: Vec<usize> = energies.iter().map(|e| e.1).collect();
    let vectors = match decoupled_vectors(bath) {
        Vectors::Real(m) => Vectors::Real(m.select(Axis(1), &order)),
        Vectors::Complex(m) => Vectors::Complex(m.select(Axis(1), &order)),
    };
    Coupled {
        eig: EigenSystem { energies: energies.iter().map(|e| e.0).collect(), vectors, kramers: false },
        sectors: SectorMap { bath_dim: d },
        j: 0.0,
        h_s,
    }
}

/// One mid-spectrum unperturbed state followed to its coupled partner.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateRecord {
    pub sigma: i8,
    /// bath index a
    pub index: usize,
    pub energy: f64,
    pub chi: f64,
    /// spin entropy of the matched coupled eigenstate
    pub entropy: f64,
    /// squared overlap of the matched pair
    pub overlap: f64,
    /// ⟨σᶻ⟩ in the matched coupled eigenstate
    pub czz_diag: f64,
}

/// Match the coupled spectrum to the unperturbed one and record (χ, S) for
/// both spin sectors of every mid-spectrum bath state.
pub fn entropy_records(bath: &SampledBath, coupled: &Coupled, fraction: f64) -> Result<Vec<StateRecord>> {
    let states = bath.mid_states(fraction)?;
    let chis = susceptibilities(&bath.eig, &bath.v, &states, coupled.h_s)?;
    let matches = match_to_decoupled(&bath.eig, &coupled.eig)?;
    let sz = coupled.sectors.sigma_z();
    let mut out = Vec::with_capacity(chis.len());
    let mut targets = Vec::with_capacity(chis.len());
    for c in &chis {
        let spin = if c.sigma > 0 { Spin::Up } else { Spin::Down };
        targets.push(matches[coupled.sectors.index(spin, c.index)]);
    }
    let cols: Vec<usize> = targets.iter().map(|t| t.0).collect();
    let entropies = spin_entropies(&coupled.eig, &cols)?;
    for ((c, &(k, overlap)), s) in chis.iter().zip(&targets).zip(entropies) {
        let v = coupled.eig.vector(k);
        let czz: f64 = v.iter().zip(sz.iter()).map(|(z, s)| s * z.norm_sqr()).sum();
        out.push(StateRecord { sigma: c.sigma, index: c.index, energy: c.energy, chi: c.chi, entropy: s, overlap, czz_diag: czz });
    }
    Ok(out)
}

/// Probe quantities of one coupled spectrum: statistics of V′ elements in
/// the listed windows at frequency h_S′, and χ′ of the mid-spectrum states.
#[derive(Clone, Debug, Default)]
pub struct ProbeData {
    pub elements: ElementStats,
    pub chi_prime: Vec<f64>,
}

pub fn probe_data(coupled: &Coupled, v_probe: &Operator, h_probe: f64, window: f64, centers: &[f64], fraction: f64) -> Result<ProbeData> {
    let lifted = match v_probe {
        Operator::Diagonal(d) => Operator::Diagonal(coupled.sectors.lift_diagonal(d)),
        _ => return Err(Error::InvalidArgument("probe operator must be diagonal in the bath basis".into())),
    };
    let mut elements = ElementStats::default();
    for &c in centers {
        elements.accumulate(&coupled.eig, &lifted, MicroWindow::new(c, window)?, h_probe)?;
    }
    let states: Vec<usize> = mid_spectrum_indices(coupled.eig.dim(), fraction)?.collect();
    let chi_prime = chi_prime_samples(&coupled.eig, &lifted, h_probe, &states)?.into_iter().map(|c| c.chi).collect();
    Ok(ProbeData { elements, chi_prime })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::sigma_x_site;
    use crate::rng::stream;

    #[test]
    fn decoupled_system_matches_diagonalization_at_zero_coupling() {
        let spec = BathSpec::Ising(IsingBathSpec::with_sites(5));
        let bath = sample_bath(&spec, CouplingKind::MidChainSigmaX, &mut stream(3, 0)).unwrap();
        let h_s = default_h_s(&spec);
        let a = decoupled_system(&bath.eig, h_s);
        let b = bath.full(0.0, h_s).unwrap();
        for (x, y) in a.eig.energies.iter().zip(&b.eig.energies) {
            assert!((x - y).abs() < 1e-10);
        }
        let model = assemble_full(&bath.h, &bath.v, CouplingSpec { j: 0.0, j_z: 0.0, h_s }).unwrap();
        assert!(a.eig.max_residual(&model.h) < 1e-10);
    }

    #[test]
    fn weak_coupling_records_follow_perturbation_theory() {
        let spec = BathSpec::Ising(IsingBathSpec::with_sites(6));
        let bath = sample_bath(&spec, CouplingKind::MidChainSigmaX, &mut stream(4, 0)).unwrap();
        let j = 1e-4;
        let coupled = bath.full(j, default_h_s(&spec)).unwrap();
        let recs = entropy_records(&bath, &coupled, 0.5).unwrap();
        assert_eq!(recs.len(), 2 * 32);
        let h_s = default_h_s(&spec);
        for r in &recs {
            assert!(r.overlap > 0.99, "{r:?}");
            // the b = a term of χ keeps the spin coherent and drops out of S
            let diag = bath.eig.abs2_block(&bath.v, &[r.index], &[r.index]).unwrap()[[0, 0]];
            let x = j * j * (r.chi - diag / (h_s * h_s));
            let pert = x * (1.0 - x.ln());
            assert!((r.entropy - pert).abs() < 0.05 * pert + 1e-12, "{} vs {pert}", r.entropy);
            assert!((r.czz_diag.abs() - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn probe_baseline_is_finite() {
        let spec = IsingBathSpec::with_sites(6);
        let bath = sample_bath(&BathSpec::Ising(spec), CouplingKind::MidChainSigmaX, &mut stream(5, 0)).unwrap();
        let probe = sigma_x_site(6, spec.mid_site() - 1).unwrap();
        let base = decoupled_system(&bath.eig, spec.matched_splitting());
        let p = probe_data(&base, &probe, spec.matched_splitting(), 1.0, &[0.0], 0.25).unwrap();
        assert!(p.elements.pairs > 0);
        assert!(p.chi_prime.iter().all(|c| c.is_finite() && *c > 0.0));
    }
}
