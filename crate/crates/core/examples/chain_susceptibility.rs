//! Fidelity susceptibilities of the disordered Ising chain: the ETH scale
//! χ* measured from the coupling's spectral function, and the ratio χ/χ*(E)
//! compared with the GOE law.
//!
//!     cargo run --release --example chain_susceptibility -- 10 5

use partherm::fidelity::{DistributionModel, Family};
use partherm::harness::pipelines::{default_h_s, eth_anchor, eth_profile, sample_bath};
use partherm::models::{BathSpec, CouplingKind, IsingBathSpec};
use partherm::numerics::ks_distance;
use partherm::rng::stream;

fn main() -> partherm::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let sites = args.next().unwrap_or(10);
    let n = args.next().unwrap_or(5) as u64;
    let ising = IsingBathSpec::with_sites(sites);
    let spec = BathSpec::Ising(ising);
    let h_s = default_h_s(&spec);
    let mut ratios = Vec::new();
    for r in 0..n {
        let bath = sample_bath(&spec, CouplingKind::MidChainSigmaX, &mut stream(11, r))?;
        let anchor = eth_anchor(&bath, h_s, 0.1, &[0.0])?;
        let profile = eth_profile(&anchor, &ising);
        println!(
            "realization {r}: v~ = {:.4}, rho(E+h) = {:.1}, chi* = {:.2}, chi*/2^L = {:.5}",
            anchor.v_tilde,
            anchor.rho_target,
            anchor.chi_star,
            anchor.chi_star / ising.dim() as f64
        );
        for c in bath.chi_samples(h_s, 0.25)? {
            ratios.push(c.chi / profile.chi_star(c.energy, c.sigma as f64 * h_s)?);
        }
    }
    let goe = DistributionModel::new(Family::Goe, 1.0)?;
    let levy = DistributionModel::levy(1.0)?;
    println!(
        "{} samples: KS to GOE law {:.4}, to Levy {:.4}",
        ratios.len(),
        ks_distance(&ratios, |x| goe.cdf(x)),
        ks_distance(&ratios, |x| levy.cdf(x))
    );
    Ok(())
}
