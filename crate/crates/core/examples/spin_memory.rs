//! Decay of ⟨σᶻ(t)σᶻ⟩ for a spin on an Ising chain: golden-rule rate, the
//! correlator on a log time grid and the infinite-time plateau next to the
//! distribution-averaged prediction.
//!
//!     cargo run --release --example spin_memory -- 10 0.1

use partherm::dynamics::{czz_infinite_exact, czz_infinite_theory, fgr_gamma, log_time_grid, Correlator};
use partherm::fidelity::Family;
use partherm::harness::pipelines::{default_h_s, eth_anchor, eth_profile, sample_bath};
use partherm::models::{BathSpec, CouplingKind, IsingBathSpec};
use partherm::rng::stream;

fn main() -> partherm::Result<()> {
    let mut args = std::env::args().skip(1);
    let sites: usize = args.next().map(|a| a.parse().expect("chain length")).unwrap_or(10);
    let j: f64 = args.next().map(|a| a.parse().expect("coupling")).unwrap_or(0.1);
    let ising = IsingBathSpec::with_sites(sites);
    let spec = BathSpec::Ising(ising);
    let h_s = default_h_s(&spec);
    let bath = sample_bath(&spec, CouplingKind::MidChainSigmaX, &mut stream(3, 0))?;
    let gamma = fgr_gamma(&bath.eig, &bath.v, j, h_s, 0.1)?;
    println!("J = {j}, h_S = {h_s:.4}: gamma = {gamma:.5}, gamma/J^2 = {:.4}", gamma / (j * j));

    let coupled = bath.full(j, h_s)?;
    let corr = Correlator::new(&coupled.eig, coupled.sectors)?;
    for t in log_time_grid(0.1, 1e3, 17) {
        println!("t = {t:9.3}  C = {:9.5}  exp(-gamma t) = {:9.5}", corr.at(t), (-gamma * t).exp());
    }
    let plateau = czz_infinite_exact(&coupled.eig, coupled.sectors)?;
    let profile = eth_profile(&eth_anchor(&bath, h_s, 0.1, &[0.0])?, &ising);
    let theory = czz_infinite_theory(j, h_s, &profile, Family::Goe)?;
    println!("plateau {:.5} ({} degenerate blocks), theory {theory:.5}", plateau.value, plateau.degenerate_blocks);
    Ok(())
}
