//! How much the spin thermalizes the chain, seen by a second probe spin on a
//! neighbouring site: ΔS from off-diagonal elements and from susceptibility
//! tails, next to the closed form.
//!
//!     cargo run --release --example second_probe -- 8 4

use partherm::bath_probe::{delta_s_from_tails, delta_s_theory, measure_delta_s_matrix_elements, ElementStats};
use partherm::fidelity::Family;
use partherm::harness::pipelines::{decoupled_system, default_h_s, eth_anchor, probe_data, sample_bath};
use partherm::models::{sigma_x_site, BathSpec, CouplingKind, IsingBathSpec};
use partherm::rng::stream;

fn add(acc: &mut ElementStats, x: &ElementStats) {
    acc.sum_abs += x.sum_abs;
    acc.sum_sq += x.sum_sq;
    acc.pairs += x.pairs;
    acc.sum_r += x.sum_r;
}

fn main() -> partherm::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let sites = args.next().unwrap_or(8);
    let n = args.next().unwrap_or(4) as u64;
    let ising = IsingBathSpec::with_sites(sites);
    let spec = BathSpec::Ising(ising);
    let h_s = default_h_s(&spec);
    let probe = sigma_x_site(sites, ising.mid_site() - 1)?;
    let centers = [-0.2, 0.0, 0.2];
    let gs = [0.1, 0.3, 1.0];
    let mut base = (ElementStats::default(), Vec::new());
    let mut runs = vec![(ElementStats::default(), Vec::new()); gs.len()];
    for r in 0..n {
        let bath = sample_bath(&spec, CouplingKind::MidChainSigmaX, &mut stream(13, r))?;
        let chi0 = eth_anchor(&bath, h_s, 0.1, &[0.0])?.chi_star;
        let p = probe_data(&decoupled_system(&bath.eig, h_s), &probe, h_s, 0.1, &centers, 0.25)?;
        add(&mut base.0, &p.elements);
        base.1.extend(p.chi_prime);
        for (k, g) in gs.iter().enumerate() {
            let coupled = bath.full(g / chi0.sqrt(), h_s)?;
            let p = probe_data(&coupled, &probe, h_s, 0.1, &centers, 0.25)?;
            add(&mut runs[k].0, &p.elements);
            runs[k].1.extend(p.chi_prime);
        }
    }
    for (g, (el, chi)) in gs.iter().zip(&runs) {
        println!(
            "g = {g}: elements {:.3}, tails {:.3}, theory {:.3}",
            measure_delta_s_matrix_elements(el, &base.0)?,
            delta_s_from_tails(chi, &base.1)?,
            delta_s_theory(*g, Family::Goe)?
        );
    }
    Ok(())
}
