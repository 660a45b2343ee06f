//! Spin entanglement entropy of individual eigenstates against J²χ: weak
//! coupling states sit on the two-level cat-state curve.
//!
//!     cargo run --release --example resonance_entropy -- 8 0.02

use partherm::harness::pipelines::{default_h_s, entropy_records, sample_bath};
use partherm::models::{BathSpec, CouplingKind, IsingBathSpec};
use partherm::resonance::{cat_entropy, perturbative_entropy, MIN_MATCH_OVERLAP};
use partherm::rng::stream;

fn main() -> partherm::Result<()> {
    let mut args = std::env::args().skip(1);
    let sites: usize = args.next().map(|a| a.parse().expect("chain length")).unwrap_or(8);
    let j: f64 = args.next().map(|a| a.parse().expect("coupling")).unwrap_or(0.02);
    let spec = BathSpec::Ising(IsingBathSpec::with_sites(sites));
    let bath = sample_bath(&spec, CouplingKind::MidChainSigmaX, &mut stream(5, 0))?;
    let coupled = bath.full(j, default_h_s(&spec))?;
    let mut recs: Vec<_> = entropy_records(&bath, &coupled, 0.25)?
        .into_iter()
        .filter(|r| r.overlap >= MIN_MATCH_OVERLAP)
        .collect();
    recs.sort_by(|a, b| a.chi.total_cmp(&b.chi));
    println!("{:>12} {:>10} {:>10} {:>10}", "J^2 chi", "S", "cat", "2nd order");
    for r in recs.iter().step_by((recs.len() / 25).max(1)) {
        let x = j * j * r.chi;
        println!(
            "{x:12.4e} {:10.4e} {:10.4e} {:10.4e}",
            r.entropy,
            cat_entropy(x)?,
            perturbative_entropy(j, r.chi)?.value
        );
    }
    Ok(())
}
