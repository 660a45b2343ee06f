//! Susceptibilities of a Poisson-level bath with Haar eigenvectors against
//! the Lévy law, as a log-binned histogram.
//!
//!     cargo run --release --example poisson_levy -- 10

use partherm::ensembles::DysonClass;
use partherm::fidelity::{estimate_chi_star, ChiStarProfile, DistributionModel};
use partherm::harness::pipelines::sample_bath;
use partherm::models::{BathSpec, CouplingKind, Ensemble};
use partherm::numerics::{chi_square_per_bin, histogram_log};
use partherm::rng::stream;

fn main() -> partherm::Result<()> {
    let n: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(10);
    let d = 1024;
    let h_s = 0.1;
    let spec = BathSpec::RandomMatrix { ensemble: Ensemble::Poisson, beta: DysonClass::Complex, d };
    let profile = ChiStarProfile::Semicircle { beta: DysonClass::Complex, d };
    let mut ratios = Vec::new();
    for r in 0..n {
        let bath = sample_bath(&spec, CouplingKind::DiagAlternating, &mut stream(7, r))?;
        for c in bath.chi_samples(h_s, 0.25)? {
            ratios.push(c.chi / profile.chi_star(c.energy, c.sigma as f64 * h_s)?);
        }
    }
    let levy = DistributionModel::levy(1.0)?;
    let hist = histogram_log(&ratios, 30, (1e-2, 1e3))?;
    println!("{:>10} {:>12} {:>12}", "chi/chi*", "histogram", "Levy");
    for (c, f) in hist.centers.iter().zip(&hist.densities) {
        println!("{c:10.4} {f:12.5e} {:12.5e}", levy.pdf(*c)?);
    }
    let total = ratios.len() as f64;
    let expected: Vec<f64> = hist.edges.windows(2).map(|w| total * (levy.cdf(w[1]) - levy.cdf(w[0]))).collect();
    let (chi2, bins) = chi_square_per_bin(&hist.counts, &expected, 5.0);
    println!("{} samples, chi2/bin = {chi2:.3} over {bins} bins", ratios.len());
    println!("tail estimate of log chi* = {:.4} (0 expected)", estimate_chi_star(&ratios, None)?);
    Ok(())
}
