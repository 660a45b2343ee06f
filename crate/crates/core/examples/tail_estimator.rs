//! Accuracy of the heavy-tail scale estimator on exact samples.

use partherm::fidelity::{estimate_chi_star, DistributionModel, Family};
use partherm::rng::stream;

fn main() -> partherm::Result<()> {
    let trials = 50;
    for family in [Family::Levy, Family::Goe] {
        let model = DistributionModel::new(family, 2.0)?;
        let sampler = model.sampler();
        for n in [1_000usize, 10_000, 100_000] {
            let mut sq = 0.0;
            for t in 0..trials {
                let mut rng = stream(n as u64, t);
                let xs: Vec<f64> = (0..n).map(|_| sampler.draw(&mut rng)).collect();
                let e = estimate_chi_star(&xs, None)? - 2f64.ln();
                sq += e * e;
            }
            println!("{family:?} N = {n:>6}: rms error of log chi* = {:.4}", (sq / trials as f64).sqrt());
        }
    }
    Ok(())
}
