//! Closed-form theory at a glance: weak-coupling slopes and limits of the
//! entropy, plateau, ΔS and off-diagonal distributions.

use partherm::bath_probe::{delta_s_theory, f_od_cdf, f_od_conditional_variance, f_od_mass_within, Parity};
use partherm::dynamics::czz_infinite_theory;
use partherm::fidelity::{ChiStarProfile, DistributionModel, Family};
use partherm::numerics::ks_distance_cdfs;
use partherm::resonance::{c_a, c_v, ee_moments};
use statrs::distribution::{ContinuousCDF, Normal};
use std::f64::consts::PI;

fn main() -> partherm::Result<()> {
    let levy = DistributionModel::levy(1.0)?;
    let goe = DistributionModel::new(Family::Goe, 1.0)?;
    println!("c_v = {:.6}", c_v()?);
    for g in [1e-5, 1e-4, 1e-3, 0.1] {
        let m = ee_moments(g, &goe)?;
        println!(
            "g = {g:e}: mean/g = {:.5} (2π = {:.5}), var/g = {:.5}, mean/median = {:.1}",
            m.mean / g,
            2.0 * PI,
            m.variance / g,
            m.mean / m.median
        );
    }
    println!("c_a(Levy) = {:.5}, c_a(GOE) = {:.5}", c_a(&levy)?, c_a(&goe)?);

    let profile = ChiStarProfile::EthGaussian { chi0: 1.0, s_e: 1.0 };
    for g in [1e-5, 1e-4, 1e-3, 0.03, 0.1, 0.3, 1.0] {
        let c = czz_infinite_theory(g, 1.0, &profile, Family::Goe)?;
        println!("plateau g = {g:e}: C = {c:.6}, (1 - C)/g = {:.4} (4π/√6 = {:.4})", (1.0 - c) / g, 4.0 * PI / 6f64.sqrt());
    }

    for g in [1e-5, 1e-4, 1e-3, 0.1, 1.0, 1e3] {
        let ds = delta_s_theory(g, Family::Goe)?;
        println!("ΔS(g = {g:e}) = {ds:.6}, ratio to -8g log g = {:.4}", ds / (-8.0 * g * g.ln()));
    }

    let mass = f_od_mass_within(1e-3, 1e-3, Family::Goe, Parity::Mixed)?;
    let var = f_od_conditional_variance(1e-3, 1e-3, Family::Goe, Parity::Mixed)?;
    println!("f_OD at g = 1e-3: mass in |R| < 1e-3 = {mass:.5}, conditional variance = {var:.5}");
    let normal = Normal::new(0.0, 1.0).unwrap();
    let grid: Vec<f64> = (0..=120).map(|k| -6.0 + 0.1 * k as f64).collect();
    let ks = ks_distance_cdfs(&grid, |r| f_od_cdf(r, 30.0, Family::Goe, Parity::Mixed).unwrap_or(f64::NAN), |r| normal.cdf(r));
    println!("f_OD at g = 30: KS vs N(0,1) = {ks:.5}");
    Ok(())
}
