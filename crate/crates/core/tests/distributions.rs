use std::f64::consts::PI;

use partherm::fidelity::{estimate_chi_star, DistributionModel, Family};
use partherm::numerics::{integrate, ks_distance, QuadOptions};
use partherm::rng::stream;
use proptest::prelude::*;

/// Closed forms written directly in χ, for comparison with the library's
/// s-axis evaluation.
fn oracle_pdf(family: Family, chi: f64, chi_star: f64, c1: f64, c2: f64) -> f64 {
    let u = chi_star / chi;
    let base = (chi_star / chi.powi(3)).sqrt();
    match family {
        Family::Levy => (-PI * u).exp() * base,
        Family::Gue => (-4.0 * PI * u).exp() * base * (1.0 + 8.0 * PI * u),
        Family::Goe => (-PI.powi(3) * u / 4.0).exp() * base * (1.0 + c1 * u.sqrt() + c2 * u),
        Family::Gse => (-64.0 * PI * u / 9.0).exp() * base * (1.0 + c1 * u + c2 * u * u),
    }
}

/// ∫ e^{−au} u^{−1/2}(1 + c1 u^{k/2} + c2 u^k) du in closed form (k = 1 or 2).
fn oracle_mass(family: Family, c1: f64, c2: f64) -> f64 {
    let a = match family {
        Family::Levy => PI,
        Family::Gue => 4.0 * PI,
        Family::Goe => PI.powi(3) / 4.0,
        Family::Gse => 64.0 * PI / 9.0,
    };
    let g0 = (PI / a).sqrt();
    match family {
        Family::Levy => g0,
        Family::Gue => g0 + 8.0 * PI * g0 / (2.0 * a),
        Family::Goe => g0 + c1 / a + c2 * g0 / (2.0 * a),
        Family::Gse => g0 * (1.0 + c1 / (2.0 * a) + 3.0 * c2 / (4.0 * a * a)),
    }
}

fn models() -> Vec<DistributionModel> {
    vec![
        DistributionModel::levy(1.0).unwrap(),
        DistributionModel::new(Family::Gue, 1.0).unwrap(),
        DistributionModel::new(Family::Goe, 1.0).unwrap(),
        DistributionModel::new(Family::Gse, 1.0).unwrap(),
    ]
}

#[test]
fn pdf_matches_direct_closed_form() {
    for m in models() {
        for chi in [1e-2, 0.1, 0.7, 1.0, 3.0, 40.0, 1e4] {
            let want = oracle_pdf(m.family, chi, 2.5, m.c1, m.c2);
            let got = m.with_scale(2.5).unwrap().pdf(chi).unwrap();
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1e-300), "{:?} {chi}: {got} vs {want}", m.family);
        }
    }
}

#[test]
fn frozen_constants_normalize_analytically() {
    for m in models() {
        let mass = oracle_mass(m.family, m.c1, m.c2);
        assert!((mass - 1.0).abs() < 1e-12, "{:?}: {mass}", m.family);
    }
}

#[test]
fn published_goe_pair_is_not_normalized() {
    let mass = oracle_mass(Family::Goe, 5.29, 11.19);
    assert!((mass - 1.78).abs() < 0.01, "{mass}");
    assert!(DistributionModel::with_constants(Family::Goe, 1.0, 5.29, 11.19).is_err());
}

#[test]
fn pdfs_integrate_to_one_in_chi() {
    // plain quadrature on a log grid, independent of the library's s-axis rule
    let opts = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-12, max_intervals: 4000 };
    for m in models() {
        let f = |t: f64| {
            let chi = t.exp();
            chi * m.pdf(chi).unwrap()
        };
        let breaks: Vec<f64> = (-60..=180).map(|k| k as f64 * 0.5).collect();
        let total = integrate(f, &breaks, opts).unwrap().value;
        // analytic remainder of the √(χ*/χ³) tail beyond e^90
        let tail = 2.0 * (-45f64).exp();
        assert!((total + tail - 1.0).abs() < 1e-6, "{:?}: {total}", m.family);
        assert!((m.total_mass() - 1.0).abs() < 1e-6);
    }
}

#[test]
fn samplers_follow_their_cdf() {
    for m in models() {
        let xs = m.sample(&mut stream(11, m.family as u64), 20_000);
        let ks = ks_distance(&xs, |x| m.cdf(x));
        assert!(ks < 0.015, "{:?}: KS {ks}", m.family);
    }
}

#[test]
fn upper_tail_follows_power_law() {
    for m in models() {
        let chi = 1e8;
        let ratio = m.pdf(chi).unwrap() / (1.0 / chi.powf(1.5));
        assert!((ratio - 1.0).abs() < 1e-3, "{:?}: {ratio}", m.family);
    }
}

#[test]
fn estimator_error_shrinks_with_sample_size() {
    let model = DistributionModel::levy(1.0).unwrap();
    let sampler = model.sampler();
    let mut last = f64::INFINITY;
    for (k, n) in [1_000usize, 10_000, 100_000, 1_000_000].into_iter().enumerate() {
        let mut sq = 0.0;
        for t in 0..100u64 {
            let mut rng = stream(77 + k as u64, t);
            let xs: Vec<f64> = (0..n).map(|_| sampler.draw(&mut rng)).collect();
            let e = estimate_chi_star(&xs, None).unwrap();
            sq += e * e;
        }
        let rms = (sq / 100.0).sqrt();
        assert!(rms < last, "N = {n}: RMS {rms} after {last}");
        last = rms;
    }
}

#[test]
fn self_averaging_single_realization() {
    use partherm::ensembles::DysonClass;
    use partherm::fidelity::ChiStarProfile;
    use partherm::harness::pipelines::sample_bath;
    use partherm::models::{BathSpec, CouplingKind, Ensemble};
    let d = 2048;
    let spec = BathSpec::RandomMatrix { ensemble: Ensemble::Gaussian, beta: DysonClass::Real, d };
    let profile = ChiStarProfile::Semicircle { beta: DysonClass::Real, d };
    let bath = sample_bath(&spec, CouplingKind::DiagAlternating, &mut stream(5, 0)).unwrap();
    let ratios: Vec<f64> = bath
        .chi_samples(0.1, 0.25)
        .unwrap()
        .iter()
        .map(|c| c.chi / profile.chi_star(c.energy, c.sigma as f64 * 0.1).unwrap())
        .collect();
    let model = DistributionModel::new(Family::Goe, 1.0).unwrap();
    let ks = ks_distance(&ratios, |x| model.cdf(x));
    assert!(ks < 0.05, "KS {ks}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scale_family(chi in 1e-3f64..1e4, fam in 0usize..4) {
        let m = &models()[fam];
        let a = m.with_scale(3.0).unwrap().pdf(chi).unwrap();
        let b = m.pdf(chi / 3.0).unwrap() / 3.0;
        prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1e-300));
    }

    #[test]
    fn quantile_inverts_cdf(q in 1e-6f64..(1.0 - 1e-6), fam in 0usize..4) {
        let m = &models()[fam];
        let x = m.quantile(q).unwrap();
        prop_assert!((m.cdf(x) - q).abs() < 1e-8);
    }

    #[test]
    fn estimator_is_scale_equivariant(k in 0.01f64..100.0, seed in 0u64..1000) {
        let xs = DistributionModel::levy(1.0).unwrap().sample(&mut stream(seed, 0), 2000);
        let scaled: Vec<f64> = xs.iter().map(|x| x * k).collect();
        let shift = estimate_chi_star(&scaled, None).unwrap() - estimate_chi_star(&xs, None).unwrap();
        prop_assert!((shift - k.ln()).abs() < 1e-10);
    }
}
