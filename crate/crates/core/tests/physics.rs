use ndarray::array;
use partherm::dynamics::{czz_infinite_exact, Correlator};
use partherm::ensembles::{sample_gre, semicircle_cdf, DysonClass};
use partherm::fidelity::DistributionModel;
use partherm::models::{assemble_full, build_coupling_operator, build_ising_bath_with_fields, BathSpec, CouplingKind, CouplingSpec, Ensemble, IsingBathSpec};
use partherm::numerics::{integrate, ks_distance, QuadOptions};
use partherm::resonance::{cat_entropy, f_ee_pdf, transition_p, x_of_entropy};
use partherm::rng::stream;
use partherm::spectra::diagonalize;
use partherm::{Hermitian, Operator};

fn sum_sq(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x * x).sum()
}

#[test]
fn ising_spectrum_moments() {
    let spec = IsingBathSpec::with_sites(7);
    let fields = spec.sample_fields(&mut stream(3, 0));
    let eig = diagonalize(build_ising_bath_with_fields(&spec, &fields).unwrap()).unwrap();
    let d = spec.dim() as f64;
    // every term is a traceless Pauli string; the squares give the second moment
    let flip = spec.u * spec.gamma;
    let tr2 = (spec.sites - 1) as f64 + sum_sq(&fields) + spec.sites as f64 * flip * flip;
    assert!((eig.energies.iter().sum::<f64>() / d).abs() < 1e-10);
    assert!((sum_sq(&eig.energies) / d - tr2).abs() < 1e-9);
}

#[test]
fn gaussian_spectra_follow_the_semicircle() {
    for beta in [DysonClass::Real, DysonClass::Complex, DysonClass::Quaternion] {
        let h = sample_gre(300, beta, &mut stream(9, beta.beta() as u64)).unwrap();
        let mut eig = diagonalize(h).unwrap();
        if beta == DysonClass::Quaternion {
            eig = eig.with_kramers_pairs();
            for k in (0..eig.dim()).step_by(2) {
                assert!((eig.energies[k + 1] - eig.energies[k]).abs() < 1e-10);
            }
        }
        let levels = eig.levels();
        assert_eq!(levels.len(), 300);
        let ks = ks_distance(&levels, semicircle_cdf);
        assert!(ks < 0.03, "beta {}: KS {ks}", beta.beta());
    }
}

#[test]
fn coupled_model_trace_identities() {
    let spec = BathSpec::RandomMatrix { ensemble: Ensemble::Gaussian, beta: DysonClass::Complex, d: 64 };
    let hb = spec.sample(&mut stream(4, 0)).unwrap();
    let v = build_coupling_operator(CouplingKind::DiagAlternating, &spec).unwrap();
    let (j, h_s) = (0.3, 0.7);
    let bath = diagonalize(hb.clone()).unwrap();
    let full = assemble_full(&hb, &v, CouplingSpec { j, j_z: 0.0, h_s }).unwrap();
    let eig = diagonalize(full.h).unwrap();
    // σˣ⊗V is traceless; Tr H² picks up h_S²/4 per state and J²Tr V² per sector
    let tr1: f64 = bath.energies.iter().sum::<f64>() * 2.0;
    let tr2 = 2.0 * sum_sq(&bath.energies) + 64.0 * h_s * h_s / 2.0 + 2.0 * j * j * 64.0;
    assert!((eig.energies.iter().sum::<f64>() - tr1).abs() < 1e-9);
    assert!((sum_sq(&eig.energies) - tr2).abs() < 1e-8);
}

#[test]
fn spin_correlator_bounds() {
    let spec = IsingBathSpec::with_sites(5);
    let hb = build_ising_bath_with_fields(&spec, &spec.sample_fields(&mut stream(6, 1))).unwrap();
    let v = build_coupling_operator(CouplingKind::MidChainSigmaX, &BathSpec::Ising(spec)).unwrap();
    let full = assemble_full(&hb, &v, CouplingSpec { j: 0.4, j_z: 0.0, h_s: spec.matched_splitting() }).unwrap();
    let sectors = full.sectors;
    let eig = diagonalize(full.h).unwrap();
    let c = Correlator::new(&eig, sectors).unwrap();
    assert!((c.at(0.0) - 1.0).abs() < 1e-12);
    for t in [0.3, 2.0, 17.0, 400.0] {
        assert!(c.at(t).abs() <= 1.0 + 1e-12);
        assert!((c.at(t) - c.at(-t)).abs() < 1e-12);
    }
    let plateau = czz_infinite_exact(&eig, sectors).unwrap().value;
    assert!(plateau > 0.0 && plateau < 1.0, "{plateau}");
    let sz: f64 = eig.diagonal_expectations(sectors.sigma_z().view()).iter().sum();
    assert!(sz.abs() < 1e-10);
}

#[test]
fn coupling_weights_sum_to_v_squared() {
    let spec = BathSpec::RandomMatrix { ensemble: Ensemble::Gaussian, beta: DysonClass::Real, d: 128 };
    let eig = diagonalize(spec.sample(&mut stream(8, 0)).unwrap()).unwrap();
    let v = build_coupling_operator(CouplingKind::DiagAlternating, &spec).unwrap();
    let w = eig.abs2_elements(&v).unwrap();
    for row in w.rows() {
        assert!((row.sum() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn cat_state_matches_two_level_problem() {
    let h = 0.8;
    for j in [1e-3, 0.05, 0.4, 3.0] {
        let eig = diagonalize(Hermitian::Real(array![[h / 2.0, j], [j, -h / 2.0]])).unwrap();
        // weight of the lower-energy bare state in the upper eigenvector
        let p = eig.vector(1)[1].norm_sqr();
        let x = j * j / (h * h);
        assert!((transition_p(x).unwrap() - p).abs() < 1e-12);
        let s = -p * p.ln() - (1.0 - p) * (1.0 - p).ln();
        assert!((cat_entropy(x).unwrap() - s).abs() < 1e-12);
        assert!((x_of_entropy(s).unwrap() / x - 1.0).abs() < 1e-8);
    }
}

#[test]
fn entropy_density_matches_susceptibility_cdf() {
    let dist = DistributionModel::levy(1.0).unwrap();
    let j = 0.1;
    let opts = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 2000 };
    for (s1, s2) in [(1e-4, 0.01), (0.01, 0.3), (0.3, 0.69)] {
        let mass = integrate(|s| f_ee_pdf(s, j, &dist).unwrap(), &[s1, s2], opts).unwrap().value;
        let (x1, x2) = (x_of_entropy(s1).unwrap(), x_of_entropy(s2).unwrap());
        let want = dist.cdf(x2 / (j * j)) - dist.cdf(x1 / (j * j));
        assert!((mass - want).abs() < 1e-8, "[{s1}, {s2}]: {mass} vs {want}");
    }
}

#[test]
fn coupling_dimension_is_checked() {
    let hb = Hermitian::Real(ndarray::Array2::eye(4));
    let v = Operator::Diagonal(ndarray::Array1::ones(3));
    assert!(assemble_full(&hb, &v, CouplingSpec { j: 0.1, j_z: 0.0, h_s: 1.0 }).is_err());
}
