//! Bath Hamiltonians, coupling operators and the assembled spin + bath model.
//!
//! The full Hilbert space is ordered spin-major: index `s·d + a` with `s = 0`
//! for spin up (energy +h_S/2) and `s = 1` for spin down.

use ndarray::{s, Array1, Array2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ensembles::{sample_gre, sample_poisson_bath, DysonClass};
use crate::error::{Error, Result};
use crate::linalg::{Hermitian, Operator, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IsingBathSpec {
    pub sites: usize,
    pub h: f64,
    pub u: f64,
    pub gamma: f64,
}

impl Default for IsingBathSpec {
    fn default() -> Self {
        IsingBathSpec { sites: 10, h: 0.9045, u: 0.8090, gamma: 0.9950 }
    }
}

pub const MAX_SITES: usize = 14;

impl IsingBathSpec {
    pub fn with_sites(sites: usize) -> Self {
        IsingBathSpec { sites, ..Default::default() }
    }

    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    /// Half-width of the uniform field distribution, u·√(3(1−Γ²)).
    pub fn disorder_half_width(&self) -> f64 {
        self.u * (3.0 * (1.0 - self.gamma * self.gamma)).sqrt()
    }

    /// Spin splitting matched to a typical chain site, √(h² + u²).
    pub fn matched_splitting(&self) -> f64 {
        self.h.hypot(self.u)
    }

    /// Site m = ⌊(L+1)/2⌋ carrying the coupling (1-based).
    pub fn mid_site(&self) -> usize {
        (self.sites + 1) / 2
    }

    /// Disorder-averaged tr(H²)/2^L with open boundaries: (L−1) + L(h² + u²).
    pub fn mean_energy_variance(&self) -> f64 {
        let l = self.sites as f64;
        (l - 1.0) + l * (self.h * self.h + self.u * self.u)
    }

    fn validate(&self) -> Result<()> {
        if !(2..=MAX_SITES).contains(&self.sites) {
            return Err(Error::InvalidArgument(format!("chain length {} outside 2..={MAX_SITES}", self.sites)));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidArgument(format!("Gamma = {} outside [0, 1]", self.gamma)));
        }
        Ok(())
    }

    pub fn sample_fields<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let w = self.disorder_half_width();
        (0..self.sites).map(|_| self.h + w * (2.0 * rng.random::<f64>() - 1.0)).collect()
    }
}

/// σˣ eigenvalue (±1) of 1-based site `n` in basis state `state`.
#[inline]
fn x_value(state: usize, n: usize) -> f64 {
    if state >> (n - 1) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Disordered Ising chain in the σˣ product basis, fields drawn from `rng`.
pub fn build_ising_bath<R: Rng + ?Sized>(spec: &IsingBathSpec, rng: &mut R) -> Result<Hermitian> {
    spec.validate()?;
    let fields = spec.sample_fields(rng);
    build_ising_bath_with_fields(spec, &fields)
}

pub fn build_ising_bath_with_fields(spec: &IsingBathSpec, fields: &[f64]) -> Result<Hermitian> {
    spec.validate()?;
    let l = spec.sites;
    if fields.len() != l {
        return Err(Error::DimensionMismatch(format!("{} fields for {l} sites", fields.len())));
    }
    let d = spec.dim();
    let flip = spec.u * spec.gamma;
    let mut h = Array2::<f64>::zeros((d, d));
    for state in 0..d {
        let mut diag = 0.0;
        for n in 1..l {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            diag += sign * x_value(state, n) * x_value(state, n + 1);
        }
        for (n, hn) in (1..=l).zip(fields) {
            diag += hn * x_value(state, n);
        }
        h[[state, state]] = diag;
        if flip != 0.0 {
            for n in 0..l {
                h[[state, state ^ (1 << n)]] = flip;
            }
        }
    }
    Ok(Hermitian::Real(h))
}

/// σˣ on 1-based site `n`, diagonal in the chain basis.
pub fn sigma_x_site(sites: usize, n: usize) -> Result<Operator> {
    if n < 1 || n > sites {
        return Err(Error::InvalidArgument(format!("site {n} outside 1..={sites}")));
    }
    Ok(Operator::Diagonal((0..1usize << sites).map(|s| x_value(s, n)).collect()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    Gaussian,
    Poisson,
}

/// Which bath to sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BathSpec {
    RandomMatrix { ensemble: Ensemble, beta: DysonClass, d: usize },
    Ising(IsingBathSpec),
}

impl BathSpec {
    /// Number of distinct levels.
    pub fn levels(&self) -> usize {
        match self {
            BathSpec::RandomMatrix { d, .. } => *d,
            BathSpec::Ising(s) => s.dim(),
        }
    }

    /// Dimension of the stored matrix (2d for quaternionic baths).
    pub fn storage_dim(&self) -> usize {
        match self {
            BathSpec::RandomMatrix { beta, d, .. } => beta.storage_dim(*d),
            BathSpec::Ising(s) => s.dim(),
        }
    }

    pub fn kramers(&self) -> bool {
        matches!(self, BathSpec::RandomMatrix { beta: DysonClass::Quaternion, .. })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Hermitian> {
        match self {
            BathSpec::RandomMatrix { ensemble: Ensemble::Gaussian, beta, d } => sample_gre(*d, *beta, rng),
            BathSpec::RandomMatrix { ensemble: Ensemble::Poisson, beta, d } => sample_poisson_bath(*d, *beta, rng),
            BathSpec::Ising(spec) => build_ising_bath(spec, rng),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingKind {
    /// V = diag((−1)^j), j = 1..d
    DiagAlternating,
    /// V = σˣ on the mid-chain site
    MidChainSigmaX,
    /// V = σˣ on a given 1-based site
    SigmaXAt(usize),
}

pub fn build_coupling_operator(kind: CouplingKind, bath: &BathSpec) -> Result<Operator> {
    match (kind, bath) {
        (CouplingKind::DiagAlternating, BathSpec::RandomMatrix { d, beta, .. }) => {
            let v: Vec<f64> = (1..=*d).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
            let diag: Array1<f64> = if *beta == DysonClass::Quaternion {
                v.iter().chain(&v).copied().collect()
            } else {
                v.into()
            };
            Ok(Operator::Diagonal(diag))
        }
        (CouplingKind::MidChainSigmaX, BathSpec::Ising(s)) => sigma_x_site(s.sites, s.mid_site()),
        (CouplingKind::SigmaXAt(n), BathSpec::Ising(s)) => sigma_x_site(s.sites, n),
        (k, b) => Err(Error::InvalidArgument(format!("coupling {k:?} does not act on bath {b:?}"))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    pub j: f64,
    #[serde(default)]
    pub j_z: f64,
    pub h_s: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }
}

/// Index ↔ (spin, bath state) bookkeeping for the spin-major layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SectorMap {
    pub bath_dim: usize,
}

impl SectorMap {
    pub fn dim(&self) -> usize {
        2 * self.bath_dim
    }

    pub fn sector(&self, index: usize) -> (Spin, usize) {
        if index < self.bath_dim {
            (Spin::Up, index)
        } else {
            (Spin::Down, index - self.bath_dim)
        }
    }

    pub fn index(&self, spin: Spin, a: usize) -> usize {
        match spin {
            Spin::Up => a,
            Spin::Down => a + self.bath_dim,
        }
    }

    /// σᶻ ⊗ 1 as a diagonal.
    pub fn sigma_z(&self) -> Array1<f64> {
        (0..self.dim()).map(|i| self.sector(i).0.sign()).collect()
    }

    /// 1 ⊗ O for a diagonal bath operator.
    pub fn lift_diagonal(&self, diag: &Array1<f64>) -> Array1<f64> {
        diag.iter().chain(diag.iter()).copied().collect()
    }
}

/// H = H0 + J σˣ ⊗ V with H0 = diag(H_B + h_S/2, H_B − h_S/2).
#[derive(Clone, Debug)]
pub struct FullModel {
    pub h: Hermitian,
    pub sectors: SectorMap,
    pub coupling: CouplingSpec,
}

fn put_block<T: Clone>(dst: &mut Array2<T>, r: usize, c: usize, src: &Array2<T>) {
    let (n, m) = src.dim();
    dst.slice_mut(s![r..r + n, c..c + m]).assign(src);
}

fn dense_real(op: &Operator) -> Option<Array2<f64>> {
    match op {
        Operator::Diagonal(v) => Some(Array2::from_diag(v)),
        Operator::Dense(Hermitian::Real(m)) => Some(m.clone()),
        Operator::Dense(Hermitian::Complex(_)) => None,
    }
}

pub fn assemble_full(h_b: &Hermitian, v: &Operator, coupling: CouplingSpec) -> Result<FullModel> {
    let d = h_b.dim();
    if v.dim() != d {
        return Err(Error::DimensionMismatch(format!("bath {d} vs coupling {}", v.dim())));
    }
    if coupling.j_z != 0.0 {
        return Err(Error::InvalidArgument("longitudinal coupling J_z must be zero".into()));
    }
    let half = 0.5 * coupling.h_s;
    let j = coupling.j;
    let sectors = SectorMap { bath_dim: d };
    let h = match (h_b, dense_real(v)) {
        (Hermitian::Real(hb), Some(vr)) => {
            let mut h = Array2::<f64>::zeros((2 * d, 2 * d));
            put_block(&mut h, 0, 0, hb);
            put_block(&mut h, d, d, hb);
            for i in 0..d {
                h[[i, i]] += half;
                h[[d + i, d + i]] -= half;
            }
            if j != 0.0 {
                let jv = vr * j;
                put_block(&mut h, 0, d, &jv);
                put_block(&mut h, d, 0, &jv);
            }
            Hermitian::Real(h)
        }
        _ => {
            let hb = h_b.to_complex();
            let vc = v.to_dense().to_complex();
            let mut h = Array2::<C64>::zeros((2 * d, 2 * d));
            put_block(&mut h, 0, 0, &hb);
            put_block(&mut h, d, d, &hb);
            for i in 0..d {
                h[[i, i]] += half;
                h[[d + i, d + i]] -= half;
            }
            if j != 0.0 {
                let jv = vc * C64::new(j, 0.0);
                put_block(&mut h, 0, d, &jv);
                put_block(&mut h, d, 0, &jv);
            }
            Hermitian::Complex(h)
        }
    };
    Ok(FullModel { h, sectors, coupling })
}

impl FullModel {
    /// Decoupled part H0 rebuilt from the stored H.
    pub fn h0(&self) -> Hermitian {
        let d = self.sectors.bath_dim;
        match &self.h {
            Hermitian::Real(m) => {
                let mut h0 = m.clone();
                h0.slice_mut(s![..d, d..]).fill(0.0);
                h0.slice_mut(s![d.., ..d]).fill(0.0);
                Hermitian::Real(h0)
            }
            Hermitian::Complex(m) => {
                let mut h0 = m.clone();
                h0.slice_mut(s![..d, d..]).fill(C64::new(0.0, 0.0));
                h0.slice_mut(s![d.., ..d]).fill(C64::new(0.0, 0.0));
                Hermitian::Complex(h0)
            }
        }
    }

    /// σˣ ⊗ V on the full space.
    pub fn v_full(&self, v: &Operator) -> Hermitian {
        let d = self.sectors.bath_dim;
        match dense_real(v) {
            Some(vr) => {
                let mut m = Array2::<f64>::zeros((2 * d, 2 * d));
                put_block(&mut m, 0, d, &vr);
                put_block(&mut m, d, 0, &vr);
                Hermitian::Real(m)
            }
            None => {
                let vc = v.to_dense().to_complex();
                let mut m = Array2::<C64>::zeros((2 * d, 2 * d));
                put_block(&mut m, 0, d, &vc);
                put_block(&mut m, d, 0, &vc);
                Hermitian::Complex(m)
            }
        }
    }
}

/// Warns unless 1/ρ0 < h_S < s_E.
pub fn hierarchy_warning(rho0: f64, h_s: f64, s_e: f64) -> Option<String> {
    if 1.0 / rho0 < h_s && h_s < s_e {
        None
    } else {
        Some(format!("energy hierarchy violated: 1/rho0 = {:.3e}, h_S = {h_s}, s_E = {s_e}", 1.0 / rho0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::spectra::diagonalize;

    #[test]
    fn disorder_width_and_splitting() {
        let s = IsingBathSpec::default();
        assert!((s.disorder_half_width() - 0.1401).abs() < 1e-3);
        assert!((s.matched_splitting() - 1.2135).abs() < 1e-3);
        assert_eq!(IsingBathSpec::with_sites(5).mid_site(), 3);
    }

    #[test]
    fn single_bond_spectrum() {
        let spec = IsingBathSpec { sites: 2, h: 0.0, u: 0.0, gamma: 1.0 };
        let h = build_ising_bath_with_fields(&spec, &[0.0, 0.0]).unwrap();
        let e = diagonalize(h).unwrap().energies;
        assert_eq!(e, vec![-1.0, -1.0, 1.0, 1.0]);
    }

    #[test]
    fn clean_chain_trace_identity() {
        let spec = IsingBathSpec { sites: 12, gamma: 1.0, ..Default::default() };
        let h = build_ising_bath_with_fields(&spec, &[spec.h; 12]).unwrap();
        let expected = 11.0 + 12.0 * (spec.h * spec.h + spec.u * spec.u);
        assert!((h.frobenius_sq() / 4096.0 - expected).abs() < 1e-6);
        assert!((spec.mean_energy_variance() - expected).abs() < 1e-12);
    }

    #[test]
    fn chain_length_is_bounded() {
        let mut rng = stream(0, 0);
        assert!(build_ising_bath(&IsingBathSpec::with_sites(1), &mut rng).is_err());
        assert!(build_ising_bath(&IsingBathSpec::with_sites(15), &mut rng).is_err());
    }

    #[test]
    fn coupling_operators() {
        let rm = BathSpec::RandomMatrix { ensemble: Ensemble::Gaussian, beta: DysonClass::Real, d: 4 };
        let Operator::Diagonal(v) = build_coupling_operator(CouplingKind::DiagAlternating, &rm).unwrap() else {
            panic!()
        };
        assert_eq!(v.to_vec(), vec![-1.0, 1.0, -1.0, 1.0]);
        assert_eq!(v.sum(), 0.0);
        let chain = BathSpec::Ising(IsingBathSpec::with_sites(5));
        let Operator::Diagonal(x) = build_coupling_operator(CouplingKind::MidChainSigmaX, &chain).unwrap() else {
            panic!()
        };
        assert!(x.iter().all(|v| v * v == 1.0));
        assert!((x.iter().map(|v| v * v).sum::<f64>() / 32.0 - 1.0).abs() < 1e-12);
        assert!(build_coupling_operator(CouplingKind::MidChainSigmaX, &rm).is_err());
        assert!(build_coupling_operator(CouplingKind::DiagAlternating, &chain).is_err());
    }

    #[test]
    fn two_level_closed_form() {
        let hb = Hermitian::Real(Array2::zeros((1, 1)));
        let v = Operator::Diagonal(Array1::ones(1));
        let m = assemble_full(&hb, &v, CouplingSpec { j: 0.5, j_z: 0.0, h_s: 1.0 }).unwrap();
        let Hermitian::Real(h) = &m.h else { panic!() };
        assert_eq!(h, &ndarray::array![[0.5, 0.5], [0.5, -0.5]]);
        let e = diagonalize(m.h.clone()).unwrap().energies;
        assert!((e[1] - 0.5f64.sqrt()).abs() < 1e-14 && (e[0] + 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn decoupled_spectrum_is_shifted_bath() {
        let mut rng = stream(1, 0);
        let spec = IsingBathSpec::with_sites(5);
        let hb = build_ising_bath(&spec, &mut rng).unwrap();
        let v = sigma_x_site(5, 3).unwrap();
        let m = assemble_full(&hb, &v, CouplingSpec { j: 0.0, j_z: 0.0, h_s: 1.21 }).unwrap();
        let bath = diagonalize(hb).unwrap().energies;
        let mut expected: Vec<f64> = bath.iter().flat_map(|e| [e + 0.605, e - 0.605]).collect();
        expected.sort_by(f64::total_cmp);
        let e = diagonalize(m.h).unwrap().energies;
        for (a, b) in e.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn coupled_chain_is_hermitian_and_traceless_coupling() {
        let mut rng = stream(2, 0);
        let spec = IsingBathSpec::with_sites(8);
        let hb = build_ising_bath(&spec, &mut rng).unwrap();
        let v = sigma_x_site(8, spec.mid_site()).unwrap();
        let m = assemble_full(&hb, &v, CouplingSpec { j: 0.1, j_z: 0.0, h_s: spec.matched_splitting() }).unwrap();
        assert!(m.h.hermiticity_error() < 1e-12);
        assert!((m.h.trace() - m.h0().trace()).abs() < 1e-9);
        // spin-diagonal blocks of the coupling vanish
        let Hermitian::Real(vf) = m.v_full(&v) else { panic!() };
        assert!(vf.slice(s![..256, ..256]).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn nonzero_longitudinal_coupling_is_rejected() {
        let hb = Hermitian::Real(Array2::zeros((2, 2)));
        let v = Operator::Diagonal(Array1::ones(2));
        assert!(assemble_full(&hb, &v, CouplingSpec { j: 0.1, j_z: 0.1, h_s: 1.0 }).is_err());
    }
}
