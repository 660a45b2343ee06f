//! Fidelity susceptibilities and the analytic family of their distributions.
//!
//! Every density is handled on the axis s = 2√(χ*/χ), where it takes the
//! form e^{−bs²}·P(s) with a low-order polynomial P. Normalization, CDFs,
//! quantiles and expectations are all computed there.

use std::f64::consts::{E, PI};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erf, erfc};

use crate::ensembles::{semicircle_density, DysonClass};
use crate::error::{Error, Result};
use crate::linalg::Operator;
use crate::numerics::{bisect_newton, integrate_s_axis, minimize_golden, Estimate, QuadOptions, S_MAX};
use crate::spectra::EigenSystem;

/// χ for one unperturbed state (σ, a).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSample {
    pub sigma: i8,
    pub index: usize,
    pub energy: f64,
    pub chi: f64,
}

fn check_denominator(den: f64, scale: f64, a: usize, b: usize) -> Result<()> {
    if den.abs() <= 1e-12 * scale.max(1.0) {
        Err(Error::DegenerateResonance { a, b })
    } else {
        Ok(())
    }
}

/// χ = Σ_b |V_ab|² / (E_a − E_b + σh)² for a single bath state.
pub fn chi_alpha(bath: &EigenSystem, v: &Operator, a: usize, sigma_h: f64) -> Result<ChiSample> {
    if a >= bath.dim() {
        return Err(Error::InvalidArgument(format!("state {a} outside spectrum of size {}", bath.dim())));
    }
    let all: Vec<usize> = (0..bath.dim()).collect();
    let w = bath.abs2_block(v, &[a], &all)?;
    let ea = bath.energies[a];
    let mut chi = 0.0;
    for (b, &eb) in bath.energies.iter().enumerate() {
        if w[[0, b]] == 0.0 {
            continue;
        }
        let den = ea - eb + sigma_h;
        check_denominator(den, ea.abs(), a, b)?;
        chi += w[[0, b]] / (den * den);
    }
    let sigma = if sigma_h >= 0.0 { 1 } else { -1 };
    Ok(ChiSample { sigma, index: a, energy: ea, chi })
}

/// χ for both spin sectors of every listed bath state, from one element block.
pub fn susceptibilities(bath: &EigenSystem, v: &Operator, states: &[usize], h_s: f64) -> Result<Vec<ChiSample>> {
    let all: Vec<usize> = (0..bath.dim()).collect();
    let w = bath.abs2_block(v, states, &all)?;
    let mut out = Vec::with_capacity(2 * states.len());
    for (r, &a) in states.iter().enumerate() {
        let ea = bath.energies[a];
        for sigma in [1i8, -1] {
            let sh = sigma as f64 * h_s;
            let mut chi = 0.0;
            for (b, &eb) in bath.energies.iter().enumerate() {
                // structurally zero elements never resonate
                if w[[r, b]] == 0.0 {
                    continue;
                }
                let den = ea - eb + sh;
                check_denominator(den, ea.abs(), a, b)?;
                chi += w[[r, b]] / (den * den);
            }
            out.push(ChiSample { sigma, index: a, energy: ea, chi });
        }
    }
    Ok(out)
}

/// c_β = [|V|]²·d for Gaussian elements of the given symmetry class.
pub fn c_beta(beta: u8) -> Result<f64> {
    match beta {
        1 => Ok(2.0 / PI),
        2 => Ok(PI / 4.0),
        4 => Ok(9.0 * PI / 32.0),
        b => Err(Error::InvalidBeta(b)),
    }
}

/// Gaussian density of states ρ0·exp(−E²/2s_E²) with ρ0 = d/√(2π s_E²).
pub fn gaussian_dos(e: f64, dim: f64, s_e: f64) -> f64 {
    dim / (2.0 * PI * s_e * s_e).sqrt() * (-e * e / (2.0 * s_e * s_e)).exp()
}

/// χ*(E, ω) in one of three parameterizations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChiStarProfile {
    /// c_β ρ(E+ω)²/d with the semicircle ρ
    Semicircle { beta: DysonClass, d: usize },
    /// χ*(0, ±h_S)·ρ(E)/ρ(0) with a Gaussian DOS of width s_e
    EthGaussian { chi0: f64, s_e: f64 },
    Constant { chi_star: f64 },
}

impl ChiStarProfile {
    /// ETH profile anchored at c_β·ṽ(0,h_S)·ρ(h_S).
    pub fn eth_from_measured(beta: u8, v_tilde: f64, rho_target: f64, s_e: f64) -> Result<Self> {
        Ok(ChiStarProfile::EthGaussian { chi0: c_beta(beta)? * v_tilde * rho_target, s_e })
    }

    pub fn chi_star(&self, e: f64, omega: f64) -> Result<f64> {
        match *self {
            ChiStarProfile::Semicircle { beta, d } => {
                let target = e + omega;
                if target.abs() > 2.0 {
                    return Err(Error::OutOfBand(target));
                }
                let rho = semicircle_density(target, d as f64);
                Ok(c_beta(beta.beta())? * rho * rho / d as f64)
            }
            ChiStarProfile::EthGaussian { chi0, s_e } => Ok(chi0 * (-e * e / (2.0 * s_e * s_e)).exp()),
            ChiStarProfile::Constant { chi_star } => Ok(chi_star),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Levy,
    Gue,
    Goe,
    Gse,
}

impl Family {
    /// Family matching a Gaussian bath of the given class.
    pub fn gaussian(beta: DysonClass) -> Family {
        match beta {
            DysonClass::Real => Family::Goe,
            DysonClass::Complex => Family::Gue,
            DysonClass::Quaternion => Family::Gse,
        }
    }

    /// Coefficient κ in log f ~ −κχ*/χ at small χ.
    pub fn lower_tail_coefficient(self) -> f64 {
        match self {
            Family::Levy => PI,
            Family::Gue => 4.0 * PI,
            Family::Goe => PI.powi(3) / 4.0,
            Family::Gse => 64.0 * PI / 9.0,
        }
    }

    fn b(self) -> f64 {
        self.lower_tail_coefficient() / 4.0
    }

    /// Whether the family carries a free constant.
    pub fn is_fitted(self) -> bool {
        matches!(self, Family::Goe | Family::Gse)
    }

    /// Second constant fixed by normalization given the first.
    pub fn c2_from_c1(self, c1: f64) -> f64 {
        match self {
            Family::Goe => ((PI - 2.0) * PI.powi(3) - 4.0 * PI * c1) / 4.0,
            Family::Gse => (0.625 - 27.0 * c1 / (1024.0 * PI)) * 131072.0 * PI * PI / 729.0,
            Family::Levy | Family::Gue => 0.0,
        }
    }

    /// Range of the first constant for which the density stays non-negative.
    pub fn admissible_c1(self) -> (f64, f64) {
        // P = 1 + c1·t + c2(c1)·t² with t = √u (GOE) or t = u (GSE); need c2 ≥ 0
        // and, for c1 < 0, c1² ≤ 4c2. c2 is affine in c1: c2 = p + q·c1.
        let p = self.c2_from_c1(0.0);
        let q = self.c2_from_c1(1.0) - p;
        let hi = -p / q;
        // c1² − 4q·c1 − 4p = 0, negative root
        let lo = 2.0 * q - (4.0 * q * q + 4.0 * p).sqrt();
        (lo, hi)
    }
}

/// Frozen fit constants, versioned in `data/fs_constants.toml`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FsConstants {
    pub version: u32,
    pub goe_c1: f64,
    pub goe_c2: f64,
    pub gse_c1: f64,
    pub gse_c2: f64,
    pub provenance: String,
}

const FROZEN: &str = include_str!("../data/fs_constants.toml");

impl FsConstants {
    pub fn frozen() -> &'static FsConstants {
        static CELL: std::sync::OnceLock<FsConstants> = std::sync::OnceLock::new();
        CELL.get_or_init(|| FsConstants::parse(FROZEN).expect("bundled constants file is valid"))
    }

    pub fn parse(text: &str) -> Result<FsConstants> {
        let c: FsConstants = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for (family, c1, c2) in [(Family::Goe, c.goe_c1, c.goe_c2), (Family::Gse, c.gse_c1, c.gse_c2)] {
            let want = family.c2_from_c1(c1);
            if (c2 - want).abs() > 1e-9 * want.abs().max(1.0) {
                return Err(Error::Config(format!("{family:?} constants ({c1}, {c2}) violate normalization")));
            }
        }
        Ok(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("constants serialize")
    }

    pub fn c1(&self, family: Family) -> f64 {
        match family {
            Family::Goe => self.goe_c1,
            Family::Gse => self.gse_c1,
            _ => 0.0,
        }
    }
}

/// An analytic f_FS with its scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionModel {
    pub family: Family,
    pub chi_star: f64,
    pub c1: f64,
    pub c2: f64,
}

/// ∫ s^k e^{−bs²} over [0, s0] (lower) and [s0, ∞) (upper), k = 0..=4.
fn incomplete_moments(b: f64, s0: f64) -> ([f64; 5], [f64; 5]) {
    let g = (-b * s0 * s0).exp();
    let rb = b.sqrt();
    let mut lo = [0.0; 5];
    let mut up = [0.0; 5];
    lo[0] = 0.5 * (PI / b).sqrt() * erf(rb * s0);
    up[0] = 0.5 * (PI / b).sqrt() * erfc(rb * s0);
    lo[1] = -(-b * s0 * s0).exp_m1() / (2.0 * b);
    up[1] = g / (2.0 * b);
    for k in 2..5 {
        let boundary = s0.powi(k as i32 - 1) * g / (2.0 * b);
        let rec = (k as f64 - 1.0) / (2.0 * b);
        lo[k] = -boundary + rec * lo[k - 2];
        up[k] = boundary + rec * up[k - 2];
    }
    (lo, up)
}

impl DistributionModel {
    /// Model with the bundled constants for fitted families.
    pub fn new(family: Family, chi_star: f64) -> Result<Self> {
        Self::with_c1(family, chi_star, FsConstants::frozen().c1(family))
    }

    /// Model with an explicit first constant; the second follows from normalization.
    pub fn with_c1(family: Family, chi_star: f64, c1: f64) -> Result<Self> {
        Self::with_constants(family, chi_star, c1, family.c2_from_c1(c1))
    }

    /// Rejects constants that break normalization or positivity.
    pub fn with_constants(family: Family, chi_star: f64, c1: f64, c2: f64) -> Result<Self> {
        if !(chi_star > 0.0 && chi_star.is_finite()) {
            return Err(Error::InvalidArgument(format!("chi_star must be positive, got {chi_star}")));
        }
        let (c1, c2) = if family.is_fitted() { (c1, c2) } else { (0.0, 0.0) };
        let m = DistributionModel { family, chi_star, c1, c2 };
        if family.is_fitted() {
            let (lo, hi) = family.admissible_c1();
            if c1 < lo - 1e-12 || c1 > hi + 1e-12 {
                return Err(Error::InvalidArgument(format!("{family:?} constant C1 = {c1} makes the density negative")));
            }
            let mass = m.total_mass();
            if (mass - 1.0).abs() > 1e-9 {
                return Err(Error::NotNormalized(mass));
            }
        }
        Ok(m)
    }

    pub fn levy(chi_star: f64) -> Result<Self> {
        Self::new(Family::Levy, chi_star)
    }

    pub fn with_scale(&self, chi_star: f64) -> Result<Self> {
        Self::with_constants(self.family, chi_star, self.c1, self.c2)
    }

    /// Coefficients of P(s) = Σ a_k s^k.
    fn poly(&self) -> [f64; 5] {
        match self.family {
            Family::Levy => [1.0, 0.0, 0.0, 0.0, 0.0],
            Family::Gue => [1.0, 0.0, 2.0 * PI, 0.0, 0.0],
            Family::Goe => [1.0, self.c1 / 2.0, self.c2 / 4.0, 0.0, 0.0],
            Family::Gse => [1.0, 0.0, self.c1 / 4.0, 0.0, self.c2 / 16.0],
        }
    }

    fn b(&self) -> f64 {
        self.family.b()
    }

    /// Closed-form ∫ pdf_S ds.
    pub fn total_mass(&self) -> f64 {
        let (_, up) = incomplete_moments(self.b(), 0.0);
        self.poly().iter().zip(up).map(|(a, t)| a * t).sum()
    }

    pub fn s_of_chi(&self, chi: f64) -> f64 {
        2.0 * (self.chi_star / chi).sqrt()
    }

    pub fn chi_of_s(&self, s: f64) -> f64 {
        4.0 * self.chi_star / (s * s)
    }

    /// Density of s = 2√(χ*/χ).
    pub fn pdf_s(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let p = self.poly();
        let poly = p[0] + s * (p[1] + s * (p[2] + s * (p[3] + s * p[4])));
        (-self.b() * s * s).exp() * poly
    }

    pub fn pdf(&self, chi: f64) -> Result<f64> {
        if !(chi > 0.0) {
            return Err(Error::InvalidArgument(format!("chi must be positive, got {chi}")));
        }
        let s = self.s_of_chi(chi);
        Ok(self.pdf_s(s) * s * s * s / (8.0 * self.chi_star))
    }

    pub fn log_pdf(&self, chi: f64) -> Result<f64> {
        if !(chi > 0.0) {
            return Err(Error::InvalidArgument(format!("chi must be positive, got {chi}")));
        }
        let s = self.s_of_chi(chi);
        let p = self.poly();
        let poly = p[0] + s * (p[1] + s * (p[2] + s * (p[3] + s * p[4])));
        Ok(-self.b() * s * s + poly.ln() + 3.0 * s.ln() - (8.0 * self.chi_star).ln())
    }

    /// P(X ≤ χ).
    pub fn cdf(&self, chi: f64) -> f64 {
        if chi <= 0.0 {
            return 0.0;
        }
        let (_, up) = incomplete_moments(self.b(), self.s_of_chi(chi));
        self.poly().iter().zip(up).map(|(a, t)| a * t).sum::<f64>().clamp(0.0, 1.0)
    }

    /// P(X > χ), accurate deep in the tail.
    pub fn sf(&self, chi: f64) -> f64 {
        if chi <= 0.0 {
            return 1.0;
        }
        let (lo, _) = incomplete_moments(self.b(), self.s_of_chi(chi));
        self.poly().iter().zip(lo).map(|(a, l)| a * l).sum::<f64>().clamp(0.0, 1.0)
    }

    /// P(S ≥ s) as a function of s, with its derivative −pdf_S.
    fn s_upper(&self, s: f64) -> f64 {
        let (_, up) = incomplete_moments(self.b(), s);
        self.poly().iter().zip(up).map(|(a, t)| a * t).sum()
    }

    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidArgument(format!("quantile level {q} outside (0, 1)")));
        }
        let s = bisect_newton(|s| (self.s_upper(s) - q, -self.pdf_s(s)), 0.0, 2.0 * S_MAX, 1e-14)?;
        Ok(self.chi_of_s(s))
    }

    pub fn median(&self) -> Result<f64> {
        self.quantile(0.5)
    }

    /// E[g(χ)] by quadrature on the s-axis.
    pub fn expect<G: Fn(f64) -> f64>(&self, g: G, tol: f64) -> Result<Estimate> {
        integrate_s_axis(|s| if s > 0.0 { self.pdf_s(s) * g(self.chi_of_s(s)) } else { 0.0 }, QuadOptions::abs(tol))
    }

    /// Geometric mean exp E[log χ].
    pub fn chi_typ(&self) -> Result<f64> {
        let m = integrate_s_axis(|s| if s > 0.0 { -2.0 * s.ln() * self.pdf_s(s) } else { 0.0 }, QuadOptions::abs(1e-12))?;
        Ok(4.0 * self.chi_star * m.value.exp())
    }

    /// χ*·E[1/χ] = E[s²]/4.
    pub fn mean_inverse_ratio(&self) -> Result<f64> {
        let (_, up) = incomplete_moments(self.b(), 0.0);
        let p = self.poly();
        // E[s²] = Σ a_k ∫ s^{k+2} e^{−bs²}; extend the moment table by two orders
        let b = self.b();
        let mut m = up.to_vec();
        for k in 5..7 {
            m.push((k as f64 - 1.0) / (2.0 * b) * m[k - 2]);
        }
        Ok(p.iter().enumerate().map(|(k, a)| a * m[k + 2]).sum::<f64>() / 4.0)
    }

    pub fn tail_asymptotes(&self, chi: f64) -> TailAsymptotes {
        TailAsymptotes {
            upper: (self.chi_star / (chi * chi * chi)).sqrt(),
            lower_coefficient: self.family.lower_tail_coefficient(),
        }
    }

    pub fn sampler(&self) -> Sampler {
        Sampler::new(*self)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        let sampler = self.sampler();
        (0..n).map(|_| sampler.draw(rng)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailAsymptotes {
    /// √(χ*/χ³)
    pub upper: f64,
    /// κ in log f ~ −κχ*/χ
    pub lower_coefficient: f64,
}

const TABLE_POINTS: usize = 4097;

/// Inverse-CDF sampler. Levy draws use 2πχ*/z² directly; the other
/// families bracket the root from a table of P(S ≥ s) and polish it.
#[derive(Clone, Debug)]
pub struct Sampler {
    model: DistributionModel,
    grid: Vec<f64>,
    upper: Vec<f64>,
}

impl Sampler {
    fn new(model: DistributionModel) -> Self {
        if model.family == Family::Levy {
            return Sampler { model, grid: Vec::new(), upper: Vec::new() };
        }
        let top = S_MAX;
        let grid: Vec<f64> = (0..TABLE_POINTS).map(|i| top * i as f64 / (TABLE_POINTS - 1) as f64).collect();
        let upper = grid.iter().map(|&s| model.s_upper(s)).collect();
        Sampler { model, grid, upper }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let m = &self.model;
        if m.family == Family::Levy {
            let z: f64 = rng.sample(StandardNormal);
            return 2.0 * PI * m.chi_star / (z * z);
        }
        // u is the target value of P(S ≥ s), i.e. of P(X ≤ χ)
        let u: f64 = rng.random::<f64>();
        // upper is decreasing in s
        let k = self.upper.partition_point(|&t| t > u);
        let (lo, hi) = if k == 0 {
            (0.0, self.grid[1])
        } else if k >= self.grid.len() {
            (self.grid[self.grid.len() - 1], 2.0 * S_MAX)
        } else {
            (self.grid[k - 1], self.grid[k])
        };
        let s = bisect_newton(|s| (m.s_upper(s) - u, -m.pdf_s(s)), lo, hi, 1e-13)
            .unwrap_or(0.5 * (lo + hi));
        m.chi_of_s(s.max(f64::MIN_POSITIVE))
    }
}

/// Tail estimate of log χ* from the M largest samples:
/// (1/M)Σ log χ_(n) + 2 log(M/(2eN)). `m = None` uses ⌊N^{2/3}/10⌋.
pub fn estimate_chi_star(samples: &[f64], m: Option<usize>) -> Result<f64> {
    let n = samples.len();
    let m = m.unwrap_or_else(|| ((n as f64).powf(2.0 / 3.0) / 10.0).floor().max(1.0) as usize);
    if m == 0 || m > n {
        return Err(Error::InvalidArgument(format!("tail size {m} outside 1..={n}")));
    }
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    if !(sorted[m - 1] > 0.0) {
        return Err(Error::InvalidArgument("tail contains non-positive samples".into()));
    }
    let mean_log = sorted[..m].iter().map(|x| x.ln()).sum::<f64>() / m as f64;
    Ok(mean_log + 2.0 * (m as f64 / (2.0 * E * n as f64)).ln())
}

/// Binned Pearson objective of a model against samples of χ/χ*.
fn pearson(model: &DistributionModel, edges: &[f64], counts: &[u64], n: f64) -> f64 {
    edges
        .windows(2)
        .zip(counts)
        .map(|(w, &k)| {
            let expected = n * (model.cdf(w[1]) - model.cdf(w[0]));
            if expected <= 0.0 {
                return 0.0;
            }
            let r = k as f64 - expected;
            r * r / expected
        })
        .sum()
}

/// Weighted least-squares fit of the first constant to samples of χ/χ*,
/// binned on 40 log bins over [10⁻², 10³]. The second constant follows
/// from normalization.
pub fn fit_c1(family: Family, ratios: &[f64]) -> Result<f64> {
    if !family.is_fitted() {
        return Err(Error::InvalidArgument(format!("{family:?} has no free constant")));
    }
    let bins = 40;
    let hist = crate::numerics::histogram_log(ratios, bins, (1e-2, 1e3))?;
    let n = ratios.len() as f64;
    let (lo, hi) = family.admissible_c1();
    let objective = |c1: f64| match DistributionModel::with_constants(family, 1.0, c1, family.c2_from_c1(c1)) {
        Ok(m) => pearson(&m, &hist.edges, &hist.counts, n),
        Err(_) => f64::INFINITY,
    };
    let span = hi - lo;
    Ok(minimize_golden(objective, lo + 1e-9 * span, hi - 1e-9 * span, 1e-8))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Hermitian;
    use crate::rng::stream;
    use crate::spectra::diagonalize;
    use ndarray::array;

    #[test]
    fn two_level_susceptibility() {
        let bath = diagonalize(Hermitian::Real(array![[0.0, 0.0], [0.0, 1.0]])).unwrap();
        let v = Operator::Dense(Hermitian::Real(array![[0.0, 1.0], [1.0, 0.0]]));
        let c = chi_alpha(&bath, &v, 0, 0.5).unwrap();
        assert!((c.chi - 4.0).abs() < 1e-12);
        let zero = Operator::Diagonal(ndarray::Array1::zeros(2));
        assert_eq!(chi_alpha(&bath, &zero, 0, 0.5).unwrap().chi, 0.0);
    }

    #[test]
    fn zero_denominator_is_an_error() {
        let bath = diagonalize(Hermitian::Real(array![[0.0, 0.0], [0.0, 1.0]])).unwrap();
        let v = Operator::Dense(Hermitian::Real(array![[0.0, 1.0], [1.0, 0.0]]));
        assert!(matches!(chi_alpha(&bath, &v, 0, 1.0), Err(Error::DegenerateResonance { a: 0, b: 1 })));
        assert!(susceptibilities(&bath, &v, &[1], 1.0).is_err());
        // a resonant pair with a vanishing element is not a resonance
        let diag = Operator::Diagonal(array![1.0, -1.0]);
        assert!(chi_alpha(&bath, &diag, 0, 1.0).is_ok());
    }

    #[test]
    fn c_beta_matches_gamma_ratio() {
        use statrs::function::gamma::gamma;
        for b in [1u8, 2, 4] {
            let bf = b as f64;
            let oracle = 2.0 / bf * (gamma((1.0 + bf) / 2.0) / gamma(bf / 2.0)).powi(2);
            assert!((c_beta(b).unwrap() - oracle).abs() < 1e-12);
        }
        assert!(c_beta(3).is_err());
    }

    #[test]
    fn semicircle_profile() {
        let p = ChiStarProfile::Semicircle { beta: DysonClass::Real, d: 2048 };
        let rho: f64 = 2048.0 / PI;
        assert!((p.chi_star(0.0, 0.0).unwrap() - 2.0 / PI * rho * rho / 2048.0).abs() < 1e-9);
        assert!((p.chi_star(0.0, 0.0).unwrap() - 132.06).abs() < 0.1);
        assert_eq!(p.chi_star(1.9, 0.1).unwrap(), 0.0);
        assert!(matches!(p.chi_star(2.0, 0.1), Err(Error::OutOfBand(_))));
    }

    #[test]
    fn levy_point_value() {
        let m = DistributionModel::levy(1.0).unwrap();
        let v = m.pdf(PI).unwrap();
        assert!((v - (-1.0f64).exp() * PI.powf(-1.5)).abs() < 1e-14);
        assert!((m.log_pdf(PI).unwrap() - v.ln()).abs() < 1e-12);
        assert!(m.pdf(0.0).is_err());
    }

    #[test]
    fn cdf_and_sf_are_complementary() {
        for family in [Family::Levy, Family::Gue, Family::Goe, Family::Gse] {
            let m = DistributionModel::new(family, 2.0).unwrap();
            for chi in [0.05, 1.0, 17.0, 4e3] {
                assert!((m.cdf(chi) + m.sf(chi) - 1.0).abs() < 1e-12, "{family:?} {chi}");
            }
        }
    }

    #[test]
    fn levy_median_matches_normal_quantile() {
        let m = DistributionModel::levy(1.0).unwrap();
        // z² median of a standard normal is 0.454936...
        let want = 2.0 * PI / 0.454_936_423_119_572_8;
        assert!((m.median().unwrap() - want).abs() < 1e-8);
    }

    #[test]
    fn typical_value_of_levy() {
        let m = DistributionModel::levy(1.0).unwrap();
        let euler = 0.577_215_664_901_532_9;
        assert!((m.chi_typ().unwrap() - 4.0 * PI * f64::exp(euler)).abs() < 1e-8);
        let k = DistributionModel::levy(7.0).unwrap();
        assert!((k.chi_typ().unwrap() / m.chi_typ().unwrap() - 7.0).abs() < 1e-10);
    }

    #[test]
    fn lower_tail_coefficients() {
        for (family, beta) in [(Family::Gue, 2u8), (Family::Goe, 1), (Family::Gse, 4)] {
            let b = beta as f64;
            let rule = b * PI * PI / (2.0 * c_beta(beta).unwrap());
            assert!((family.lower_tail_coefficient() - rule).abs() < 1e-12);
        }
    }

    #[test]
    fn admissible_range_keeps_density_positive() {
        for family in [Family::Goe, Family::Gse] {
            let (lo, hi) = family.admissible_c1();
            assert!(lo < hi);
            for c1 in [lo, 0.5 * (lo + hi), hi] {
                let m = DistributionModel::with_c1(family, 1.0, c1).unwrap();
                assert!((0..2000).all(|i| m.pdf_s(0.006 * i as f64) >= -1e-15));
            }
            assert!(DistributionModel::with_c1(family, 1.0, hi + 0.1).is_err());
        }
    }

    #[test]
    fn normalization_identities() {
        // the published GOE pair does not integrate to one
        let m = DistributionModel { family: Family::Goe, chi_star: 1.0, c1: 5.29, c2: 11.19 };
        assert!((m.total_mass() - 1.0).abs() > 0.5);
        assert!(DistributionModel::with_constants(Family::Goe, 1.0, 5.29, 11.19).is_err());
        let c = FsConstants::frozen();
        assert!((Family::Goe.c2_from_c1(c.goe_c1) - c.goe_c2).abs() < 1e-9);
    }

    #[test]
    fn sampler_tracks_cdf() {
        let mut rng = stream(3, 0);
        for family in [Family::Gue, Family::Goe, Family::Gse] {
            let m = DistributionModel::new(family, 1.0).unwrap();
            let xs = m.sample(&mut rng, 20_000);
            let ks = crate::numerics::ks_distance(&xs, |x| m.cdf(x));
            assert!(ks < 0.015, "{family:?} {ks}");
        }
    }

    #[test]
    fn estimator_is_scale_equivariant() {
        let mut rng = stream(4, 0);
        let xs = DistributionModel::levy(1.0).unwrap().sample(&mut rng, 10_000);
        let ys: Vec<f64> = xs.iter().map(|x| 5.0 * x).collect();
        let a = estimate_chi_star(&xs, None).unwrap();
        let b = estimate_chi_star(&ys, None).unwrap();
        assert!((b - a - 5f64.ln()).abs() < 1e-12);
        assert!(estimate_chi_star(&xs, Some(10_001)).is_err());
    }
}
