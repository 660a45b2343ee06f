use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ensembles::DysonClass;
use crate::error::{Error, Result};
use crate::fidelity::Family;
use crate::models::{BathSpec, CouplingKind, Ensemble, IsingBathSpec, MAX_SITES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    FsRm,
    FsEth,
    SVsChi,
    EeDist,
    EeMoments,
    CzzT,
    CzzInf,
    FOd,
    DeltaS,
    EstimatorBench,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::FsRm,
        Experiment::FsEth,
        Experiment::SVsChi,
        Experiment::EeDist,
        Experiment::EeMoments,
        Experiment::CzzT,
        Experiment::CzzInf,
        Experiment::FOd,
        Experiment::DeltaS,
        Experiment::EstimatorBench,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::FsRm => "fs_rm",
            Experiment::FsEth => "fs_eth",
            Experiment::SVsChi => "s_vs_chi",
            Experiment::EeDist => "ee_dist",
            Experiment::EeMoments => "ee_moments",
            Experiment::CzzT => "czz_t",
            Experiment::CzzInf => "czz_inf",
            Experiment::FOd => "f_od",
            Experiment::DeltaS => "delta_s",
            Experiment::EstimatorBench => "estimator_bench",
        }
    }

    /// Whether the experiment samples a bath at all.
    pub fn needs_bath(self) -> bool {
        !matches!(self, Experiment::EeMoments | Experiment::FOd | Experiment::EstimatorBench)
    }

    fn needs_chain(self) -> bool {
        self.needs_bath() && self != Experiment::FsRm
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BathConfig {
    RandomMatrix {
        #[serde(default = "gaussian")]
        ensemble: Ensemble,
        beta: u8,
        d: usize,
    },
    Ising {
        #[serde(default = "default_sites")]
        sites: Vec<usize>,
        #[serde(default = "default_h")]
        h: f64,
        #[serde(default = "default_u")]
        u: f64,
        #[serde(default = "default_gamma")]
        gamma: f64,
    },
}

fn gaussian() -> Ensemble {
    Ensemble::Gaussian
}
fn default_sites() -> Vec<usize> {
    vec![10]
}
fn default_h() -> f64 {
    IsingBathSpec::default().h
}
fn default_u() -> f64 {
    IsingBathSpec::default().u
}
fn default_gamma() -> f64 {
    IsingBathSpec::default().gamma
}

impl BathConfig {
    /// One bath spec per system size.
    pub fn specs(&self) -> Result<Vec<BathSpec>> {
        match self {
            BathConfig::RandomMatrix { ensemble, beta, d } => {
                Ok(vec![BathSpec::RandomMatrix { ensemble: *ensemble, beta: DysonClass::new(*beta)?, d: *d }])
            }
            BathConfig::Ising { sites, h, u, gamma } => Ok(sites
                .iter()
                .map(|&l| BathSpec::Ising(IsingBathSpec { sites: l, h: *h, u: *u, gamma: *gamma }))
                .collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingConfig {
    /// spin splitting; defaults to 0.1 for random matrices and √(h²+u²) for chains
    pub h_s: Option<f64>,
    pub j: Vec<f64>,
    pub kind: Option<CouplingKind>,
    /// 1-based probe site for the bath-entropy experiment (default m − 1)
    pub probe_site: Option<usize>,
    /// range of log J drawn uniformly per realization in s_vs_chi
    pub log_j_range: [f64; 2],
}

impl Default for CouplingConfig {
    fn default() -> Self {
        CouplingConfig { h_s: None, j: vec![0.1], kind: None, probe_site: None, log_j_range: [-10.0, 2.0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    pub t0: f64,
    pub t1: f64,
    pub points: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig { t0: 0.01, t1: 1e3, points: 200 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TheoryConfig {
    pub family: Family,
    /// grid of reduced couplings g = J√χ*
    pub g: Vec<f64>,
    pub r_max: f64,
    pub r_points: usize,
}

impl Default for TheoryConfig {
    fn default() -> Self {
        TheoryConfig {
            family: Family::Goe,
            g: (0..=24).map(|k| 10f64.powf(-4.0 + 0.25 * k as f64)).collect(),
            r_max: 6.0,
            r_points: 241,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub chi_star: f64,
    pub family: Family,
    /// tail size m; None uses the estimator default
    pub tail: Option<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig { sizes: vec![1000, 10_000, 100_000], trials: 100, chi_star: 1.0, family: Family::Levy, tail: None }
    }
}

/// Everything an experiment run reads from its TOML file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub realizations: usize,
    /// microcanonical window width Δ
    pub window: f64,
    /// fraction of the spectrum, centred, whose states are sampled
    pub mid_fraction: f64,
    /// window centres used for ΔS and for ṽ, ρ estimates
    pub window_centers: Vec<f64>,
    pub bath: Option<BathConfig>,
    pub coupling: CouplingConfig,
    pub times: TimeConfig,
    pub theory: TheoryConfig,
    pub bench: BenchConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 1,
            realizations: 10,
            window: crate::spectra::DEFAULT_WINDOW,
            mid_fraction: 0.25,
            window_centers: vec![0.0],
            bath: None,
            coupling: CouplingConfig::default(),
            times: TimeConfig::default(),
            theory: TheoryConfig::default(),
            bench: BenchConfig::default(),
        }
    }
}

fn bad(field: &str, msg: impl fmt::Display) -> Error {
    Error::Config(format!("{field}: {msg}"))
}

fn positive(field: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(bad(field, format!("must be positive and finite, got {x}")))
    }
}

fn nonempty<T>(field: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        Err(bad(field, "must not be empty"))
    } else {
        Ok(())
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Hex SHA-256 of the normalized TOML form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Field-level checks for the given experiment.
    pub fn validate(&self, exp: Experiment) -> Result<()> {
        if exp.needs_bath() && self.realizations == 0 {
            return Err(bad("realizations", "must be at least 1"));
        }
        positive("window", self.window)?;
        if !(self.mid_fraction > 0.0 && self.mid_fraction <= 1.0) {
            return Err(bad("mid_fraction", format!("must lie in (0, 1], got {}", self.mid_fraction)));
        }
        nonempty("window_centers", &self.window_centers)?;
        if let Some(c) = self.window_centers.iter().find(|c| !c.is_finite()) {
            return Err(bad("window_centers", format!("non-finite entry {c}")));
        }
        if let Some(h) = self.coupling.h_s {
            positive("coupling.h_s", h)?;
        }
        for (i, &j) in self.coupling.j.iter().enumerate() {
            if !(j >= 0.0 && j.is_finite()) {
                return Err(bad(&format!("coupling.j[{i}]"), format!("must be non-negative, got {j}")));
            }
        }
        let [lo, hi] = self.coupling.log_j_range;
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(bad("coupling.log_j_range", format!("need lo < hi, got [{lo}, {hi}]")));
        }
        match (&self.bath, exp.needs_bath()) {
            (None, true) => return Err(bad("bath", format!("required by {exp}"))),
            (Some(b), true) => self.validate_bath(b, exp)?,
            _ => {}
        }
        match exp {
            Experiment::CzzT => {
                positive("times.t0", self.times.t0)?;
                if !(self.times.t1 > self.times.t0 && self.times.t1.is_finite()) {
                    return Err(bad("times.t1", format!("must exceed t0 = {}", self.times.t0)));
                }
                if self.times.points < 2 {
                    return Err(bad("times.points", "need at least 2"));
                }
                nonempty("coupling.j", &self.coupling.j)?;
            }
            Experiment::EeMoments | Experiment::FOd => {
                nonempty("theory.g", &self.theory.g)?;
                for (i, &g) in self.theory.g.iter().enumerate() {
                    positive(&format!("theory.g[{i}]"), g)?;
                }
                if exp == Experiment::FOd {
                    positive("theory.r_max", self.theory.r_max)?;
                    if self.theory.r_points < 2 {
                        return Err(bad("theory.r_points", "need at least 2"));
                    }
                }
            }
            Experiment::EstimatorBench => {
                nonempty("bench.sizes", &self.bench.sizes)?;
                if let Some(&n) = self.bench.sizes.iter().find(|&&n| n < 4) {
                    return Err(bad("bench.sizes", format!("sample size {n} too small")));
                }
                if self.bench.trials == 0 {
                    return Err(bad("bench.trials", "must be at least 1"));
                }
                positive("bench.chi_star", self.bench.chi_star)?;
                if let (Some(m), Some(&n)) = (self.bench.tail, self.bench.sizes.iter().min()) {
                    if m == 0 || m > n {
                        return Err(bad("bench.tail", format!("must lie in 1..={n}")));
                    }
                }
            }
            Experiment::EeDist | Experiment::CzzInf | Experiment::DeltaS => nonempty("coupling.j", &self.coupling.j)?,
            _ => {}
        }
        Ok(())
    }

    fn validate_bath(&self, bath: &BathConfig, exp: Experiment) -> Result<()> {
        match bath {
            BathConfig::RandomMatrix { beta, d, .. } => {
                DysonClass::new(*beta).map_err(|_| bad("bath.beta", format!("must be 1, 2 or 4, got {beta}")))?;
                if *d < 2 {
                    return Err(bad("bath.d", format!("must be at least 2, got {d}")));
                }
                if exp.needs_chain() {
                    return Err(bad("bath.kind", format!("{exp} needs an ising bath")));
                }
                if let Some(k) = self.coupling.kind {
                    if k != CouplingKind::DiagAlternating {
                        return Err(bad("coupling.kind", format!("{k:?} does not act on a random-matrix bath")));
                    }
                }
            }
            BathConfig::Ising { sites, h, u, gamma } => {
                nonempty("bath.sites", sites)?;
                if let Some(&l) = sites.iter().find(|&&l| !(3..=MAX_SITES).contains(&l)) {
                    return Err(bad("bath.sites", format!("chain length {l} outside 3..={MAX_SITES}")));
                }
                if !h.is_finite() || !u.is_finite() {
                    return Err(bad("bath.h", "fields must be finite"));
                }
                if !(0.0..=1.0).contains(gamma) {
                    return Err(bad("bath.gamma", format!("must lie in [0, 1], got {gamma}")));
                }
                if exp == Experiment::FsRm {
                    return Err(bad("bath.kind", "fs_rm needs a random_matrix bath"));
                }
                let min_l = *sites.iter().min().unwrap();
                let check_site = |field: &str, n: usize| {
                    if n == 0 || n > min_l {
                        Err(bad(field, format!("site {n} outside 1..={min_l}")))
                    } else {
                        Ok(())
                    }
                };
                match self.coupling.kind {
                    Some(CouplingKind::DiagAlternating) => {
                        return Err(bad("coupling.kind", "diag_alternating needs a random-matrix bath"))
                    }
                    Some(CouplingKind::SigmaXAt(n)) => check_site("coupling.kind", n)?,
                    _ => {}
                }
                if let Some(n) = self.coupling.probe_site {
                    check_site("coupling.probe_site", n)?;
                }
            }
        }
        Ok(())
    }
}
