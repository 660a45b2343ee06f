use rand::Rng;
use rayon::prelude::*;

use super::config::{Experiment, ExperimentConfig};
use super::pipelines::{
    decoupled_system, default_coupling, default_h_s, entropy_records, eth_anchor, eth_profile, probe_data, sample_bath,
    ProbeData,
};
use super::Row;
use crate::bath_probe::{delta_s_theory, f_od_pdf, measure_delta_s_matrix_elements, renyi_delta_s, ElementStats, Parity};
use crate::dynamics::{czz_infinite_exact, czz_infinite_theory, fgr_gamma, log_time_grid, Correlator};
use crate::error::{Error, Result};
use crate::fidelity::{estimate_chi_star, ChiStarProfile, DistributionModel};
use crate::models::{hierarchy_warning, sigma_x_site, BathSpec, IsingBathSpec};
use crate::resonance::{ee_moments, ee_weak_asymptotes};
use crate::rng::stream;

/// Rows plus free-text notes for the manifest.
#[derive(Default)]
pub struct Output {
    pub rows: Vec<Row>,
    pub notes: Vec<String>,
}

impl Output {
    fn note(&mut self, s: impl Into<String>) {
        let s = s.into();
        if !self.notes.contains(&s) {
            self.notes.push(s);
        }
    }
}

pub fn run_experiment(exp: Experiment, cfg: &ExperimentConfig) -> Result<Output> {
    match exp {
        Experiment::FsRm => fs_rm(cfg),
        Experiment::FsEth => fs_eth(cfg),
        Experiment::SVsChi => entropies(cfg, true),
        Experiment::EeDist => entropies(cfg, false),
        Experiment::EeMoments => ee_moments_curves(cfg),
        Experiment::CzzT => czz_t(cfg),
        Experiment::CzzInf => czz_inf(cfg),
        Experiment::FOd => f_od(cfg),
        Experiment::DeltaS => delta_s(cfg),
        Experiment::EstimatorBench => estimator_bench(cfg),
    }
}

/// Map realizations in parallel and return results in realization order.
fn per_realization<T: Send, F: Fn(u64) -> Result<T> + Sync>(cfg: &ExperimentConfig, f: F) -> Result<Vec<T>> {
    (0..cfg.realizations as u64).into_par_iter().map(&f).collect()
}

fn specs(cfg: &ExperimentConfig) -> Result<Vec<BathSpec>> {
    cfg.bath.as_ref().ok_or_else(|| Error::Config("bath: missing".into()))?.specs()
}

fn chain(spec: &BathSpec) -> Result<IsingBathSpec> {
    match spec {
        BathSpec::Ising(s) => Ok(*s),
        _ => Err(Error::Config("bath.kind: expected ising".into())),
    }
}

fn base_row(realization: u64, cfg: &ExperimentConfig, size: usize) -> Row {
    Row { realization: Some(realization), seed: Some(cfg.seed), size: Some(size), ..Row::default() }
}

fn quantity(mut row: Row, name: &str, value: f64) -> Row {
    row.quantity = Some(name.to_string());
    row.value = Some(value);
    row
}

/// Seeds are keyed by (size index, realization) so adding sizes leaves the
/// other streams untouched.
fn stream_index(size_index: usize, realization: u64) -> u64 {
    ((size_index as u64) << 32) | realization
}

fn fs_rm(cfg: &ExperimentConfig) -> Result<Output> {
    let mut out = Output::default();
    for (si, spec) in specs(cfg)?.iter().enumerate() {
        let BathSpec::RandomMatrix { beta, d, .. } = *spec else {
            return Err(Error::Config("bath.kind: fs_rm needs random_matrix".into()));
        };
        let h_s = cfg.coupling.h_s.unwrap_or(default_h_s(spec));
        let kind = cfg.coupling.kind.unwrap_or(default_coupling(spec));
        let profile = ChiStarProfile::Semicircle { beta, d };
        if let Some(w) = hierarchy_warning(d as f64 / std::f64::consts::PI, h_s, 1.0) {
            out.note(w);
        }
        let chunks = per_realization(cfg, |r| {
            let bath = sample_bath(spec, kind, &mut stream(cfg.seed, stream_index(si, r)))?;
            let mut rows = Vec::new();
            for c in bath.chi_samples(h_s, cfg.mid_fraction)? {
                let mut row = base_row(r, cfg, d);
                row.sigma = Some(c.sigma);
                row.index = Some(c.index);
                row.energy = Some(c.energy);
                row.chi = Some(c.chi);
                row.chi_star = Some(profile.chi_star(c.energy, c.sigma as f64 * h_s)?);
                rows.push(row);
            }
            Ok(rows)
        })?;
        out.rows.extend(chunks.into_iter().flatten());
    }
    Ok(out)
}

fn fs_eth(cfg: &ExperimentConfig) -> Result<Output> {
    let mut out = Output::default();
    for (si, spec) in specs(cfg)?.iter().enumerate() {
        let chain_spec = chain(spec)?;
        let d = chain_spec.dim();
        let h_s = cfg.coupling.h_s.unwrap_or(default_h_s(spec));
        let kind = cfg.coupling.kind.unwrap_or(default_coupling(spec));
        let chunks = per_realization(cfg, |r| {
            let bath = sample_bath(spec, kind, &mut stream(cfg.seed, stream_index(si, r)))?;
            let anchor = eth_anchor(&bath, h_s, cfg.window, &cfg.window_centers)?;
            let profile = eth_profile(&anchor, &chain_spec);
            let warn = hierarchy_warning(bath.rho0(cfg.window)?, h_s, bath.energy_width());
            let mut rows = Vec::new();
            for c in bath.chi_samples(h_s, cfg.mid_fraction)? {
                let mut row = base_row(r, cfg, d);
                row.sigma = Some(c.sigma);
                row.index = Some(c.index);
                row.energy = Some(c.energy);
                row.chi = Some(c.chi);
                row.chi_star = Some(profile.chi_star(c.energy, c.sigma as f64 * h_s)?);
                rows.push(row);
            }
            let base = base_row(r, cfg, d);
            rows.push(quantity(base.clone(), "v_tilde", anchor.v_tilde));
            rows.push(quantity(base.clone(), "rho_target", anchor.rho_target));
            rows.push(quantity(base, "chi_star_measured", anchor.chi_star));
            Ok((rows, warn))
        })?;
        for (rows, warn) in chunks {
            out.rows.extend(rows);
            if let Some(w) = warn {
                out.note(format!("L = {}: {w}", chain_spec.sites));
            }
        }
    }
    Ok(out)
}

/// s_vs_chi draws one log-uniform J per realization; ee_dist scans the J grid.
fn entropies(cfg: &ExperimentConfig, random_j: bool) -> Result<Output> {
    let mut out = Output::default();
    for (si, spec) in specs(cfg)?.iter().enumerate() {
        let chain_spec = chain(spec)?;
        let d = chain_spec.dim();
        let h_s = cfg.coupling.h_s.unwrap_or(default_h_s(spec));
        let kind = cfg.coupling.kind.unwrap_or(default_coupling(spec));
        let chunks = per_realization(cfg, |r| {
            let mut rng = stream(cfg.seed, stream_index(si, r));
            let bath = sample_bath(spec, kind, &mut rng)?;
            let anchor = eth_anchor(&bath, h_s, cfg.window, &cfg.window_centers)?;
            let js = if random_j {
                let [lo, hi] = cfg.coupling.log_j_range;
                vec![rng.random_range(lo..hi).exp()]
            } else {
                cfg.coupling.j.clone()
            };
            let mut rows = Vec::new();
            let mut excluded = 0usize;
            for &j in &js {
                let coupled = bath.full(j, h_s)?;
                for rec in entropy_records(&bath, &coupled, cfg.mid_fraction)? {
                    if rec.overlap < crate::resonance::MIN_MATCH_OVERLAP {
                        excluded += 1;
                    }
                    let mut row = base_row(r, cfg, d);
                    row.j = Some(j);
                    row.g = Some(j * anchor.chi_star.sqrt());
                    row.sigma = Some(rec.sigma);
                    row.index = Some(rec.index);
                    row.energy = Some(rec.energy);
                    row.chi = Some(rec.chi);
                    row.chi_star = Some(eth_profile(&anchor, &chain_spec).chi_star(rec.energy, 0.0)?);
                    row.entropy = Some(rec.entropy);
                    row.czz_diag = Some(rec.czz_diag);
                    rows.push(quantity(row, "overlap", rec.overlap));
                }
            }
            Ok((rows, excluded))
        })?;
        let mut excluded = 0;
        for (rows, e) in chunks {
            out.rows.extend(rows);
            excluded += e;
        }
        if excluded > 0 {
            out.note(format!("L = {}: {excluded} matched pairs below the overlap floor", chain_spec.sites));
        }
    }
    Ok(out)
}

fn ee_moments_curves(cfg: &ExperimentConfig) -> Result<Output> {
    let family = cfg.theory.family;
    let unit = DistributionModel::new(family, 1.0)?;
    let rows = cfg
        .theory
        .g
        .par_iter()
        .map(|&g| {
            let m = ee_moments(g, &unit)?;
            let w = ee_weak_asymptotes(g, 1.0, family)?;
            let row = Row { g: Some(g), j: Some(g), chi_star: Some(1.0), ..Row::default() };
            Ok(vec![
                quantity(row.clone(), "mean", m.mean),
                quantity(row.clone(), "median", m.median),
                quantity(row.clone(), "variance", m.variance),
                quantity(row.clone(), "mean_weak", w.mean),
                quantity(row.clone(), "median_weak", w.median),
                quantity(row, "variance_weak", w.variance),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Output { rows: rows.into_iter().flatten().collect(), notes: vec![] })
}

fn czz_t(cfg: &ExperimentConfig) -> Result<Output> {
    let mut out = Output::default();
    let times = log_time_grid(cfg.times.t0, cfg.times.t1, cfg.times.points);
    for (si, spec) in specs(cfg)?.iter().enumerate() {
        let chain_spec = chain(spec)?;
        let d = chain_spec.dim();
        let h_s = cfg.coupling.h_s.unwrap_or(default_h_s(spec));
        let kind = cfg.coupling.kind.unwrap_or(default_coupling(spec));
        let chunks = per_realization(cfg, |r| {
            let bath = sample_bath(spec, kind, &mut stream(cfg.seed, stream_index(si, r)))?;
            let anchor = eth_anchor(&bath, h_s, cfg.window, &cfg.window_centers)?;
            let mut rows = Vec::new();
            for &j in &cfg.coupling.j {
                let mut base = base_row(r, cfg, d);
                base.j = Some(j);
                base.g = Some(j * anchor.chi_star.sqrt());
                base.chi_star = Some(anchor.chi_star);
                rows.push(quantity(base.clone(), "gamma_fgr", fgr_gamma(&bath.eig, &bath.v, j, h_s, cfg.window)?));
                let coupled = bath.full(j, h_s)?;
                let corr = Correlator::new(&coupled.eig, coupled.sectors)?;
                for &t in &times {
                    let mut row = base.clone();
                    row.time = Some(t);
                    rows.push(quantity(row, "czz", corr.at(t)));
                }
            }
            Ok(rows)
        })?;
        out.rows.extend(chunks.into_iter().flatten());
    }
    Ok(out)
}

fn czz_inf(cfg: &ExperimentConfig) -> Result<Output> {
    let mut out = Output::default();
    let family = cfg.theory.family;
    for (si, spec) in specs(cfg)?.iter().enumerate() {
        let chain_spec = chain(spec)?;
        let d = chain_spec.dim();
        let h_s = cfg.coupling.h_s.unwrap_or(default_h_s(spec));
        let kind = cfg.coupling.kind.unwrap_or(default_coupling(spec));
        let chunks = per_realization(cfg, |r| {
            let bath = sample_bath(spec, kind, &mut stream(cfg.seed, stream_index(si, r)))?;
            let anchor = eth_anchor(&bath, h_s, cfg.window, &cfg.window_centers)?;
            let mut rows = Vec::new();
            let mut degenerate = 0;
            for &j in &cfg.coupling.j {
                let coupled = bath.full(j, h_s)?;
                let plateau = czz_infinite_exact(&coupled.eig, coupled.sectors)?;
                degenerate += plateau.degenerate_blocks;
                let mut row = base_row(r, cfg, d);
                row.j = Some(j);
                row.g = Some(j * anchor.chi_star.sqrt());
                row.chi_star = Some(anchor.chi_star);
                rows.push(quantity(row, "czz_inf", plateau.value));
            }
            Ok((rows, anchor.chi_star, degenerate))
        })?;
        let mut chi0 = 0.0;
        let mut degenerate = 0;
        let n = chunks.len() as f64;
        for (rows, c, deg) in chunks {
            out.rows.extend(rows);
            chi0 += c / n;
            degenerate += deg;
        }
        if degenerate > 0 {
            out.note(format!("L = {}: {degenerate} degenerate blocks treated in the block-diagonal ensemble", chain_spec.sites));
        }
        let profile = eth_profile(&super::pipelines::EthAnchor { v_tilde: f64::NAN, rho_target: f64::NAN, chi_star: chi0 }, &chain_spec);
        for &j in &cfg.coupling.j {
            let row = Row { size: Some(d), j: Some(j), g: Some(j * chi0.sqrt()), chi_star: Some(chi0), ..Row::default() };
            out.rows.push(quantity(row, "czz_inf_theory", czz_infinite_theory(j, h_s, &profile, family)?));
        }
    }
    Ok(out)
}

fn f_od(cfg: &ExperimentConfig) -> Result<Output> {
    let family = cfg.theory.family;
    let n = cfg.theory.r_points;
    let r_max = cfg.theory.r_max;
    let grid: Vec<f64> = (0..n).map(|k| -r_max + 2.0 * r_max * k as f64 / (n - 1) as f64).collect();
    let rows = cfg
        .theory
        .g
        .par_iter()
        .map(|&g| {
            let mut rows = Vec::new();
            for (parity, name) in [(Parity::Even, "f_od_even"), (Parity::Odd, "f_od_odd"), (Parity::Mixed, "f_od")] {
                for &r in &grid {
                    let row = Row { g: Some(g), x: Some(r), ..Row::default() };
                    rows.push(quantity(row, name, f_od_pdf(r, g, family, parity)?));
                }
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Output { rows: rows.into_iter().flatten().collect(), notes: vec![] })
}

fn delta_s(cfg: &ExperimentConfig) -> Result<Output> {
    let mut out = Output::default();
    let family = cfg.theory.family;
    for (si, spec) in specs(cfg)?.iter().enumerate() {
        let chain_spec = chain(spec)?;
        let d = chain_spec.dim();
        let h_s = cfg.coupling.h_s.unwrap_or(default_h_s(spec));
        let kind = cfg.coupling.kind.unwrap_or(default_coupling(spec));
        let probe_site = cfg.coupling.probe_site.unwrap_or(chain_spec.mid_site() - 1);
        if probe_site == 0 {
            return Err(Error::Config("coupling.probe_site: chain too short for the default probe site".into()));
        }
        let v_probe = sigma_x_site(chain_spec.sites, probe_site)?;
        let h_probe = h_s;
        let chunks = per_realization(cfg, |r| {
            let bath = sample_bath(spec, kind, &mut stream(cfg.seed, stream_index(si, r)))?;
            let anchor = eth_anchor(&bath, h_s, cfg.window, &cfg.window_centers)?;
            let base = probe_data(&decoupled_system(&bath.eig, h_s), &v_probe, h_probe, cfg.window, &cfg.window_centers, cfg.mid_fraction)?;
            let coupled = cfg
                .coupling
                .j
                .iter()
                .map(|&j| probe_data(&bath.full(j, h_s)?, &v_probe, h_probe, cfg.window, &cfg.window_centers, cfg.mid_fraction))
                .collect::<Result<Vec<ProbeData>>>()?;
            Ok((anchor.chi_star, base, coupled))
        })?;
        let n = chunks.len() as f64;
        let chi0: f64 = chunks.iter().map(|c| c.0).sum::<f64>() / n;
        let mut base = ElementStats::default();
        let mut base_chi = Vec::new();
        for (_, b, _) in &chunks {
            merge(&mut base, &b.elements);
            base_chi.extend_from_slice(&b.chi_prime);
        }
        for (k, &j) in cfg.coupling.j.iter().enumerate() {
            let mut el = ElementStats::default();
            let mut chi = Vec::new();
            for (_, _, c) in &chunks {
                merge(&mut el, &c[k].elements);
                chi.extend_from_slice(&c[k].chi_prime);
            }
            let g = j * chi0.sqrt();
            let row = Row { size: Some(d), seed: Some(cfg.seed), j: Some(j), g: Some(g), chi_star: Some(chi0), ..Row::default() };
            out.rows.push(quantity(row.clone(), "delta_s_elements", measure_delta_s_matrix_elements(&el, &base)?));
            out.rows.push(quantity(row.clone(), "delta_s_renyi", renyi_delta_s(&el, &base)));
            out.rows.push(quantity(row.clone(), "delta_s_tails", estimate_chi_star(&chi, None)? - estimate_chi_star(&base_chi, None)?));
            out.rows.push(quantity(row, "delta_s_theory", if g > 0.0 { delta_s_theory(g, family)? } else { 0.0 }));
        }
    }
    Ok(out)
}

fn merge(acc: &mut ElementStats, x: &ElementStats) {
    acc.sum_abs += x.sum_abs;
    acc.sum_sq += x.sum_sq;
    acc.pairs += x.pairs;
    acc.sum_r += x.sum_r;
}

fn estimator_bench(cfg: &ExperimentConfig) -> Result<Output> {
    let b = &cfg.bench;
    let model = DistributionModel::new(b.family, b.chi_star)?;
    let sampler = model.sampler();
    let mut out = Output::default();
    for (si, &n) in b.sizes.iter().enumerate() {
        let rows = (0..b.trials as u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = stream(cfg.seed, stream_index(si, t));
                let xs: Vec<f64> = (0..n).map(|_| sampler.draw(&mut rng)).collect();
                let est = estimate_chi_star(&xs, b.tail)?;
                let row = Row { realization: Some(t), seed: Some(cfg.seed), size: Some(n), chi_star: Some(b.chi_star), ..Row::default() };
                Ok(quantity(row, "log_chi_star_estimate", est))
            })
            .collect::<Result<Vec<_>>>()?;
        out.rows.extend(rows);
    }
    Ok(out)
}
