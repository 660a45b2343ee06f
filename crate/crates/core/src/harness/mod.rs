//! Experiment driver: TOML config in, `data.csv` and `manifest.json` out.

mod config;
mod experiments;
pub mod pipelines;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

pub use config::{BathConfig, BenchConfig, CouplingConfig, Experiment, ExperimentConfig, TheoryConfig, TimeConfig};
pub use experiments::{run_experiment, Output};

use crate::error::{Error, Result};
use crate::fidelity::FsConstants;

pub const SCHEMA_VERSION: u32 = 1;

/// One CSV line. Columns that do not apply to an experiment stay empty.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Row {
    pub config_hash: String,
    pub experiment: String,
    pub realization: Option<u64>,
    pub seed: Option<u64>,
    /// bath dimension d
    pub size: Option<usize>,
    pub j: Option<f64>,
    /// reduced coupling J√χ*
    pub g: Option<f64>,
    pub sigma: Option<i8>,
    pub index: Option<usize>,
    pub energy: Option<f64>,
    pub chi: Option<f64>,
    pub chi_star: Option<f64>,
    pub entropy: Option<f64>,
    pub czz_diag: Option<f64>,
    pub time: Option<f64>,
    /// experiment-specific abscissa (R for f_od)
    pub x: Option<f64>,
    pub quantity: Option<String>,
    pub value: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub rows: usize,
    pub csv: PathBuf,
    pub manifest: PathBuf,
    pub notes: Vec<String>,
}

/// Load, validate, run and write one experiment.
pub fn run(exp: Experiment, cfg: &ExperimentConfig, workers: usize, out_dir: &Path) -> Result<RunSummary> {
    cfg.validate(exp)?;
    if workers == 0 {
        return Err(Error::Config("workers: must be at least 1".into()));
    }
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("workers: {e}")))?;
    let output = pool.install(|| run_experiment(exp, cfg))?;
    if let Some(bad) = output.rows.iter().find(|r| r.value.is_some_and(|v| !v.is_finite())) {
        return Err(Error::InvalidArgument(format!("non-finite {:?} in output", bad.quantity)));
    }
    let hash = cfg.hash();
    fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join("data.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    for mut row in output.rows.iter().cloned() {
        row.config_hash.clone_from(&hash);
        row.experiment = exp.name().to_string();
        w.serialize(row)?;
    }
    w.flush()?;
    let constants = FsConstants::frozen();
    let manifest = json!({
        "schema_version": SCHEMA_VERSION,
        "experiment": exp.name(),
        "config": cfg,
        "config_hash": hash,
        "seed": cfg.seed,
        "workers": workers,
        "version": env!("CARGO_PKG_VERSION"),
        "fs_constants": constants,
        "rows": output.rows.len(),
        "wall_time_s": start.elapsed().as_secs_f64(),
        "notes": output.notes,
    });
    let manifest_path = out_dir.join("manifest.json");
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(RunSummary { rows: output.rows.len(), csv: csv_path, manifest: manifest_path, notes: output.notes })
}

/// Read a config file; unreadable files count as config errors.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    ExperimentConfig::from_toml(&text)
}
