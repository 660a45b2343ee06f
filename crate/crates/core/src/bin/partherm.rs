use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use partherm::harness::{load_config, run, Experiment};

#[derive(Parser)]
#[command(version, about = "Spin coupled to a finite quantum bath: exact-diagonalization experiments")]
struct Cli {
    /// fs_rm, fs_eth, s_vs_chi, ee_dist, ee_moments, czz_t, czz_inf, f_od, delta_s or estimator_bench
    experiment: String,
    #[arg(long)]
    config: PathBuf,
    /// overrides the seed in the config file
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

/// Re-run under a known-good OpenBLAS kernel when the auto-detected one fails
/// the self-check and the user has not picked one.
fn reexec_with_safe_kernel() -> Option<ExitCode> {
    if partherm::linalg::backend_check().is_ok() || std::env::var_os("OPENBLAS_CORETYPE").is_some() {
        return None;
    }
    let exe = std::env::current_exe().ok()?;
    let status = std::process::Command::new(exe)
        .args(std::env::args_os().skip(1))
        .env("OPENBLAS_CORETYPE", "Haswell")
        .status()
        .ok()?;
    Some(ExitCode::from(status.code().unwrap_or(3) as u8))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(code) = reexec_with_safe_kernel() {
        return code;
    }
    let result = cli.experiment.parse::<Experiment>().and_then(|exp| {
        let mut cfg = load_config(&cli.config)?;
        if let Some(s) = cli.seed {
            cfg.seed = s;
        }
        run(exp, &cfg, cli.workers, &cli.out)
    });
    match result {
        Ok(summary) => {
            for n in &summary.notes {
                eprintln!("warning: {n}");
            }
            println!("{} rows -> {}", summary.rows, summary.csv.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
