//! Fit the free GOE and GSE constants of the susceptibility law to
//! mid-spectrum samples and write them to `data/fs_constants.toml`.
//!
//!     cargo run --release --example fit_fs_constants -- --goe 40 --gse 6 --write

use std::path::PathBuf;

use clap::Parser;
use partherm::ensembles::DysonClass;
use partherm::fidelity::{fit_c1, ChiStarProfile, Family, FsConstants};
use partherm::harness::pipelines::sample_bath;
use partherm::models::{BathSpec, CouplingKind, Ensemble};
use partherm::rng::stream;
use rayon::prelude::*;

#[derive(Parser)]
struct Args {
    #[arg(long, default_value_t = 2048)]
    d: usize,
    /// GOE realizations
    #[arg(long, default_value_t = 40)]
    goe: usize,
    /// GSE realizations
    #[arg(long, default_value_t = 6)]
    gse: usize,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long, default_value_t = 0.1)]
    h_s: f64,
    /// overwrite the bundled constants file
    #[arg(long)]
    write: bool,
}

fn ratios(beta: DysonClass, args: &Args, n: usize) -> Vec<f64> {
    let spec = BathSpec::RandomMatrix { ensemble: Ensemble::Gaussian, beta, d: args.d };
    let profile = ChiStarProfile::Semicircle { beta, d: args.d };
    let per: Vec<Vec<f64>> = (0..n as u64)
        .into_par_iter()
        .map(|r| {
            let bath = sample_bath(&spec, CouplingKind::DiagAlternating, &mut stream(args.seed + beta.beta() as u64, r)).unwrap();
            let out: Vec<f64> = bath
                .chi_samples(args.h_s, 0.25)
                .unwrap()
                .iter()
                .map(|c| c.chi / profile.chi_star(c.energy, c.sigma as f64 * args.h_s).unwrap())
                .collect();
            eprintln!("beta {} realization {r}: {} samples", beta.beta(), out.len());
            out
        })
        .collect();
    per.concat()
}

fn main() {
    let args = Args::parse();
    let goe = ratios(DysonClass::Real, &args, args.goe);
    let goe_c1 = fit_c1(Family::Goe, &goe).expect("GOE fit");
    println!("GOE: {} samples, C1 = {goe_c1:.6}, C2 = {:.6}", goe.len(), Family::Goe.c2_from_c1(goe_c1));
    let gse = ratios(DysonClass::Quaternion, &args, args.gse);
    let gse_c1 = fit_c1(Family::Gse, &gse).expect("GSE fit");
    println!("GSE: {} samples, C1' = {gse_c1:.6}, C2' = {:.6}", gse.len(), Family::Gse.c2_from_c1(gse_c1));
    let constants = FsConstants {
        version: FsConstants::frozen().version + 1,
        goe_c1,
        goe_c2: Family::Goe.c2_from_c1(goe_c1),
        gse_c1,
        gse_c2: Family::Gse.c2_from_c1(gse_c1),
        provenance: format!(
            "binned least-squares fit, d = {}, h_S = {}, mid 25% of levels, GOE {} samples ({} realizations), \
             GSE {} samples ({} realizations), seed {}",
            args.d,
            args.h_s,
            goe.len(),
            args.goe,
            gse.len(),
            args.gse,
            args.seed
        ),
    };
    let text = constants.to_toml();
    print!("{text}");
    if args.write {
        let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/fs_constants.toml");
        std::fs::write(&path, text).expect("write constants");
        println!("wrote {}", path.display());
    }
}
