//! `degrade alpha-beta`: two-sensor cutoff transfer check on the built-in rig.
//!
//! Captures matching pairs with two degraded-side cameras, estimates each
//! cutoff spectrally, rescales the first by the pixel size ratio, and reports
//! how closely that prediction lands on the second camera's estimate.

use std::path::PathBuf;

use degrade_core::simulator::{alpha_beta_experiment, AlphaBetaConfig};

use crate::common::{load_config, write_json, CmdResult, Outcome};
use crate::Ctx;

#[derive(clap::Args)]
pub struct Args {
    /// Optional path for the JSON report.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn run(ctx: &Ctx, args: &Args) -> CmdResult {
    let mut config: AlphaBetaConfig = match &ctx.config {
        Some(path) => load_config(path)?,
        None => AlphaBetaConfig::reference_rig(),
    };
    if let Some(v) = ctx.seed {
        config.seed = v;
    }

    let report = alpha_beta_experiment(&config)?;
    println!("pixel size ratio: {:.6}", report.alpha);
    println!(
        "camera a: estimated cutoff {:.4} (truth {:.4}, confidence {:.2})",
        report.estimated_cutoff_a, report.truth_cutoff_a, report.confidence_a
    );
    println!(
        "camera b: estimated cutoff {:.4} (truth {:.4}, confidence {:.2})",
        report.estimated_cutoff_b, report.truth_cutoff_b, report.confidence_b
    );
    println!(
        "transferred prediction for b: {:.4} (relative error {:.2}%)",
        report.predicted_cutoff_b,
        report.relative_error * 100.0
    );
    if let Some(path) = &args.out {
        write_json(path, &report)?;
        if ctx.verbose {
            eprintln!("wrote report to {}", path.display());
        }
    }
    Ok(Outcome::Clean)
}
