//! `degrade`: estimate, model, and synthesize camera-style image
//! degradations from the command line.
//!
//! Exit codes: 0 success, 1 some inputs failed or the result is degraded,
//! 2 bad arguments or configuration, 3 filesystem or codec trouble.

mod commands;
mod common;
mod plot;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use common::Outcome;
use degrade_core::parallel::run_with_jobs;

#[derive(Parser)]
#[command(
    name = "degrade",
    version,
    about = "Frequency-domain camera degradation toolkit"
)]
struct Cli {
    /// Command-specific JSON config; flags override its fields.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Base seed for every stochastic step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Chatty per-item progress on stderr.
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate transfer cutoffs from matched sharp/degraded pairs.
    Estimate(commands::estimate::Args),
    /// Run sharp images through the degradation chain into a dataset.
    Synthesize(commands::synthesize::Args),
    /// Build a labeled patch corpus from matched pairs.
    BuildTrainset(commands::trainset::Args),
    /// Fit the single-image cutoff model on a corpus.
    TrainPredictor(commands::train::Args),
    /// Predict cutoffs for images that have no sharp counterpart.
    Predict(commands::predict::Args),
    /// Score one directory against another with PSNR and SSIM.
    Evaluate(commands::evaluate::Args),
    /// Generate ground-truthed pairs from the built-in camera rig.
    Simulate(commands::simulate::Args),
    /// Cross-sensor pitch-transfer experiment on simulated captures.
    AlphaBeta(commands::alpha_beta::Args),
}

/// Global knobs every command can see.
pub struct Ctx {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub verbose: bool,
}

#[derive(Parser)]
struct FullCli {
    #[command(flatten)]
    global: Cli,
    #[command(subcommand)]
    command: Command,
}

fn main() -> ExitCode {
    let cli = FullCli::parse();
    let ctx = Ctx {
        config: cli.global.config.clone(),
        seed: cli.global.seed,
        verbose: cli.global.verbose,
    };
    let result = run_with_jobs(cli.global.jobs, || match &cli.command {
        Command::Estimate(args) => commands::estimate::run(&ctx, args),
        Command::Synthesize(args) => commands::synthesize::run(&ctx, args),
        Command::BuildTrainset(args) => commands::trainset::run(&ctx, args),
        Command::TrainPredictor(args) => commands::train::run(&ctx, args),
        Command::Predict(args) => commands::predict::run(&ctx, args),
        Command::Evaluate(args) => commands::evaluate::run(&ctx, args),
        Command::Simulate(args) => commands::simulate::run(&ctx, args),
        Command::AlphaBeta(args) => commands::alpha_beta::run(&ctx, args),
    });
    match result {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
