//! `degrade train-predictor`: fit the ridge model on a saved corpus.

use std::path::PathBuf;

use degrade_core::predictor::{train, PatchOptions, TrainOptions, TrainingSet};

use crate::common::{load_config, CmdResult, Outcome};
use crate::Ctx;

#[derive(clap::Args)]
pub struct Args {
    /// Corpus produced by build-trainset.
    #[arg(long, value_name = "FILE")]
    trainset: PathBuf,
    /// Model file to write (JSON).
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Ridge penalty.
    #[arg(long)]
    lambda: Option<f64>,
    /// Patch side the corpus was built with.
    #[arg(long)]
    patch_size: Option<usize>,
    /// Patch stride to bake into the model for whole-image prediction.
    #[arg(long)]
    patch_stride: Option<usize>,
}

pub fn run(ctx: &Ctx, args: &Args) -> CmdResult {
    let mut train_opts = TrainOptions::default();
    let mut patch = PatchOptions::default();
    if let Some(path) = &ctx.config {
        #[derive(serde::Deserialize)]
        #[serde(default)]
        struct Config {
            lambda: f64,
            patch: PatchOptions,
        }
        impl Default for Config {
            fn default() -> Self {
                Self {
                    lambda: TrainOptions::default().lambda,
                    patch: PatchOptions::default(),
                }
            }
        }
        let config: Config = load_config(path)?;
        train_opts.lambda = config.lambda;
        patch = config.patch;
    }
    if let Some(v) = args.lambda {
        train_opts.lambda = v;
    }
    if let Some(v) = args.patch_size {
        patch.size = v;
    }
    if let Some(v) = args.patch_stride {
        patch.stride = v;
    }

    let set = TrainingSet::load(&args.trainset)?;
    let model = train(&set, &patch, &train_opts)?;
    model.save(&args.out)?;
    println!(
        "trained on {} samples (dim {}), bias {:.4} -> {}",
        set.len(),
        set.feature_dim(),
        model.bias(),
        args.out.display()
    );
    if model.meta().degenerate {
        eprintln!("labels had no spread; the model always answers its bias");
        return Ok(Outcome::Partial);
    }
    if ctx.verbose {
        eprintln!("lambda {}", train_opts.lambda);
    }
    Ok(Outcome::Clean)
}
