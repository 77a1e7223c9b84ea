//! `degrade build-trainset`: matched pairs in, labeled patch corpus out.

use std::path::PathBuf;

use degrade_core::predictor::{build_training_set, BuildOptions};
use degrade_core::Error;

use crate::common::{
    list_images, load_config, load_matched_pair, matching_file, CliError, CmdResult, Outcome,
};
use crate::Ctx;

#[derive(clap::Args)]
pub struct Args {
    /// Directory of sharp reference images.
    #[arg(long, value_name = "DIR")]
    hr_dir: PathBuf,
    /// Directory of degraded counterparts, matched by file name.
    #[arg(long, value_name = "DIR")]
    lr_dir: PathBuf,
    /// Corpus file to write (JSON).
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Square patch side in pixels.
    #[arg(long)]
    patch_size: Option<usize>,
    /// Patch grid step in pixels.
    #[arg(long)]
    patch_stride: Option<usize>,
    /// Drop pairs whose detection confidence falls below this.
    #[arg(long)]
    min_confidence: Option<f64>,
}

pub fn run(ctx: &Ctx, args: &Args) -> CmdResult {
    let mut opts: BuildOptions = match &ctx.config {
        Some(path) => load_config(path)?,
        None => BuildOptions::default(),
    };
    if let Some(v) = args.patch_size {
        opts.patch.size = v;
    }
    if let Some(v) = args.patch_stride {
        opts.patch.stride = v;
    }
    if let Some(v) = args.min_confidence {
        opts.min_confidence = v;
    }

    let hr_files = list_images(&args.hr_dir)?;
    if hr_files.is_empty() {
        return Err(CliError::Config(format!(
            "no images found in {}",
            args.hr_dir.display()
        )));
    }
    let mut pairs = Vec::with_capacity(hr_files.len());
    let mut skipped = 0usize;
    for hr_path in &hr_files {
        match matching_file(&args.lr_dir, hr_path) {
            Some(lr_path) => match load_matched_pair(hr_path, &lr_path) {
                Ok(pair) => pairs.push(pair),
                Err(e) => {
                    skipped += 1;
                    eprintln!("{}: {e}", hr_path.display());
                }
            },
            None => {
                skipped += 1;
                eprintln!("{}: no degraded counterpart", hr_path.display());
            }
        }
    }
    if pairs.is_empty() {
        return Err(CliError::Io("no loadable pairs".into()));
    }

    match build_training_set(&pairs, &opts) {
        Ok((set, report)) => {
            set.save(&args.out)?;
            println!(
                "corpus: {} samples from {} pairs ({} dropped for low confidence) -> {}",
                report.samples,
                report.pairs_used,
                report.pairs_dropped,
                args.out.display()
            );
            if ctx.verbose {
                eprintln!(
                    "patch {}x{0} stride {}, min confidence {}",
                    opts.patch.size, opts.patch.stride, opts.min_confidence
                );
            }
            if skipped == 0 {
                Ok(Outcome::Clean)
            } else {
                Ok(Outcome::Partial)
            }
        }
        // Every pair rejected is a degraded outcome, not a usage mistake.
        Err(Error::EmptyTrainingSet(msg)) => {
            eprintln!("{msg}");
            Ok(Outcome::Partial)
        }
        Err(e) => Err(e.into()),
    }
}
