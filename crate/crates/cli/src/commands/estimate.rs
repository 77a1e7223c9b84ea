//! `degrade estimate`: per-pair cutoff estimation with profile exports.

use std::path::PathBuf;

use degrade_core::spectral::{estimate_pair_cutoff, EstimateOptions};

use crate::common::{
    ensure_dir, file_stem, list_images, load_config, load_matched_pair, matching_file, write_json,
    CliError, CmdResult, Outcome,
};
use crate::plot::save_profile_plot;
use crate::Ctx;

#[derive(clap::Args)]
pub struct Args {
    /// Directory of sharp reference images.
    #[arg(long, value_name = "DIR")]
    hr_dir: PathBuf,
    /// Directory of degraded counterparts, matched by file name.
    #[arg(long, value_name = "DIR")]
    lr_dir: PathBuf,
    /// Output directory for profiles, sidecars, plots, and the summary.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Radial bin count; defaults to half the shorter image side.
    #[arg(long)]
    radial_bins: Option<usize>,
    /// Rays per radial bin.
    #[arg(long)]
    angular_samples: Option<usize>,
    /// Skip the per-pair profile plot PNGs.
    #[arg(long)]
    no_plot: bool,
}

pub fn run(ctx: &Ctx, args: &Args) -> CmdResult {
    let mut opts: EstimateOptions = match &ctx.config {
        Some(path) => load_config(path)?,
        None => EstimateOptions::default(),
    };
    if args.radial_bins.is_some() {
        opts.radial_bins = args.radial_bins;
    }
    if let Some(n) = args.angular_samples {
        opts.angular_samples = n;
    }

    let hr_files = list_images(&args.hr_dir)?;
    if hr_files.is_empty() {
        return Err(CliError::Config(format!(
            "no images found in {}",
            args.hr_dir.display()
        )));
    }
    ensure_dir(&args.out)?;

    let mut summary = csv::Writer::from_path(args.out.join("estimates.csv"))?;
    summary.write_record([
        "file",
        "cutoff_bin",
        "cutoff_cyc_per_sample",
        "plateau",
        "confidence",
    ])?;

    let mut failures = 0usize;
    for hr_path in &hr_files {
        let stem = file_stem(hr_path);
        let outcome = (|| -> Result<(), CliError> {
            let lr_path = matching_file(&args.lr_dir, hr_path).ok_or_else(|| {
                CliError::Io(format!(
                    "no degraded counterpart for {} in {}",
                    hr_path.display(),
                    args.lr_dir.display()
                ))
            })?;
            let (hr, lr) = load_matched_pair(hr_path, &lr_path)?;
            let est = estimate_pair_cutoff(&hr, &lr, &opts)?;

            let mut profile_csv = Vec::new();
            est.profile.write_csv(&mut profile_csv)?;
            std::fs::write(args.out.join(format!("{stem}_profile.csv")), profile_csv)?;
            write_json(&args.out.join(format!("{stem}_estimate.json")), &est.sidecar())?;
            if !args.no_plot {
                save_profile_plot(&est, &args.out.join(format!("{stem}_profile.png")))?;
            }
            summary.write_record([
                stem.clone(),
                est.cutoff_bin.to_string(),
                format!("{:.9}", est.cutoff_cyc_per_sample),
                format!("{:.9}", est.plateau),
                format!("{:.6}", est.confidence),
            ])?;
            println!(
                "{stem}: cutoff {:.4} cyc/sample (bin {}, confidence {:.2})",
                est.cutoff_cyc_per_sample, est.cutoff_bin, est.confidence
            );
            Ok(())
        })();
        if let Err(e) = outcome {
            failures += 1;
            eprintln!("{stem}: {e}");
        } else if ctx.verbose {
            eprintln!("{stem}: done");
        }
    }
    summary.flush().map_err(|e| CliError::Io(e.to_string()))?;

    if failures == 0 {
        Ok(Outcome::Clean)
    } else {
        eprintln!("{failures} of {} pairs failed", hr_files.len());
        Ok(Outcome::Partial)
    }
}
