//! `degrade evaluate`: PSNR/SSIM scoring of one directory against another.

use std::path::PathBuf;

use degrade_core::imageio::load_image;
use degrade_core::metrics::{psnr, ssim};

use crate::common::{
    file_stem, list_images, matching_file, CliError, CmdResult, Outcome,
};
use crate::Ctx;

#[derive(clap::Args)]
pub struct Args {
    /// Ground-truth images.
    #[arg(long, value_name = "DIR")]
    reference_dir: PathBuf,
    /// Images under test, matched by file name.
    #[arg(long, value_name = "DIR")]
    test_dir: PathBuf,
    /// Per-file CSV output; stdout only when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn run(ctx: &Ctx, args: &Args) -> CmdResult {
    let refs = list_images(&args.reference_dir)?;
    if refs.is_empty() {
        return Err(CliError::Config(format!(
            "no images found in {}",
            args.reference_dir.display()
        )));
    }

    let mut writer = match &args.out {
        Some(path) => Some(csv::Writer::from_path(path)?),
        None => None,
    };
    if let Some(w) = writer.as_mut() {
        w.write_record(["file", "psnr_db", "ssim"])?;
    }

    let mut failures = 0usize;
    let mut psnr_sum = 0.0;
    let mut ssim_sum = 0.0;
    let mut scored = 0usize;
    for ref_path in &refs {
        let stem = file_stem(ref_path);
        let outcome = (|| -> Result<(f64, f64), CliError> {
            let test_path = matching_file(&args.test_dir, ref_path).ok_or_else(|| {
                CliError::Io(format!("no counterpart for {stem} in {}", args.test_dir.display()))
            })?;
            let a = load_image(ref_path)?;
            let b = load_image(&test_path)?;
            Ok((psnr(&a, &b)?, ssim(&a, &b)?))
        })();
        match outcome {
            Ok((p, s)) => {
                scored += 1;
                psnr_sum += p;
                ssim_sum += s;
                println!("{stem}: psnr {p:.2} dB, ssim {s:.4}");
                if let Some(w) = writer.as_mut() {
                    w.write_record([stem.clone(), format!("{p:.6}"), format!("{s:.6}")])?;
                }
            }
            Err(e) => {
                failures += 1;
                eprintln!("{stem}: {e}");
            }
        }
        if ctx.verbose {
            eprintln!("{stem}: scored");
        }
    }
    if let Some(w) = writer.as_mut() {
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    }
    if scored > 0 {
        println!(
            "mean over {scored}: psnr {:.2} dB, ssim {:.4}",
            psnr_sum / scored as f64,
            ssim_sum / scored as f64
        );
    }

    if failures == 0 {
        Ok(Outcome::Clean)
    } else {
        Ok(Outcome::Partial)
    }
}
