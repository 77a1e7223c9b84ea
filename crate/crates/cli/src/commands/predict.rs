//! `degrade predict`: single-image cutoff prediction, optionally rescaled
//! onto another sensor's grid.

use std::path::PathBuf;

use degrade_core::camera::CameraSpec;
use degrade_core::imageio::load_image;
use degrade_core::predictor::{correct_cutoff, CutoffPredictor};

use crate::common::{file_stem, list_images, CliError, CmdResult, Outcome};
use crate::Ctx;

#[derive(clap::Args)]
pub struct Args {
    /// Trained model file.
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    /// Images to predict on.
    #[arg(long, value_name = "FILE", num_args = 1.., conflicts_with = "dir")]
    image: Vec<PathBuf>,
    /// Predict on every image in a directory instead.
    #[arg(long, value_name = "DIR")]
    dir: Option<PathBuf>,
    /// CSV output; stdout only when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Camera the model's cutoffs live on (JSON spec).
    #[arg(long, value_name = "FILE", requires = "target_camera")]
    source_camera: Option<PathBuf>,
    /// Camera to rescale predictions onto (JSON spec).
    #[arg(long, value_name = "FILE", requires = "source_camera")]
    target_camera: Option<PathBuf>,
}

pub fn run(ctx: &Ctx, args: &Args) -> CmdResult {
    let model = CutoffPredictor::load(&args.model)?;
    let cameras = match (&args.source_camera, &args.target_camera) {
        (Some(src), Some(tgt)) => Some((
            CameraSpec::from_json_file(src)?,
            CameraSpec::from_json_file(tgt)?,
        )),
        _ => None,
    };

    let files: Vec<PathBuf> = match &args.dir {
        Some(dir) => list_images(dir)?,
        None => args.image.clone(),
    };
    if files.is_empty() {
        return Err(CliError::Config("no input images given".into()));
    }

    let mut writer = match &args.out {
        Some(path) => Some(csv::Writer::from_path(path)?),
        None => None,
    };
    if let Some(w) = writer.as_mut() {
        let mut header = vec!["file", "cutoff_cyc_per_sample"];
        if cameras.is_some() {
            header.push("corrected_cyc_per_sample");
        }
        w.write_record(header)?;
    }

    let mut failures = 0usize;
    for path in &files {
        let stem = file_stem(path);
        let outcome = (|| -> Result<(), CliError> {
            let img = load_image(path)?;
            let cutoff = model.predict_image(&img)?;
            let corrected = match &cameras {
                Some((src, tgt)) => Some(correct_cutoff(cutoff, src, tgt)?),
                None => None,
            };
            match corrected {
                Some(c) => println!("{stem}: cutoff {cutoff:.4}, corrected {c:.4}"),
                None => println!("{stem}: cutoff {cutoff:.4}"),
            }
            if let Some(w) = writer.as_mut() {
                let mut record = vec![stem.clone(), format!("{cutoff:.9}")];
                if let Some(c) = corrected {
                    record.push(format!("{c:.9}"));
                }
                w.write_record(record)?;
            }
            Ok(())
        })();
        if let Err(e) = outcome {
            failures += 1;
            eprintln!("{stem}: {e}");
        } else if ctx.verbose {
            eprintln!("{stem}: predicted");
        }
    }
    if let Some(w) = writer.as_mut() {
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    }

    if failures == 0 {
        Ok(Outcome::Clean)
    } else {
        Ok(Outcome::Partial)
    }
}
