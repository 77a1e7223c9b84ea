//! `degrade synthesize`: run sharp images through the degradation chain
//! into an HR/LR dataset with a manifest.

use std::path::PathBuf;

use degrade_core::camera::{pixel_size_ratio, CameraSpec};
use degrade_core::degradation::{synthesize_lr_indexed, DegradationConfig};
use degrade_core::imageio::{load_image, save_image};

use crate::common::{
    ensure_dir, file_stem, list_images, load_config, CliError, CmdResult, Outcome,
};
use crate::Ctx;

#[derive(clap::Args)]
pub struct Args {
    /// Directory of sharp source images.
    #[arg(long, value_name = "DIR")]
    hr_dir: PathBuf,
    /// Dataset root to create (HR/, LR/, manifest.csv).
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Transfer knee on the source grid, cycles/sample.
    #[arg(long)]
    cutoff: Option<f64>,
    /// Filter steepness.
    #[arg(long)]
    order: Option<u32>,
    /// Integer decimation factor.
    #[arg(long)]
    downsample: Option<usize>,
    /// Read noise standard deviation in [0, 1] units.
    #[arg(long)]
    noise_sigma: Option<f64>,
    /// Pixel-pitch ratio rescaling the knee onto a target sensor's grid.
    #[arg(long, conflicts_with_all = ["source_camera", "target_camera"])]
    alpha: Option<f64>,
    /// Camera the cutoff was estimated on (JSON spec); needs --target-camera.
    #[arg(long, value_name = "FILE", requires = "target_camera")]
    source_camera: Option<PathBuf>,
    /// Camera being synthesized for (JSON spec); needs --source-camera.
    #[arg(long, value_name = "FILE", requires = "source_camera")]
    target_camera: Option<PathBuf>,
}

pub fn run(ctx: &Ctx, args: &Args) -> CmdResult {
    let mut config: DegradationConfig = match &ctx.config {
        Some(path) => load_config(path)?,
        None => DegradationConfig::default(),
    };
    if let Some(v) = args.cutoff {
        config.cutoff = v;
    }
    if let Some(v) = args.order {
        config.order = v;
    }
    if let Some(v) = args.downsample {
        config.downsample = v;
    }
    if let Some(v) = args.noise_sigma {
        config.noise_sigma = v;
    }
    if let Some(v) = ctx.seed {
        config.seed = v;
    }

    let alpha = match (&args.alpha, &args.source_camera, &args.target_camera) {
        (Some(a), _, _) => *a,
        (None, Some(src), Some(tgt)) => {
            let src = CameraSpec::from_json_file(src)?;
            let tgt = CameraSpec::from_json_file(tgt)?;
            pixel_size_ratio(&src, &tgt)
        }
        _ => 1.0,
    };
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(CliError::Config(format!(
            "pitch ratio must be positive, got {alpha}"
        )));
    }
    let f_c_source = config.cutoff;
    config.cutoff = (f_c_source * alpha).min(0.5);
    config.validate()?;

    let files = list_images(&args.hr_dir)?;
    if files.is_empty() {
        return Err(CliError::Config(format!(
            "no images found in {}",
            args.hr_dir.display()
        )));
    }
    let hr_out = args.out.join("HR");
    let lr_out = args.out.join("LR");
    ensure_dir(&hr_out)?;
    ensure_dir(&lr_out)?;

    let mut manifest = csv::Writer::from_path(args.out.join("manifest.csv"))?;
    manifest.write_record([
        "file",
        "f_c_source",
        "alpha",
        "f_c_target",
        "downsample_factor",
        "noise_sigma",
    ])?;

    let mut failures = 0usize;
    for (index, path) in files.iter().enumerate() {
        let stem = file_stem(path);
        let name = format!("{stem}.png");
        let outcome = (|| -> Result<(), CliError> {
            let hr = load_image(path)?;
            let lr = synthesize_lr_indexed(&hr, &config, index as u64)?;
            save_image(hr_out.join(&name), &hr)?;
            save_image(lr_out.join(&name), &lr)?;
            manifest.write_record([
                name.clone(),
                format!("{f_c_source:.9}"),
                format!("{alpha:.9}"),
                format!("{:.9}", config.cutoff),
                config.downsample.to_string(),
                format!("{:.9}", config.noise_sigma),
            ])?;
            Ok(())
        })();
        if let Err(e) = outcome {
            failures += 1;
            eprintln!("{stem}: {e}");
        } else if ctx.verbose {
            eprintln!("{stem}: synthesized");
        }
    }
    manifest.flush().map_err(|e| CliError::Io(e.to_string()))?;
    println!(
        "synthesized {} of {} images into {} (knee {:.4}, x{} decimation)",
        files.len() - failures,
        files.len(),
        args.out.display(),
        config.cutoff,
        config.downsample
    );

    if failures == 0 {
        Ok(Outcome::Clean)
    } else {
        Ok(Outcome::Partial)
    }
}
