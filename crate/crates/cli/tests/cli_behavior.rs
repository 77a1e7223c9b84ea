//! End-to-end behavior of the `degrade` binary: exit taxonomy, file
//! round trips, and the predict chain, all through real process spawns.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use degrade_core::imageio::{save_image, Image};
use degrade_core::simulator::{render_scene, ScenePattern};

fn degrade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degrade"))
        .args(args)
        .output()
        .expect("spawn degrade")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn noise_images_named(dir: &Path, prefix: &str, count: usize, size: usize) -> Vec<PathBuf> {
    std::fs::create_dir_all(dir).unwrap();
    (0..count)
        .map(|i| {
            let seed = 90 + i as u64 + prefix.len() as u64 * 1000;
            let field = render_scene(&ScenePattern::WhiteNoise { seed }, size, 1.0).unwrap();
            let img = Image::from_clamped(size, size, 1, field.values().to_vec()).unwrap();
            let path = dir.join(format!("{prefix}_{i}.png"));
            save_image(&path, &img).unwrap();
            path
        })
        .collect()
}

fn noise_images(dir: &Path, count: usize, size: usize) -> Vec<PathBuf> {
    noise_images_named(dir, "img", count, size)
}

/// Copies every file from `src` into `dst`.
fn pour(src: &Path, dst: &Path) {
    std::fs::create_dir_all(dst).unwrap();
    for entry in std::fs::read_dir(src).unwrap() {
        let path = entry.unwrap().path();
        std::fs::copy(&path, dst.join(path.file_name().unwrap())).unwrap();
    }
}

#[test]
fn shipped_camera_specs_load_and_pair_up() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../assets/cameras");
    let coarse = degrade_core::camera::CameraSpec::from_json_file(dir.join("surveillance-coarse.json"))
        .expect("coarse spec");
    let fine = degrade_core::camera::CameraSpec::from_json_file(dir.join("surveillance-fine.json"))
        .expect("fine spec");
    let ratio = degrade_core::camera::pixel_size_ratio(&coarse, &fine);
    assert!((ratio - 6.25 / 4.88).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&degrade(&[])), 2);
    assert_eq!(code(&degrade(&["estimate"])), 2);
    assert_eq!(code(&degrade(&["synthesize", "--bogus-flag"])), 2);
}

#[test]
fn missing_input_directory_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = degrade(&[
        "estimate",
        "--hr-dir",
        &s(&tmp.path().join("nowhere")),
        "--lr-dir",
        &s(&tmp.path().join("nowhere")),
        "--out",
        &s(&tmp.path().join("out")),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn invalid_config_file_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    std::fs::write(&cfg, "not json at all").unwrap();
    noise_images(&tmp.path().join("in"), 1, 64);
    let out = degrade(&[
        "--config",
        &s(&cfg),
        "synthesize",
        "--hr-dir",
        &s(&tmp.path().join("in")),
        "--out",
        &s(&tmp.path().join("out")),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn unwritable_output_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    noise_images(&tmp.path().join("in"), 1, 64);
    let blocker = tmp.path().join("blocker");
    std::fs::write(&blocker, "a plain file").unwrap();
    let out = degrade(&[
        "synthesize",
        "--hr-dir",
        &s(&tmp.path().join("in")),
        "--out",
        &s(&blocker.join("nested")),
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn corrupt_pair_degrades_to_partial() {
    let tmp = tempfile::tempdir().unwrap();
    let hr_dir = tmp.path().join("hr");
    let lr_dir = tmp.path().join("lr");
    noise_images(&hr_dir, 2, 64);
    noise_images(&lr_dir, 2, 64);
    std::fs::write(lr_dir.join("img_1.png"), "definitely not a png").unwrap();

    let out_dir = tmp.path().join("out");
    let out = degrade(&[
        "estimate",
        "--hr-dir",
        &s(&hr_dir),
        "--lr-dir",
        &s(&lr_dir),
        "--out",
        &s(&out_dir),
        "--no-plot",
    ]);
    assert_eq!(code(&out), 1);

    // The healthy pair still made it through.
    let summary = std::fs::read_to_string(out_dir.join("estimates.csv")).unwrap();
    assert!(summary.contains("img_0"));
    assert!(!summary.contains("img_1"));
}

#[test]
fn evaluate_scores_identical_directories_perfectly() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("imgs");
    noise_images(&dir, 2, 64);
    let csv_path = tmp.path().join("scores.csv");
    let out = degrade(&[
        "evaluate",
        "--reference-dir",
        &s(&dir),
        "--test-dir",
        &s(&dir),
        "--out",
        &s(&csv_path),
    ]);
    assert_eq!(code(&out), 0);

    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.unwrap();
        rows += 1;
        assert_eq!(record[1].parse::<f64>().unwrap(), f64::INFINITY);
        assert_eq!(record[2].parse::<f64>().unwrap(), 1.0);
    }
    assert_eq!(rows, 2);
}

#[test]
fn estimate_summary_matches_its_sidecars() {
    let tmp = tempfile::tempdir().unwrap();
    let inputs = tmp.path().join("in");
    noise_images(&inputs, 1, 128);
    let dataset = tmp.path().join("set");
    let out = degrade(&[
        "synthesize",
        "--hr-dir",
        &s(&inputs),
        "--out",
        &s(&dataset),
        "--cutoff",
        "0.2",
        "--order",
        "3",
        "--noise-sigma",
        "0",
        "--seed",
        "1",
    ]);
    assert_eq!(code(&out), 0);

    let est_dir = tmp.path().join("est");
    let out = degrade(&[
        "estimate",
        "--hr-dir",
        &s(&dataset.join("HR")),
        "--lr-dir",
        &s(&dataset.join("LR")),
        "--out",
        &s(&est_dir),
        "--radial-bins",
        "32",
    ]);
    assert_eq!(code(&out), 0);

    // Summary row, sidecar JSON, and profile CSV all describe one result.
    let mut reader = csv::Reader::from_path(est_dir.join("estimates.csv")).unwrap();
    let record = reader.records().next().unwrap().unwrap();
    let summary_cutoff: f64 = record[2].parse().unwrap();

    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(est_dir.join("img_0_estimate.json")).unwrap())
            .unwrap();
    assert_eq!(
        sidecar["cutoff_bin"].as_u64().unwrap().to_string(),
        &record[1]
    );
    let sidecar_cutoff = sidecar["cutoff_cyc_per_sample"].as_f64().unwrap();
    assert!((summary_cutoff - sidecar_cutoff).abs() < 1e-9);

    let profile = std::fs::read_to_string(est_dir.join("img_0_profile.csv")).unwrap();
    // Header plus the requested 32 bins.
    assert_eq!(profile.lines().count(), 33);
    assert!(profile.starts_with("radius_bin,freq_cyc_per_sample,value"));

    // The plot was not suppressed this time.
    assert!(est_dir.join("img_0_profile.png").is_file());

    // The detected knee is the one the synthesis dialed in.
    assert!(
        (summary_cutoff - 0.2).abs() < 0.03,
        "estimated {summary_cutoff}, synthesized 0.2"
    );
}

#[test]
fn predict_chain_separates_two_synthesized_knees() {
    let tmp = tempfile::tempdir().unwrap();
    let blunt_in = tmp.path().join("in_blunt");
    let sharp_in = tmp.path().join("in_sharp");
    noise_images_named(&blunt_in, "blunt", 2, 128);
    noise_images_named(&sharp_in, "sharp", 2, 128);

    let synth = |inputs: &Path, out: &Path, cutoff: &str, seed: &str| {
        let out = degrade(&[
            "synthesize",
            "--hr-dir",
            &s(inputs),
            "--out",
            &s(out),
            "--cutoff",
            cutoff,
            "--order",
            "3",
            "--noise-sigma",
            "0.002",
            "--seed",
            seed,
        ]);
        assert_eq!(code(&out), 0);
    };
    let blunt_set = tmp.path().join("set_blunt");
    let sharp_set = tmp.path().join("set_sharp");
    synth(&blunt_in, &blunt_set, "0.18", "5");
    synth(&sharp_in, &sharp_set, "0.38", "6");

    // One mixed corpus covering both knees.
    let mixed = tmp.path().join("mixed");
    pour(&blunt_set.join("HR"), &mixed.join("HR"));
    pour(&sharp_set.join("HR"), &mixed.join("HR"));
    pour(&blunt_set.join("LR"), &mixed.join("LR"));
    pour(&sharp_set.join("LR"), &mixed.join("LR"));

    let corpus = tmp.path().join("corpus.json");
    let out = degrade(&[
        "build-trainset",
        "--hr-dir",
        &s(&mixed.join("HR")),
        "--lr-dir",
        &s(&mixed.join("LR")),
        "--out",
        &s(&corpus),
        "--patch-size",
        "32",
        "--patch-stride",
        "16",
    ]);
    assert_eq!(code(&out), 0);

    let model = tmp.path().join("model.json");
    let out = degrade(&[
        "train-predictor",
        "--trainset",
        &s(&corpus),
        "--out",
        &s(&model),
        "--patch-size",
        "32",
        "--patch-stride",
        "16",
    ]);
    assert_eq!(code(&out), 0);
    assert!(model.is_file());

    let predictions = tmp.path().join("pred.csv");
    let out = degrade(&[
        "predict",
        "--model",
        &s(&model),
        "--dir",
        &s(&mixed.join("LR")),
        "--out",
        &s(&predictions),
    ]);
    assert_eq!(code(&out), 0);

    let mut reader = csv::Reader::from_path(&predictions).unwrap();
    let (mut blunt, mut sharp) = (Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record.unwrap();
        let cutoff: f64 = record[1].parse().unwrap();
        assert!((0.05..=0.5).contains(&cutoff), "prediction {cutoff}");
        if record[0].starts_with("blunt") {
            blunt.push(cutoff);
        } else {
            sharp.push(cutoff);
        }
    }
    assert_eq!((blunt.len(), sharp.len()), (2, 2));
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    assert!(
        mean(&blunt) < mean(&sharp),
        "blunt {blunt:?} should predict below sharp {sharp:?}"
    );
}

#[test]
fn train_flags_a_degenerate_corpus() {
    let tmp = tempfile::tempdir().unwrap();
    let inputs = tmp.path().join("in");
    noise_images(&inputs, 2, 128);
    let dataset = tmp.path().join("set");
    assert_eq!(
        code(&degrade(&[
            "synthesize",
            "--hr-dir",
            &s(&inputs),
            "--out",
            &s(&dataset),
            "--cutoff",
            "0.3",
            "--noise-sigma",
            "0",
            "--seed",
            "5",
        ])),
        0
    );
    let corpus = tmp.path().join("corpus.json");
    assert_eq!(
        code(&degrade(&[
            "build-trainset",
            "--hr-dir",
            &s(&dataset.join("HR")),
            "--lr-dir",
            &s(&dataset.join("LR")),
            "--out",
            &s(&corpus),
            "--patch-size",
            "32",
            "--patch-stride",
            "16",
        ])),
        0
    );
    // Every label identical: the fit goes through but the result is
    // degraded, and the exit code says so.
    let out = degrade(&[
        "train-predictor",
        "--trainset",
        &s(&corpus),
        "--out",
        &s(&tmp.path().join("model.json")),
        "--patch-size",
        "32",
        "--patch-stride",
        "16",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn predict_rejects_images_smaller_than_its_patches() {
    let tmp = tempfile::tempdir().unwrap();
    let inputs = tmp.path().join("in");
    noise_images(&inputs, 2, 128);
    let dataset = tmp.path().join("set");
    assert_eq!(
        code(&degrade(&[
            "synthesize",
            "--hr-dir",
            &s(&inputs),
            "--out",
            &s(&dataset),
            "--cutoff",
            "0.25",
            "--seed",
            "2",
        ])),
        0
    );
    let corpus = tmp.path().join("corpus.json");
    assert_eq!(
        code(&degrade(&[
            "build-trainset",
            "--hr-dir",
            &s(&dataset.join("HR")),
            "--lr-dir",
            &s(&dataset.join("LR")),
            "--out",
            &s(&corpus),
            "--patch-size",
            "32",
            "--patch-stride",
            "32",
        ])),
        0
    );
    let model = tmp.path().join("model.json");
    assert_eq!(
        code(&degrade(&[
            "train-predictor",
            "--trainset",
            &s(&corpus),
            "--out",
            &s(&model),
            "--patch-size",
            "32",
            "--patch-stride",
            "32",
        ])),
        0
    );

    let tiny_dir = tmp.path().join("tiny");
    noise_images(&tiny_dir, 1, 16);
    let out = degrade(&["predict", "--model", &s(&model), "--dir", &s(&tiny_dir)]);
    // Every input failed, but the command itself limped through.
    assert_eq!(code(&out), 1);
}

#[test]
fn config_file_fields_reach_the_estimator() {
    let tmp = tempfile::tempdir().unwrap();
    let inputs = tmp.path().join("in");
    noise_images(&inputs, 1, 128);
    let dataset = tmp.path().join("set");
    assert_eq!(
        code(&degrade(&[
            "synthesize",
            "--hr-dir",
            &s(&inputs),
            "--out",
            &s(&dataset),
            "--cutoff",
            "0.2",
            "--seed",
            "1",
        ])),
        0
    );

    let cfg = tmp.path().join("est.json");
    std::fs::write(&cfg, r#"{ "radial_bins": 24 }"#).unwrap();
    let est_dir = tmp.path().join("est");
    assert_eq!(
        code(&degrade(&[
            "--config",
            &s(&cfg),
            "estimate",
            "--hr-dir",
            &s(&dataset.join("HR")),
            "--lr-dir",
            &s(&dataset.join("LR")),
            "--out",
            &s(&est_dir),
            "--no-plot",
        ])),
        0
    );
    let profile = std::fs::read_to_string(est_dir.join("img_0_profile.csv")).unwrap();
    assert_eq!(profile.lines().count(), 25);
}
