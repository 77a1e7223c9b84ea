//! Single-image cutoff prediction.
//!
//! Estimating a cutoff needs a sharp/degraded pair; deployment usually has
//! only the degraded side's sharp counterpart missing. The bridge is a
//! linear model trained on pairs: each sharp image is cut into patches,
//! every patch becomes a radial log-spectrum feature vector, and the pair's
//! estimated cutoff becomes the label for all of its patches. At predict
//! time patch features from a lone image are averaged through the model.
//!
//! Features are gain-invariant by construction: spectrum magnitudes are
//! normalized by their own mean before the log, so a global exposure change
//! cancels exactly, and the profile is mean-centered on top of that.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use crate::camera::{pixel_size_ratio, CameraSpec};
use crate::error::{Error, Result};
use crate::imageio::Image;
use crate::spectral::{
    estimate_pair_cutoff, fft2_grid, polar_radial_average, windowed_luminance, EstimateOptions,
    RealGrid,
};

/// Current on-disk model format version.
pub const PREDICTOR_FORMAT_VERSION: u32 = 1;
/// Predictions are clamped into this physically meaningful band.
pub const CUTOFF_MIN: f64 = 1e-6;
pub const CUTOFF_MAX: f64 = 0.5;

/// Square patch tiling parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PatchOptions {
    pub size: usize,
    pub stride: usize,
}

impl Default for PatchOptions {
    fn default() -> Self {
        Self {
            size: 320,
            stride: 160,
        }
    }
}

impl PatchOptions {
    pub fn validate(&self) -> Result<()> {
        if self.size < 32 {
            return Err(Error::InvalidInput(format!(
                "patch size must be at least 32, got {}",
                self.size
            )));
        }
        if self.stride == 0 {
            return Err(Error::InvalidInput("patch stride must be positive".into()));
        }
        Ok(())
    }
}

/// Anchor positions along one axis: every stride step whose patch fits,
/// plus a final flush-right anchor when the last step leaves a remainder.
pub fn patch_anchors(dim: usize, size: usize, stride: usize) -> Vec<usize> {
    let mut anchors = Vec::new();
    let mut a = 0;
    while a + size <= dim {
        anchors.push(a);
        a += stride;
    }
    if let Some(&last) = anchors.last() {
        if last + size < dim {
            let tail = dim - size;
            if !anchors.contains(&tail) {
                anchors.push(tail);
            }
        }
    }
    anchors
}

/// Cuts `img` into square patches in row-major anchor order.
pub fn extract_patches(img: &Image, opts: &PatchOptions) -> Result<Vec<Image>> {
    opts.validate()?;
    if img.width() < opts.size || img.height() < opts.size {
        return Err(Error::InvalidInput(format!(
            "image {}x{} smaller than patch size {}",
            img.width(),
            img.height(),
            opts.size
        )));
    }
    let xs = patch_anchors(img.width(), opts.size, opts.stride);
    let ys = patch_anchors(img.height(), opts.size, opts.stride);
    let mut patches = Vec::with_capacity(xs.len() * ys.len());
    for &y in &ys {
        for &x in &xs {
            patches.push(img.crop(x, y, opts.size, opts.size)?);
        }
    }
    Ok(patches)
}

const FEATURE_ANGULAR_SAMPLES: usize = 360;
const FEATURE_EPS: f64 = 1e-8;

/// Radial log-spectrum descriptor of one square patch.
///
/// Window, transform, normalize magnitudes by their mean (exposure gain
/// cancels here), log, average over angle, subtract the profile mean.
/// Length is `size / 2`.
pub fn patch_features(patch: &Image) -> Result<Vec<f64>> {
    if patch.width() != patch.height() {
        return Err(Error::InvalidInput(format!(
            "features need a square patch, got {}x{}",
            patch.width(),
            patch.height()
        )));
    }
    let spec = fft2_grid(&windowed_luminance(patch))?;
    let mags: Vec<f64> = spec.bins().iter().map(|b| b.norm()).collect();
    let mean = mags.iter().sum::<f64>() / mags.len() as f64;
    let norm = if mean > 0.0 { 1.0 / mean } else { 1.0 };
    let logs: Vec<f64> = mags.iter().map(|m| (m * norm + FEATURE_EPS).ln()).collect();
    let grid = RealGrid::new(spec.width(), spec.height(), logs)?;
    let profile = polar_radial_average(
        &grid,
        patch.width() / 2,
        FEATURE_ANGULAR_SAMPLES,
        false,
    )?;
    let mut values = profile.values().to_vec();
    let pm = values.iter().sum::<f64>() / values.len() as f64;
    for v in &mut values {
        *v -= pm;
    }
    Ok(values)
}

/// Labeled feature rows, the unit of exchange between corpus building and
/// training.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainingSet {
    version: u32,
    feature_dim: usize,
    /// Row-major `len x feature_dim`.
    features: Vec<f64>,
    labels: Vec<f64>,
}

impl TrainingSet {
    pub fn new(feature_dim: usize) -> Self {
        Self {
            version: PREDICTOR_FORMAT_VERSION,
            feature_dim,
            features: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn push(&mut self, features: &[f64], label: f64) -> Result<()> {
        if features.len() != self.feature_dim {
            return Err(Error::DimensionMismatch(format!(
                "feature row of {} into a set of dimension {}",
                features.len(),
                self.feature_dim
            )));
        }
        self.features.extend_from_slice(features);
        self.labels.push(label);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.feature_dim..(i + 1) * self.feature_dim]
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = File::create(path)?;
        serde_json::to_writer(BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = File::open(path)?;
        let set: Self = serde_json::from_reader(BufReader::new(file))?;
        if set.version != PREDICTOR_FORMAT_VERSION {
            return Err(Error::ModelMismatch(format!(
                "training set format version {} not supported (expected {})",
                set.version, PREDICTOR_FORMAT_VERSION
            )));
        }
        if set.features.len() != set.labels.len() * set.feature_dim {
            return Err(Error::ModelMismatch(
                "training set feature buffer does not match its shape".into(),
            ));
        }
        Ok(set)
    }
}

/// Corpus construction knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BuildOptions {
    pub patch: PatchOptions,
    pub estimate: EstimateOptions,
    /// Pairs whose cutoff detection scores below this are dropped.
    pub min_confidence: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            patch: PatchOptions::default(),
            estimate: EstimateOptions::default(),
            min_confidence: 0.5,
        }
    }
}

/// What happened while building a corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildReport {
    pub pairs_used: usize,
    pub pairs_dropped: usize,
    pub samples: usize,
}

/// Builds a corpus from matched sharp/degraded pairs: one cutoff estimate
/// per pair, one feature row per degraded-side patch, the pair's cutoff
/// as every row's label. Low-confidence pairs are dropped; dropping all
/// of them is an error.
pub fn build_training_set(
    pairs: &[(Image, Image)],
    opts: &BuildOptions,
) -> Result<(TrainingSet, BuildReport)> {
    opts.patch.validate()?;
    let mut set = TrainingSet::new(opts.patch.size / 2);
    let mut dropped = 0usize;
    let mut used = 0usize;
    for (hr, lr) in pairs {
        let est = estimate_pair_cutoff(hr, lr, &opts.estimate)?;
        if est.confidence < opts.min_confidence {
            dropped += 1;
            continue;
        }
        used += 1;
        // Features come from the degraded side: prediction later runs on
        // images that have no sharp counterpart at all.
        for patch in extract_patches(lr, &opts.patch)? {
            let features = patch_features(&patch)?;
            set.push(&features, est.cutoff_cyc_per_sample)?;
        }
    }
    if set.is_empty() {
        return Err(Error::EmptyTrainingSet(format!(
            "no usable pairs: {dropped} of {} below confidence {}",
            pairs.len(),
            opts.min_confidence
        )));
    }
    let report = BuildReport {
        pairs_used: used,
        pairs_dropped: dropped,
        samples: set.len(),
    };
    Ok((set, report))
}

/// Ridge regression knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainOptions {
    /// L2 penalty on the z-scored design. Zero requests a plain
    /// least-squares (minimum-norm when underdetermined) fit.
    pub lambda: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self { lambda: 1e-3 }
    }
}

/// Auxiliary model facts carried in the serialized form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictorMeta {
    pub patch_size: usize,
    pub patch_stride: usize,
    pub angular_samples: usize,
    pub eps: f64,
    pub lambda: f64,
    /// Set when the training labels had no spread; the model then always
    /// answers with its bias.
    pub degenerate: bool,
}

/// A trained linear cutoff model.
///
/// Prediction is `clamp(w . zscore(features) + bias)`; the z-score
/// statistics travel with the weights so a model file is self-contained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffPredictor {
    version: u32,
    feature_dim: usize,
    weights: Vec<f64>,
    bias: f64,
    feature_mean: Vec<f64>,
    feature_std: Vec<f64>,
    meta: PredictorMeta,
}

fn solve_spd_or_svd(a: DMatrix<f64>, b: DVector<f64>) -> DVector<f64> {
    let n = b.len();
    if let Some(ch) = a.clone().cholesky() {
        return ch.solve(&b);
    }
    let svd = a.svd(true, true);
    svd.solve(&b, 1e-12)
        .map(|m| DVector::from_column_slice(m.as_slice()))
        .unwrap_or_else(|_| DVector::zeros(n))
}

/// Fits ridge weights on z-scored features and centered labels.
///
/// Overdetermined sets go through the `d x d` normal equations;
/// underdetermined ones through the `n x n` kernel form, whose solution is
/// the minimum-norm interpolant at `lambda == 0`. A standard deviation
/// below 1e-12 on any feature freezes its scale at 1 to keep the z-score
/// finite.
pub fn train(set: &TrainingSet, patch: &PatchOptions, opts: &TrainOptions) -> Result<CutoffPredictor> {
    if set.is_empty() {
        return Err(Error::EmptyTrainingSet("cannot train on an empty set".into()));
    }
    if !(opts.lambda.is_finite() && opts.lambda >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "lambda must be non-negative, got {}",
            opts.lambda
        )));
    }
    if patch.size / 2 != set.feature_dim() {
        return Err(Error::ModelMismatch(format!(
            "patch size {} implies feature dimension {}, set has {}",
            patch.size,
            patch.size / 2,
            set.feature_dim()
        )));
    }
    let n = set.len();
    let d = set.feature_dim();

    let mut mean = vec![0.0; d];
    for i in 0..n {
        for (m, v) in mean.iter_mut().zip(set.row(i)) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut std = vec![0.0; d];
    for i in 0..n {
        for (s, (v, m)) in std.iter_mut().zip(set.row(i).iter().zip(&mean)) {
            let dlt = v - m;
            *s += dlt * dlt;
        }
    }
    for s in &mut std {
        *s = (*s / n as f64).sqrt();
        if *s < 1e-12 {
            *s = 1.0;
        }
    }

    let bias = set.labels().iter().sum::<f64>() / n as f64;
    let (lo, hi) = set
        .labels()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let degenerate = hi - lo < 1e-12;

    let z = DMatrix::from_fn(n, d, |i, j| (set.row(i)[j] - mean[j]) / std[j]);
    let y = DVector::from_fn(n, |i, _| set.labels()[i] - bias);

    let w = if degenerate {
        DVector::zeros(d)
    } else if n > d {
        let mut a = z.transpose() * &z;
        for i in 0..d {
            a[(i, i)] += opts.lambda;
        }
        solve_spd_or_svd(a, z.transpose() * &y)
    } else {
        let mut g = &z * z.transpose();
        for i in 0..n {
            g[(i, i)] += opts.lambda;
        }
        z.transpose() * solve_spd_or_svd(g, y)
    };

    Ok(CutoffPredictor {
        version: PREDICTOR_FORMAT_VERSION,
        feature_dim: d,
        weights: w.iter().copied().collect(),
        bias,
        feature_mean: mean,
        feature_std: std,
        meta: PredictorMeta {
            patch_size: patch.size,
            patch_stride: patch.stride,
            angular_samples: FEATURE_ANGULAR_SAMPLES,
            eps: FEATURE_EPS,
            lambda: opts.lambda,
            degenerate,
        },
    })
}

impl CutoffPredictor {
    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn meta(&self) -> &PredictorMeta {
        &self.meta
    }

    pub fn patch_options(&self) -> PatchOptions {
        PatchOptions {
            size: self.meta.patch_size,
            stride: self.meta.patch_stride,
        }
    }

    /// Predicted cutoff for one feature row, clamped to the valid band.
    pub fn predict_features(&self, features: &[f64]) -> Result<f64> {
        if features.len() != self.feature_dim {
            return Err(Error::ModelMismatch(format!(
                "feature row of {} against a model of dimension {}",
                features.len(),
                self.feature_dim
            )));
        }
        let mut acc = self.bias;
        for (i, &f) in features.iter().enumerate() {
            acc += self.weights[i] * (f - self.feature_mean[i]) / self.feature_std[i];
        }
        Ok(acc.clamp(CUTOFF_MIN, CUTOFF_MAX))
    }

    /// Predicted cutoff for one patch of the model's patch size.
    pub fn predict_patch(&self, patch: &Image) -> Result<f64> {
        if patch.width() != self.meta.patch_size || patch.height() != self.meta.patch_size {
            return Err(Error::ModelMismatch(format!(
                "patch {}x{} against a model trained on {0}x{0} patches",
                patch.width(),
                self.meta.patch_size
            )));
        }
        self.predict_features(&patch_features(patch)?)
    }

    /// Mean patch prediction over the model's own tiling, in anchor order.
    pub fn predict_image(&self, img: &Image) -> Result<f64> {
        let patches = extract_patches(img, &self.patch_options())?;
        let mut acc = 0.0;
        for patch in &patches {
            acc += self.predict_patch(patch)?;
        }
        Ok(acc / patches.len() as f64)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = File::create(path)?;
        serde_json::to_writer_pretty(BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = File::open(path)?;
        let model: Self = serde_json::from_reader(BufReader::new(file))?;
        if model.version != PREDICTOR_FORMAT_VERSION {
            return Err(Error::ModelMismatch(format!(
                "model format version {} not supported (expected {})",
                model.version, PREDICTOR_FORMAT_VERSION
            )));
        }
        if model.weights.len() != model.feature_dim
            || model.feature_mean.len() != model.feature_dim
            || model.feature_std.len() != model.feature_dim
        {
            return Err(Error::ModelMismatch(
                "model vectors do not match the declared dimension".into(),
            ));
        }
        Ok(model)
    }
}

/// Rescales a cutoff estimated on `source`'s sensor grid to `target`'s:
/// multiply by the pitch ratio, cap at Nyquist.
pub fn correct_cutoff(cutoff: f64, source: &CameraSpec, target: &CameraSpec) -> Result<f64> {
    if !(cutoff.is_finite() && cutoff > 0.0) {
        return Err(Error::InvalidInput(format!(
            "cutoff must be positive, got {cutoff}"
        )));
    }
    Ok((cutoff * pixel_size_ratio(source, target)).min(CUTOFF_MAX))
}
