//! Synthetic camera rig for closed-loop validation.
//!
//! A scene is rendered onto a finely sampled object-plane field, blurred by
//! an optics model, and sampled at the interval a camera's geometry
//! dictates:
//!
//! ```text
//! scene pattern --> object field (pitch << sampling interval)
//!               --> optics blur at the object plane
//!               --> sample every dx = pitch_sensor * s / f, center-aligned
//!               --> read noise --> sensor image
//! ```
//!
//! Everything upstream of the sensor is expressed in physical units
//! (millimeters, cycles/mm), so two cameras or two distances can look at
//! the same field and their outputs differ exactly the way the geometry
//! says they should. That gives every generated pair a ground-truth cutoff
//! to hold estimates against.

use serde::{Deserialize, Serialize};

use crate::camera::{pixel_size_ratio, sampling_model, CameraSpec, SceneGeometry};
use crate::degradation::add_read_noise;
use crate::error::{Error, Result};
use crate::imageio::{Image, Provenance};
use crate::parallel;
use crate::resample::{bilinear_clamped, resize_catmull_rom};
use crate::spectral::{estimate_pair_cutoff, fft2_grid, ifft2, EstimateOptions, RealGrid};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Test chart rendered onto the object plane. Coordinates are physical,
/// origin at the field center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "pattern", rename_all = "snake_case")]
pub enum ScenePattern {
    /// Binary star of `spokes` angular periods; frequency rises toward the
    /// center.
    SiemensStar { spokes: u32 },
    /// `0.5 + 0.5 cos(pi * chirp * r^2)`: local radial frequency is
    /// `chirp * r` cycles/mm, sweeping linearly with radius.
    ZonePlate { chirp_cyc_per_mm2: f64 },
    /// Square tiles of side `cell_mm`.
    Checkerboard { cell_mm: f64 },
    /// Uniform per-sample noise, reproducible from the seed.
    WhiteNoise { seed: u64 },
    /// Noise with a flat spectrum up to a physical knee and a steep
    /// rolloff past it. Spreads energy at every frequency across the
    /// whole field, so radially averaged statistics stay stable even
    /// when a capture resolves only a few dozen samples.
    FilteredNoise { seed: u64, cutoff_cyc_per_mm: f64 },
}

/// Square, finely pitched raster standing in for the physical scene.
#[derive(Debug, Clone)]
pub struct ObjectField {
    size_px: usize,
    extent_mm: f64,
    values: Vec<f64>,
}

impl ObjectField {
    pub fn size_px(&self) -> usize {
        self.size_px
    }

    pub fn extent_mm(&self) -> f64 {
        self.extent_mm
    }

    /// Sample spacing, mm per field pixel.
    pub fn pitch_mm(&self) -> f64 {
        self.extent_mm / self.size_px as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Physical coordinate of sample index `i` along either axis.
    fn coord_mm(&self, i: usize) -> f64 {
        (i as f64 - (self.size_px as f64 - 1.0) / 2.0) * self.pitch_mm()
    }

    /// Field index of physical coordinate `x_mm` (fractional).
    fn index_of(&self, x_mm: f64) -> f64 {
        x_mm / self.pitch_mm() + (self.size_px as f64 - 1.0) / 2.0
    }
}

/// Renders `pattern` onto a `size_px` field spanning `extent_mm`.
pub fn render_scene(pattern: &ScenePattern, size_px: usize, extent_mm: f64) -> Result<ObjectField> {
    if size_px < 16 {
        return Err(Error::InvalidInput(format!(
            "object field needs at least 16 samples per side, got {size_px}"
        )));
    }
    if !(extent_mm.is_finite() && extent_mm > 0.0) {
        return Err(Error::InvalidInput(format!(
            "field extent must be positive, got {extent_mm}"
        )));
    }
    match pattern {
        ScenePattern::ZonePlate { chirp_cyc_per_mm2 }
            if !(chirp_cyc_per_mm2.is_finite() && *chirp_cyc_per_mm2 > 0.0) =>
        {
            return Err(Error::InvalidInput("zone plate chirp must be positive".into()))
        }
        ScenePattern::Checkerboard { cell_mm } if !(cell_mm.is_finite() && *cell_mm > 0.0) => {
            return Err(Error::InvalidInput("checkerboard cell must be positive".into()))
        }
        ScenePattern::FilteredNoise {
            cutoff_cyc_per_mm, ..
        } if !(cutoff_cyc_per_mm.is_finite() && *cutoff_cyc_per_mm > 0.0) => {
            return Err(Error::InvalidInput(
                "noise band limit must be positive".into(),
            ))
        }
        ScenePattern::SiemensStar { spokes: 0 } => {
            return Err(Error::InvalidInput("star needs at least one spoke".into()))
        }
        _ => {}
    }
    let mut field = ObjectField {
        size_px,
        extent_mm,
        values: vec![0.0; size_px * size_px],
    };
    match *pattern {
        ScenePattern::WhiteNoise { seed } => {
            // Sequential fill so the field is a pure function of the seed.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for v in &mut field.values {
                *v = rng.random::<f64>();
            }
        }
        ScenePattern::FilteredNoise {
            seed,
            cutoff_cyc_per_mm,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for v in &mut field.values {
                *v = rng.random::<f64>();
            }
            band_limit_field(&mut field, cutoff_cyc_per_mm)?;
        }
        pattern => {
            let coords: Vec<f64> = (0..size_px).map(|i| field.coord_mm(i)).collect();
            parallel::for_each_chunk_mut(&mut field.values, size_px, |row, chunk| {
                let y = coords[row];
                for (col, v) in chunk.iter_mut().enumerate() {
                    let x = coords[col];
                    *v = match pattern {
                        ScenePattern::SiemensStar { spokes } => {
                            if (spokes as f64 * y.atan2(x)).sin() >= 0.0 {
                                1.0
                            } else {
                                0.0
                            }
                        }
                        ScenePattern::ZonePlate { chirp_cyc_per_mm2 } => {
                            let r2 = x * x + y * y;
                            0.5 + 0.5 * (PI * chirp_cyc_per_mm2 * r2).cos()
                        }
                        ScenePattern::Checkerboard { cell_mm } => {
                            let ix = (x / cell_mm).floor() as i64;
                            let iy = (y / cell_mm).floor() as i64;
                            ((ix + iy).rem_euclid(2)) as f64
                        }
                        ScenePattern::WhiteNoise { .. } | ScenePattern::FilteredNoise { .. } => {
                            unreachable!()
                        }
                    };
                }
            });
        }
    }
    Ok(field)
}

/// Applies an order-4 knee at `cutoff_cyc_per_mm` to the field spectrum,
/// then rescales the result back to full [0, 1] contrast.
fn band_limit_field(field: &mut ObjectField, cutoff_cyc_per_mm: f64) -> Result<()> {
    let n = field.size_px;
    let pitch = field.pitch_mm();
    let mut spec = fft2_grid(&RealGrid::new(n, n, field.values.clone())?)?;
    let freqs: Vec<f64> = (0..n).map(|i| spec.freq_x(i) / pitch).collect();
    for iy in 0..n {
        let fy = freqs[iy];
        for (ix, bin) in spec.bins_mut()[iy * n..(iy + 1) * n].iter_mut().enumerate() {
            let rho = freqs[ix].hypot(fy);
            *bin *= 1.0 / (1.0 + (rho / cutoff_cyc_per_mm).powi(8)).sqrt();
        }
    }
    let filtered = ifft2(&spec)?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in filtered.values() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let span = if hi > lo { hi - lo } else { 1.0 };
    for (v, &f) in field.values.iter_mut().zip(filtered.values()) {
        *v = (f - lo) / span;
    }
    Ok(())
}

/// Optics blur shape, parameterized at a reference distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PsfKind {
    /// No optical blur; the sensor raster is the only band limit.
    Delta,
    /// Gaussian spot whose object-plane radius grows linearly with
    /// distance, the far-field defocus law.
    Gaussian { sigma_mm_at_reference: f64 },
    /// Butterworth-shaped transfer whose object-plane cutoff shrinks as
    /// `1 / distance`; equivalent in frequency to the Gaussian's scaling
    /// but with an explicit knee.
    Butterworth {
        cutoff_cyc_per_mm_at_reference: f64,
        order: u32,
    },
}

/// An axial optics model: a blur shape pinned at one distance plus the
/// scaling law that carries it to any other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsfModel {
    pub kind: PsfKind,
    pub reference_distance_mm: f64,
}

impl PsfModel {
    pub fn delta() -> Self {
        Self {
            kind: PsfKind::Delta,
            reference_distance_mm: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.reference_distance_mm.is_finite() && self.reference_distance_mm > 0.0) {
            return Err(Error::InvalidInput(
                "psf reference distance must be positive".into(),
            ));
        }
        match self.kind {
            PsfKind::Delta => {}
            PsfKind::Gaussian {
                sigma_mm_at_reference,
            } => {
                if !(sigma_mm_at_reference.is_finite() && sigma_mm_at_reference >= 0.0) {
                    return Err(Error::InvalidInput(
                        "gaussian spot radius must be non-negative".into(),
                    ));
                }
            }
            PsfKind::Butterworth {
                cutoff_cyc_per_mm_at_reference,
                order,
            } => {
                if !(cutoff_cyc_per_mm_at_reference.is_finite()
                    && cutoff_cyc_per_mm_at_reference > 0.0)
                {
                    return Err(Error::InvalidInput("optics cutoff must be positive".into()));
                }
                if order == 0 {
                    return Err(Error::InvalidInput("optics order must be at least 1".into()));
                }
            }
        }
        Ok(())
    }

    /// Gaussian spot radius at distance `s`; `None` for non-Gaussian kinds.
    pub fn sigma_mm_at(&self, distance_mm: f64) -> Option<f64> {
        match self.kind {
            PsfKind::Gaussian {
                sigma_mm_at_reference,
            } => Some(sigma_mm_at_reference * distance_mm / self.reference_distance_mm),
            _ => None,
        }
    }

    /// Object-plane -3 dB frequency at distance `s`. Infinite for a delta.
    pub fn cutoff_cyc_per_mm_at(&self, distance_mm: f64) -> f64 {
        match self.kind {
            PsfKind::Delta => f64::INFINITY,
            PsfKind::Gaussian {
                sigma_mm_at_reference,
            } => {
                let sigma = sigma_mm_at_reference * distance_mm / self.reference_distance_mm;
                if sigma == 0.0 {
                    f64::INFINITY
                } else {
                    // exp(-2 pi^2 s^2 r^2) = 2^(-1/2) at this radius.
                    (2f64.ln()).sqrt() / (2.0 * PI * sigma)
                }
            }
            PsfKind::Butterworth {
                cutoff_cyc_per_mm_at_reference,
                ..
            } => cutoff_cyc_per_mm_at_reference * self.reference_distance_mm / distance_mm,
        }
    }

    /// Transfer gain at object frequency `rho` (cycles/mm), distance `s`.
    fn transfer(&self, rho_cyc_per_mm: f64, distance_mm: f64) -> f64 {
        match self.kind {
            PsfKind::Delta => 1.0,
            PsfKind::Gaussian {
                sigma_mm_at_reference,
            } => {
                let sigma = sigma_mm_at_reference * distance_mm / self.reference_distance_mm;
                (-2.0 * PI * PI * sigma * sigma * rho_cyc_per_mm * rho_cyc_per_mm).exp()
            }
            PsfKind::Butterworth {
                cutoff_cyc_per_mm_at_reference,
                order,
            } => {
                let fc = cutoff_cyc_per_mm_at_reference * self.reference_distance_mm / distance_mm;
                if rho_cyc_per_mm == 0.0 {
                    1.0
                } else {
                    1.0 / (1.0 + (rho_cyc_per_mm / fc).powi(2 * order as i32)).sqrt()
                }
            }
        }
    }

    fn is_delta_at(&self, distance_mm: f64) -> bool {
        match self.kind {
            PsfKind::Delta => true,
            PsfKind::Gaussian {
                sigma_mm_at_reference,
            } => self.sigma_mm_at(distance_mm).unwrap_or(sigma_mm_at_reference) == 0.0,
            PsfKind::Butterworth { .. } => false,
        }
    }
}

/// One camera's complete capture setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideSpec {
    pub camera: CameraSpec,
    pub geometry: SceneGeometry,
    pub psf: PsfModel,
    /// Read noise standard deviation in [0, 1] units.
    pub noise_sigma: f64,
}

impl SideSpec {
    pub fn validate(&self) -> Result<()> {
        self.camera.validate()?;
        self.geometry.validate()?;
        self.psf.validate()?;
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "noise sigma must be non-negative, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }

    /// Object-plane sampling interval of this setup, mm per sensor pixel.
    pub fn sampling_interval_mm(&self) -> Result<f64> {
        Ok(sampling_model(&self.camera, &self.geometry)?.object_sampling_interval_mm)
    }
}

/// Blurs the field with `psf` at distance `s` via its frequency response.
/// Circular wrap at the field edges is the caller's concern: keep a margin
/// between the sampled region and the border.
fn blur_field(field: &ObjectField, psf: &PsfModel, distance_mm: f64) -> Result<Vec<f64>> {
    let n = field.size_px;
    let mut spec = fft2_grid(&RealGrid::new(n, n, field.values.clone())?)?;
    let pitch = field.pitch_mm();
    let bins = spec.bins_mut();
    for iy in 0..n {
        let v = (iy as f64 - (n / 2) as f64) / (n as f64 * pitch);
        for ix in 0..n {
            let u = (ix as f64 - (n / 2) as f64) / (n as f64 * pitch);
            bins[iy * n + ix] *= psf.transfer((u * u + v * v).sqrt(), distance_mm);
        }
    }
    Ok(ifft2(&spec)?.values().to_vec())
}

/// Captures a centered `out_w x out_h` sensor region looking at `field`.
///
/// The noise stream index keeps multiple captures under one seed
/// statistically independent; pass distinct indices per image.
pub fn capture(
    field: &ObjectField,
    side: &SideSpec,
    out_w: usize,
    out_h: usize,
    seed: u64,
    stream: u64,
) -> Result<Image> {
    side.validate()?;
    if out_w < 8 || out_h < 8 {
        return Err(Error::InvalidInput(format!(
            "capture size {out_w}x{out_h} too small"
        )));
    }
    if out_w > side.camera.sensor_width_px as usize || out_h > side.camera.sensor_height_px as usize
    {
        return Err(Error::Geometry(format!(
            "capture {out_w}x{out_h} exceeds the {}x{} sensor",
            side.camera.sensor_width_px, side.camera.sensor_height_px
        )));
    }
    let dx = side.sampling_interval_mm()?;
    let s = side.geometry.object_distance_mm;
    // The outermost sample plus a bilinear guard must stay inside the field.
    let reach = (out_w.max(out_h) as f64 - 1.0) / 2.0 * dx + 2.0 * field.pitch_mm();
    if 2.0 * reach > field.extent_mm {
        return Err(Error::Geometry(format!(
            "field of {:.2} mm cannot cover a {:.2} mm capture span; enlarge the scene",
            field.extent_mm,
            2.0 * reach
        )));
    }

    let blurred;
    let source: &[f64] = if side.psf.is_delta_at(s) {
        &field.values
    } else {
        blurred = blur_field(field, &side.psf, s)?;
        &blurred
    };

    let n = field.size_px;
    let data = parallel::map_indexed(out_h, |v| {
        let y = field.index_of((v as f64 - (out_h as f64 - 1.0) / 2.0) * dx);
        let mut row = Vec::with_capacity(out_w);
        for u in 0..out_w {
            let x = field.index_of((u as f64 - (out_w as f64 - 1.0) / 2.0) * dx);
            row.push(bilinear_clamped(source, n, n, x, y));
        }
        row
    })
    .into_iter()
    .flatten()
    .collect();
    // Optical ringing can poke slightly out of range before quantization.
    let clean = Image::from_clamped(out_w, out_h, 1, data)?;
    let mut out = add_read_noise(&clean, side.noise_sigma, seed, stream)?;
    out.set_provenance(Provenance {
        camera: Some(side.camera.clone()),
        geometry: Some(side.geometry.clone()),
        ..Provenance::default()
    });
    Ok(out)
}

/// Everything knowable about a generated pair without estimating anything.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairTruth {
    /// Degraded-side optics cutoff at its distance, cycles/mm (infinite
    /// for a delta, serialized as null).
    pub optics_cutoff_obj_cyc_per_mm: f64,
    /// Degraded-side sensor band limit at the object plane, cycles/mm.
    pub sensor_nyquist_obj_cyc_per_mm: f64,
    /// The binding limit of the two, cycles/mm.
    pub composite_cutoff_obj_cyc_per_mm: f64,
    /// Composite limit expressed on the sharp side's sample grid, capped
    /// at Nyquist. This is the number an estimator should recover.
    pub cutoff_cyc_per_hr_sample: f64,
}

/// A generated sharp/degraded pair with its ground truth.
#[derive(Debug, Clone)]
pub struct CapturePair {
    pub hr: Image,
    /// Degraded capture on its native grid, spanning the sharp side's view.
    pub lr_native: Image,
    /// Degraded capture resampled onto the sharp side's grid.
    pub lr_matched: Image,
    pub truth: PairTruth,
}

/// Two-camera pair setup; the sharp side defines the field of view.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairConfig {
    pub hr: SideSpec,
    pub lr: SideSpec,
    /// Square sharp-side capture size, pixels.
    pub hr_size_px: usize,
    pub seed: u64,
}

/// Captures both sides of a pair from one field.
///
/// The degraded side is captured over the same physical view as the sharp
/// side (its pixel count follows from the sampling-interval ratio) and
/// resampled to the sharp grid for estimation. The reported truth describes
/// the degraded side's band limit on the sharp grid; it reads as the full
/// transfer only when the sharp side itself is effectively unblurred.
pub fn make_pair(field: &ObjectField, config: &PairConfig) -> Result<CapturePair> {
    let dx_hr = config.hr.sampling_interval_mm()?;
    let dx_lr = config.lr.sampling_interval_mm()?;
    let fov = config.hr_size_px as f64 * dx_hr;
    let n_lr = (fov / dx_lr).round() as usize;
    if n_lr < 8 {
        return Err(Error::Geometry(format!(
            "degraded side resolves only {n_lr} samples across the view; too few"
        )));
    }
    let hr = capture(field, &config.hr, config.hr_size_px, config.hr_size_px, config.seed, 0)?;
    let lr_native = capture(field, &config.lr, n_lr, n_lr, config.seed, 1)?;
    let lr_matched = resize_catmull_rom(&lr_native, config.hr_size_px, config.hr_size_px)?;

    let optics = config
        .lr
        .psf
        .cutoff_cyc_per_mm_at(config.lr.geometry.object_distance_mm);
    let nyquist = 0.5 / dx_lr;
    let composite = optics.min(nyquist);
    Ok(CapturePair {
        hr,
        lr_native,
        lr_matched,
        truth: PairTruth {
            optics_cutoff_obj_cyc_per_mm: optics,
            sensor_nyquist_obj_cyc_per_mm: nyquist,
            composite_cutoff_obj_cyc_per_mm: composite,
            cutoff_cyc_per_hr_sample: (composite * dx_hr).min(0.5),
        },
    })
}

/// Cross-sensor transfer experiment setup.
///
/// One sharp reference camera and two degraded cameras that differ only in
/// pixel pitch observe the same scene at the same distance. Each degraded
/// camera carries an anti-alias blur at a fixed fraction of its own sensor
/// band, so its composite cutoff tracks its pitch; the experiment checks
/// that rescaling one camera's estimated cutoff by the pitch ratio predicts
/// the other's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaBetaConfig {
    pub hr_camera: CameraSpec,
    pub lr_camera_a: CameraSpec,
    pub lr_camera_b: CameraSpec,
    pub distance_mm: f64,
    pub hr_size_px: usize,
    /// Anti-alias knee as a fraction of each degraded sensor's Nyquist.
    pub aa_fraction: f64,
    pub aa_order: u32,
    pub noise_sigma: f64,
    /// Field samples per sharp-side sampling interval.
    pub supersample: usize,
    /// Extra sharp-side pixels of field beyond the view, each side.
    pub margin_px: usize,
    pub pattern: ScenePattern,
    pub seed: u64,
}

impl AlphaBetaConfig {
    /// Sensible rig: a fine reference sensor against two consumer pitches.
    pub fn reference_rig() -> Self {
        Self {
            hr_camera: CameraSpec::new("reference-fine", 50.0, 3.0, 4096, 4096).unwrap(),
            lr_camera_a: CameraSpec::new("coarse-a", 50.0, 6.25, 4096, 4096).unwrap(),
            lr_camera_b: CameraSpec::new("coarse-b", 50.0, 4.88, 4096, 4096).unwrap(),
            distance_mm: 2000.0,
            hr_size_px: 512,
            aa_fraction: 0.8,
            aa_order: 4,
            noise_sigma: 0.5 / 255.0,
            supersample: 4,
            margin_px: 32,
            // Local frequency chirp*r reaches 4.3 cyc/mm at the view edge,
            // past the reference band (4.17), with full radial coverage in
            // between and no strain on the supersampled field grid.
            pattern: ScenePattern::ZonePlate {
                chirp_cyc_per_mm2: 0.125,
            },
            seed: 11,
        }
    }
}

/// Outcome of the cross-sensor transfer experiment. Cutoffs are in
/// sharp-grid cycles/sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaBetaReport {
    /// Pitch ratio carrying camera-a cutoffs onto camera b's grid.
    pub alpha: f64,
    pub estimated_cutoff_a: f64,
    pub estimated_cutoff_b: f64,
    /// `alpha * estimated_cutoff_a`, the cross-sensor prediction.
    pub predicted_cutoff_b: f64,
    pub truth_cutoff_a: f64,
    pub truth_cutoff_b: f64,
    pub confidence_a: f64,
    pub confidence_b: f64,
    /// `|predicted - estimated| / estimated` on camera b.
    pub relative_error: f64,
}

fn aa_side(
    camera: &CameraSpec,
    geometry: &SceneGeometry,
    fraction: f64,
    order: u32,
    noise_sigma: f64,
) -> Result<SideSpec> {
    let nyq = sampling_model(camera, geometry)?.object_nyquist_cyc_per_mm;
    Ok(SideSpec {
        camera: camera.clone(),
        geometry: geometry.clone(),
        psf: PsfModel {
            kind: PsfKind::Butterworth {
                cutoff_cyc_per_mm_at_reference: fraction * nyq,
                order,
            },
            reference_distance_mm: geometry.object_distance_mm,
        },
        noise_sigma,
    })
}

/// Runs the cross-sensor transfer experiment end to end.
pub fn alpha_beta_experiment(config: &AlphaBetaConfig) -> Result<AlphaBetaReport> {
    if (config.lr_camera_a.focal_length_mm - config.lr_camera_b.focal_length_mm).abs()
        > 1e-9 * config.lr_camera_a.focal_length_mm
    {
        return Err(Error::ExperimentInvalid(
            "degraded cameras must share a focal length for a pure pitch comparison".into(),
        ));
    }
    if !(config.aa_fraction > 0.0 && config.aa_fraction <= 1.0) {
        return Err(Error::ExperimentInvalid(format!(
            "aa_fraction must be in (0, 1], got {}",
            config.aa_fraction
        )));
    }
    if config.supersample < 2 {
        return Err(Error::ExperimentInvalid(
            "field must be supersampled at least 2x".into(),
        ));
    }
    let geometry = SceneGeometry::new(config.distance_mm)?;
    let hr_side = SideSpec {
        camera: config.hr_camera.clone(),
        geometry: geometry.clone(),
        psf: PsfModel::delta(),
        noise_sigma: config.noise_sigma,
    };
    let side_a = aa_side(
        &config.lr_camera_a,
        &geometry,
        config.aa_fraction,
        config.aa_order,
        config.noise_sigma,
    )?;
    let side_b = aa_side(
        &config.lr_camera_b,
        &geometry,
        config.aa_fraction,
        config.aa_order,
        config.noise_sigma,
    )?;

    let dx_hr = hr_side.sampling_interval_mm()?;
    let span_px = config.hr_size_px + 2 * config.margin_px;
    let field = render_scene(
        &config.pattern,
        span_px * config.supersample,
        span_px as f64 * dx_hr,
    )?;

    let pair_a = make_pair(
        &field,
        &PairConfig {
            hr: hr_side.clone(),
            lr: side_a,
            hr_size_px: config.hr_size_px,
            seed: config.seed,
        },
    )?;
    let pair_b = make_pair(
        &field,
        &PairConfig {
            hr: hr_side,
            lr: side_b,
            hr_size_px: config.hr_size_px,
            seed: config.seed.wrapping_add(1),
        },
    )?;

    let opts = EstimateOptions::default();
    let est_a = estimate_pair_cutoff(&pair_a.hr, &pair_a.lr_matched, &opts)?;
    let est_b = estimate_pair_cutoff(&pair_b.hr, &pair_b.lr_matched, &opts)?;

    let alpha = pixel_size_ratio(&config.lr_camera_a, &config.lr_camera_b);
    let predicted = (est_a.cutoff_cyc_per_sample * alpha).min(0.5);
    let relative_error = (predicted - est_b.cutoff_cyc_per_sample).abs()
        / est_b.cutoff_cyc_per_sample.max(f64::MIN_POSITIVE);
    Ok(AlphaBetaReport {
        alpha,
        estimated_cutoff_a: est_a.cutoff_cyc_per_sample,
        estimated_cutoff_b: est_b.cutoff_cyc_per_sample,
        predicted_cutoff_b: predicted,
        truth_cutoff_a: pair_a.truth.cutoff_cyc_per_hr_sample,
        truth_cutoff_b: pair_b.truth.cutoff_cyc_per_hr_sample,
        confidence_a: est_a.confidence,
        confidence_b: est_b.confidence,
        relative_error,
    })
}

/// Distance sweep setup: the sharp camera stays at the reference distance
/// while the degraded camera walks away from the scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub hr_camera: CameraSpec,
    pub lr_camera: CameraSpec,
    /// Sharp-side (and optics reference) distance.
    pub reference_distance_mm: f64,
    /// Degraded-side distances to visit.
    pub distances_mm: Vec<f64>,
    /// Degraded-side optics, referenced at the sweep's reference distance.
    pub psf: PsfModel,
    pub hr_size_px: usize,
    pub supersample: usize,
    pub margin_px: usize,
    pub noise_sigma: f64,
    pub pattern: ScenePattern,
    pub seed: u64,
}

impl SweepConfig {
    /// A rig whose optics dominate the sensor at every swept distance.
    pub fn reference_rig() -> Self {
        let reference_distance_mm = 2000.0;
        Self {
            hr_camera: CameraSpec::new("reference-fine", 50.0, 3.0, 4096, 4096).unwrap(),
            lr_camera: CameraSpec::new("coarse", 50.0, 6.25, 4096, 4096).unwrap(),
            reference_distance_mm,
            distances_mm: vec![2000.0, 4000.0, 8000.0],
            psf: PsfModel {
                kind: PsfKind::Butterworth {
                    cutoff_cyc_per_mm_at_reference: 1.4,
                    order: 3,
                },
                reference_distance_mm,
            },
            hr_size_px: 512,
            supersample: 4,
            margin_px: 32,
            noise_sigma: 0.5 / 255.0,
            // Band-limited noise keeps the unblurred sharp captures free of
            // fold-over from the supersampled field grid (knee at 3.0 vs the
            // 4.17 cyc/mm sharp band) while loading every radial bin from
            // the whole field, so even a 61-sample capture at the farthest
            // distance averages cleanly.
            pattern: ScenePattern::FilteredNoise {
                seed: 3,
                cutoff_cyc_per_mm: 3.0,
            },
            seed: 5,
        }
    }
}

/// One distance's outcome. Cutoffs are in sharp-grid cycles/sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub distance_mm: f64,
    pub truth_cutoff: f64,
    pub estimated_cutoff: f64,
    pub confidence: f64,
}

/// One sweep distance with its captured pair, for callers that keep the
/// images.
#[derive(Debug, Clone)]
pub struct SweepCapture {
    pub point: SweepPoint,
    pub pair: CapturePair,
}

/// Runs the distance sweep: one shared scene, one sharp capture geometry,
/// one pair per degraded distance. Both the optics cutoff and the sensor
/// band scale as `1 / distance` at the object plane while the sharp grid
/// stays fixed, so truth cutoffs halve exactly when distance doubles.
pub fn distance_sweep_captures(config: &SweepConfig) -> Result<Vec<SweepCapture>> {
    if config.distances_mm.is_empty() {
        return Err(Error::ExperimentInvalid("sweep needs at least one distance".into()));
    }
    if config.supersample < 2 {
        return Err(Error::ExperimentInvalid(
            "field must be supersampled at least 2x".into(),
        ));
    }
    let hr_side = SideSpec {
        camera: config.hr_camera.clone(),
        geometry: SceneGeometry::new(config.reference_distance_mm)?,
        psf: PsfModel::delta(),
        noise_sigma: config.noise_sigma,
    };
    let dx_hr = hr_side.sampling_interval_mm()?;
    let span_px = config.hr_size_px + 2 * config.margin_px;
    let field = render_scene(
        &config.pattern,
        span_px * config.supersample,
        span_px as f64 * dx_hr,
    )?;

    let opts = EstimateOptions::default();
    let mut captures = Vec::with_capacity(config.distances_mm.len());
    for (i, &s) in config.distances_mm.iter().enumerate() {
        let lr_side = SideSpec {
            camera: config.lr_camera.clone(),
            geometry: SceneGeometry::new(s)?,
            psf: config.psf,
            noise_sigma: config.noise_sigma,
        };
        let pair = make_pair(
            &field,
            &PairConfig {
                hr: hr_side.clone(),
                lr: lr_side,
                hr_size_px: config.hr_size_px,
                seed: config.seed.wrapping_add(i as u64),
            },
        )?;
        let est = estimate_pair_cutoff(&pair.hr, &pair.lr_matched, &opts)?;
        captures.push(SweepCapture {
            point: SweepPoint {
                distance_mm: s,
                truth_cutoff: pair.truth.cutoff_cyc_per_hr_sample,
                estimated_cutoff: est.cutoff_cyc_per_sample,
                confidence: est.confidence,
            },
            pair,
        });
    }
    Ok(captures)
}

/// [`distance_sweep_captures`] keeping only the numbers.
pub fn distance_sweep(config: &SweepConfig) -> Result<Vec<SweepPoint>> {
    Ok(distance_sweep_captures(config)?
        .into_iter()
        .map(|c| c.point)
        .collect())
}
