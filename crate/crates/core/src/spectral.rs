//! Frequency-domain analysis of images and image pairs.
//!
//! The pipeline that turns a sharp/degraded pair into a cutoff frequency:
//!
//! ```text
//! HR, LR --> luminance --> Hann window --> fft2 (unitary, DC-centered)
//!        --> log|F(LR)| - log|F(HR)|          (shared eps floor)
//!        --> polar resample, exponentiate, average over angle
//!        --> radial profile --> smooth --> -3 dB crossing = cutoff
//! ```
//!
//! Magnitudes divide out scene content, the log difference is numerically
//! tame where both spectra are small, and exponentiating before the angular
//! mean averages the transfer ratio itself rather than its logarithm.
//!
//! Digital frequency runs in cycles/sample: bin `r` of a profile sits at
//! `r * bin_width`, with Nyquist at 0.5.

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::imageio::Image;
use crate::parallel;
use crate::resample::bilinear_clamped;

/// Shared floor for log magnitudes; keeps empty bins finite without
/// drowning real signal.
pub const DEFAULT_EPS: f64 = 1e-8;

/// Minimum image side accepted by the transforms.
pub const MIN_FFT_DIM: usize = 8;

/// A real-valued grid: pixels, log magnitudes, transfer ratios. Unlike
/// [`Image`] it carries no range constraint, so inverse transforms keep
/// their negative lobes.
#[derive(Debug, Clone, PartialEq)]
pub struct RealGrid {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl RealGrid {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "buffer length {} does not match {width}x{height}",
                values.len()
            )));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Clamps into an image, the hand-off at the end of filtering ops.
    pub fn to_image_clamped(&self) -> Result<Image> {
        Image::from_clamped(self.width, self.height, 1, self.values.clone())
    }
}

/// A DC-centered 2-D spectrum under the unitary transform convention.
///
/// Bin `(ix, iy)` holds horizontal frequency `(ix - width/2) / width` and
/// vertical frequency `(iy - height/2) / height`, both in cycles/sample;
/// the DC bin sits at `(width/2, height/2)`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    width: usize,
    height: usize,
    bins: Vec<Complex<f64>>,
}

impl Spectrum {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bins(&self) -> &[Complex<f64>] {
        &self.bins
    }

    pub fn bins_mut(&mut self) -> &mut [Complex<f64>] {
        &mut self.bins
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize) -> Complex<f64> {
        self.bins[iy * self.width + ix]
    }

    /// Horizontal frequency of bin column `ix`, cycles/sample.
    #[inline]
    pub fn freq_x(&self, ix: usize) -> f64 {
        (ix as f64 - (self.width / 2) as f64) / self.width as f64
    }

    /// Vertical frequency of bin row `iy`, cycles/sample.
    #[inline]
    pub fn freq_y(&self, iy: usize) -> f64 {
        (iy as f64 - (self.height / 2) as f64) / self.height as f64
    }

    /// Largest deviation from conjugate symmetry, for diagnostics.
    pub fn conjugate_symmetry_residual(&self) -> f64 {
        let (w, h) = (self.width, self.height);
        let mut worst: f64 = 0.0;
        for iy in 0..h {
            for ix in 0..w {
                // Mirror of centered index i is (n - i) of the unshifted
                // layout, which maps back to this same centered indexing.
                let my = (2 * (h / 2) + h - iy) % h;
                let mx = (2 * (w / 2) + w - ix) % w;
                let diff = (self.get(ix, iy) - self.get(mx, my).conj()).norm();
                worst = worst.max(diff);
            }
        }
        worst
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    })
}

/// Row-parallel FFT pass over a row-major buffer of `rows` rows of `len`.
fn fft_rows(buffer: &mut [Complex<f64>], len: usize, inverse: bool) {
    let fft = plan(len, inverse);
    // A handful of rows per chunk amortizes scratch allocation; chunks stay
    // independent so scheduling cannot reorder arithmetic.
    let rows_per_chunk = 8;
    parallel::for_each_chunk_mut(buffer, len * rows_per_chunk, |_, chunk| {
        let mut scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
        for row in chunk.chunks_exact_mut(len) {
            fft.process_with_scratch(row, &mut scratch);
        }
    });
}

fn transpose(src: &[Complex<f64>], width: usize, height: usize) -> Vec<Complex<f64>> {
    let mut out = vec![Complex::default(); src.len()];
    for y in 0..height {
        for x in 0..width {
            out[x * height + y] = src[y * width + x];
        }
    }
    out
}

/// Cyclic shift moving the unshifted bin `(0, 0)` to `(dx, dy)`.
fn roll(src: &[Complex<f64>], width: usize, height: usize, dx: usize, dy: usize) -> Vec<Complex<f64>> {
    let mut out = vec![Complex::default(); src.len()];
    for y in 0..height {
        let ty = (y + dy) % height;
        for x in 0..width {
            let tx = (x + dx) % width;
            out[ty * width + tx] = src[y * width + x];
        }
    }
    out
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width < MIN_FFT_DIM || height < MIN_FFT_DIM {
        return Err(Error::InvalidInput(format!(
            "transform needs at least {MIN_FFT_DIM}x{MIN_FFT_DIM}, got {width}x{height}"
        )));
    }
    Ok(())
}

/// Forward unitary 2-D FFT of a real grid, DC-centered.
pub fn fft2_grid(grid: &RealGrid) -> Result<Spectrum> {
    let (w, h) = (grid.width, grid.height);
    check_dims(w, h)?;
    let mut buf: Vec<Complex<f64>> = grid
        .values
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .collect();
    fft_rows(&mut buf, w, false);
    let mut buf = transpose(&buf, w, h);
    fft_rows(&mut buf, h, false);
    let buf = transpose(&buf, h, w);
    let scale = 1.0 / ((w * h) as f64).sqrt();
    let mut bins = roll(&buf, w, h, w / 2, h / 2);
    for b in &mut bins {
        *b *= scale;
    }
    Ok(Spectrum {
        width: w,
        height: h,
        bins,
    })
}

/// Forward FFT of a single-channel image. Multichannel callers convert to
/// luminance first.
pub fn fft2(img: &Image) -> Result<Spectrum> {
    if img.channels() != 1 {
        return Err(Error::InvalidInput(
            "fft2 expects a single-channel image; take luminance first".into(),
        ));
    }
    fft2_grid(&RealGrid::new(img.width(), img.height(), img.data().to_vec())?)
}

/// Inverse unitary 2-D FFT. The input must be conjugate-symmetric (a
/// spectrum of real data); an imaginary residue above `1e-6` of the result's
/// dynamic range is an error, anything below is discarded.
pub fn ifft2(spec: &Spectrum) -> Result<RealGrid> {
    let (w, h) = (spec.width, spec.height);
    check_dims(w, h)?;
    // Undo the centering: move DC back to index 0.
    let mut buf = roll(&spec.bins, w, h, w - w / 2, h - h / 2);
    fft_rows(&mut buf, w, true);
    let mut buf = transpose(&buf, w, h);
    fft_rows(&mut buf, h, true);
    let buf = transpose(&buf, h, w);
    let scale = 1.0 / ((w * h) as f64).sqrt();
    let mut values = Vec::with_capacity(w * h);
    let mut max_im: f64 = 0.0;
    let mut min_re = f64::INFINITY;
    let mut max_re = f64::NEG_INFINITY;
    for b in &buf {
        let re = b.re * scale;
        let im = (b.im * scale).abs();
        max_im = max_im.max(im);
        min_re = min_re.min(re);
        max_re = max_re.max(re);
        values.push(re);
    }
    let range = (max_re - min_re).max(f64::MIN_POSITIVE);
    let limit = 1e-6 * range;
    if max_im > limit {
        return Err(Error::SymmetryViolation {
            residual: max_im,
            limit,
        });
    }
    RealGrid::new(w, h, values)
}

/// Periodic Hann window of length `n`.
pub fn hann_window(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / n as f64).cos()))
        .collect()
}

/// Luminance of `img` under a separable periodic Hann window.
pub fn windowed_luminance(img: &Image) -> RealGrid {
    let lum = img.luminance();
    let (w, h) = (lum.width(), lum.height());
    let wx = hann_window(w);
    let wy = hann_window(h);
    let mut values = lum.data().to_vec();
    parallel::for_each_chunk_mut(&mut values, w, |y, row| {
        let ry = wy[y];
        for (x, v) in row.iter_mut().enumerate() {
            *v *= ry * wx[x];
        }
    });
    RealGrid {
        width: w,
        height: h,
        values,
    }
}

/// `ln(|F| + eps)` of a spectrum.
pub fn log_magnitude(spec: &Spectrum, eps: f64) -> RealGrid {
    RealGrid {
        width: spec.width,
        height: spec.height,
        values: spec.bins.iter().map(|b| (b.norm() + eps).ln()).collect(),
    }
}

/// Log-magnitude ratio `ln(|F_lr| + eps) - ln(|F_hr| + eps)`, the log of the
/// degradation transfer function under a high-SNR assumption. The shared
/// floor keeps bins where both spectra vanish at exactly zero.
pub fn transfer_log_diff(hr: &Spectrum, lr: &Spectrum, eps: f64) -> Result<RealGrid> {
    if hr.width != lr.width || hr.height != lr.height {
        return Err(Error::DimensionMismatch(format!(
            "spectra {}x{} vs {}x{}",
            hr.width, hr.height, lr.width, lr.height
        )));
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidInput(format!("eps must be positive, got {eps}")));
    }
    let values = hr
        .bins
        .iter()
        .zip(&lr.bins)
        .map(|(a, b)| (b.norm() + eps).ln() - (a.norm() + eps).ln())
        .collect();
    Ok(RealGrid {
        width: hr.width,
        height: hr.height,
        values,
    })
}

/// Angular average of a DC-centered grid onto radial frequency bins.
///
/// Bin `r` covers radius `r * bin_width` with `bin_width = 0.5 /
/// radial_bins`, so the last bin sits just inside Nyquist. Samples are taken
/// on `angular_samples` equally spaced rays by bilinear interpolation; the
/// sampling ellipse follows each axis's own bin spacing, so anisotropic
/// grids are averaged at equal cycles/sample, not equal bin counts.
///
/// With `exponentiate_first` the grid (typically a log ratio) is mapped
/// through `exp` per sample before averaging, yielding the mean of the
/// ratio itself. Per-bin accumulation is sequential in ray order, keeping
/// results independent of parallel scheduling.
pub fn polar_radial_average(
    grid: &RealGrid,
    radial_bins: usize,
    angular_samples: usize,
    exponentiate_first: bool,
) -> Result<RadialProfile> {
    let (w, h) = (grid.width, grid.height);
    let max_bins = w.min(h) / 2;
    if radial_bins == 0 || radial_bins > max_bins {
        return Err(Error::InvalidInput(format!(
            "radial_bins {radial_bins} outside 1..={max_bins} for a {w}x{h} grid"
        )));
    }
    if angular_samples < 4 {
        return Err(Error::InvalidInput(
            "angular_samples must be at least 4".into(),
        ));
    }
    let bin_width = 0.5 / radial_bins as f64;
    let cx = (w / 2) as f64;
    let cy = (h / 2) as f64;
    let values = parallel::map_indexed(radial_bins, |r| {
        let rho = r as f64 * bin_width;
        let mut sum = 0.0;
        for t in 0..angular_samples {
            let theta = 2.0 * PI * t as f64 / angular_samples as f64;
            let x = cx + rho * theta.cos() * w as f64;
            let y = cy + rho * theta.sin() * h as f64;
            let v = bilinear_clamped(&grid.values, w, h, x, y);
            sum += if exponentiate_first { v.exp() } else { v };
        }
        sum / angular_samples as f64
    });
    Ok(RadialProfile { values, bin_width })
}

/// Radially averaged profile over digital frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    values: Vec<f64>,
    bin_width: f64,
}

impl RadialProfile {
    pub fn from_values(values: Vec<f64>, bin_width_cyc_per_sample: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("profile must be non-empty".into()));
        }
        if !(bin_width_cyc_per_sample.is_finite() && bin_width_cyc_per_sample > 0.0) {
            return Err(Error::InvalidInput("bin width must be positive".into()));
        }
        Ok(Self {
            values,
            bin_width: bin_width_cyc_per_sample,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn bin_width_cyc_per_sample(&self) -> f64 {
        self.bin_width
    }

    /// Frequency at the center of bin `r`, cycles/sample.
    pub fn freq_at(&self, r: usize) -> f64 {
        r as f64 * self.bin_width
    }

    /// Writes `radius_bin,freq_cyc_per_sample,value` rows.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "radius_bin,freq_cyc_per_sample,value")?;
        for (r, v) in self.values.iter().enumerate() {
            writeln!(w, "{r},{:.9},{:.9}", self.freq_at(r), v)?;
        }
        Ok(())
    }
}

/// Scalar summary stored alongside an exported profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateSidecar {
    pub cutoff_bin: usize,
    pub cutoff_cyc_per_sample: f64,
    pub plateau: f64,
    pub confidence: f64,
}

/// A detected cutoff with the profile it was read from.
#[derive(Debug, Clone)]
pub struct TransferEstimate {
    pub profile: RadialProfile,
    pub cutoff_bin: usize,
    pub cutoff_cyc_per_sample: f64,
    /// Low-frequency pass-band level the threshold is measured against.
    pub plateau: f64,
    /// Fraction of post-cutoff bins that stay below the threshold; 0 means
    /// no crossing was found.
    pub confidence: f64,
}

impl TransferEstimate {
    pub fn sidecar(&self) -> EstimateSidecar {
        EstimateSidecar {
            cutoff_bin: self.cutoff_bin,
            cutoff_cyc_per_sample: self.cutoff_cyc_per_sample,
            plateau: self.plateau,
            confidence: self.confidence,
        }
    }

    /// The -3 dB threshold the cutoff was detected at.
    pub fn threshold(&self) -> f64 {
        self.plateau / std::f64::consts::SQRT_2
    }
}

/// Number of leading bins (after DC) averaged into the plateau level.
const PLATEAU_BINS: std::ops::RangeInclusive<usize> = 1..=8;
/// Half-width of the centered moving average applied before detection.
const SMOOTH_HALF_WIDTH: usize = 2;
/// Consecutive below-threshold bins required to accept a crossing.
const HYSTERESIS_BINS: usize = 3;

/// Finds the -3 dB point of a radial transfer profile.
///
/// The profile is smoothed with a 5-bin centered moving average (shrinking
/// at the edges), the pass-band plateau is the mean of smoothed bins 1
/// through 8, and the cutoff is the first bin whose smoothed value drops
/// below `plateau / sqrt(2)` and stays below it for three consecutive bins
/// (or through the end of the profile). A profile that never crosses
/// reports the last bin with confidence 0.
pub fn detect_cutoff(profile: &RadialProfile) -> Result<TransferEstimate> {
    let n = profile.values.len();
    if n < 16 {
        return Err(Error::InvalidInput(format!(
            "cutoff detection needs at least 16 radial bins, got {n}"
        )));
    }
    let smoothed: Vec<f64> = (0..n)
        .map(|r| {
            let lo = r.saturating_sub(SMOOTH_HALF_WIDTH);
            let hi = (r + SMOOTH_HALF_WIDTH).min(n - 1);
            let window = &profile.values[lo..=hi];
            window.iter().sum::<f64>() / window.len() as f64
        })
        .collect();
    let plateau =
        smoothed[PLATEAU_BINS].iter().sum::<f64>() / PLATEAU_BINS.count() as f64;
    let threshold = plateau / std::f64::consts::SQRT_2;

    let mut cutoff_bin = n - 1;
    let mut crossed = false;
    for r in 1..n {
        if smoothed[r] >= threshold {
            continue;
        }
        let run_end = (r..n).find(|&k| smoothed[k] >= threshold).unwrap_or(n);
        if run_end - r >= HYSTERESIS_BINS || run_end == n {
            cutoff_bin = r;
            crossed = true;
            break;
        }
    }

    let beyond = n - 1 - cutoff_bin;
    let confidence = if !crossed || beyond == 0 {
        0.0
    } else {
        let below = smoothed[cutoff_bin + 1..]
            .iter()
            .filter(|&&v| v < threshold)
            .count();
        below as f64 / beyond as f64
    };

    Ok(TransferEstimate {
        profile: profile.clone(),
        cutoff_bin,
        cutoff_cyc_per_sample: profile.freq_at(cutoff_bin),
        plateau,
        confidence,
    })
}

/// Knobs for [`estimate_pair_cutoff`]; the defaults are the ones every
/// pipeline entry point uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimateOptions {
    /// Radial bin count; `None` selects `min(width, height) / 2`, one bin
    /// per FFT bin along the shorter axis.
    pub radial_bins: Option<usize>,
    pub angular_samples: usize,
    pub eps: f64,
    /// Apply the Hann window before the transforms. Estimation wants this
    /// on; it exists as a switch for ablation only.
    pub window: bool,
    /// Exponentiate the log ratio before angular averaging.
    pub exponentiate_first: bool,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            radial_bins: None,
            angular_samples: 360,
            eps: DEFAULT_EPS,
            window: true,
            exponentiate_first: true,
        }
    }
}

/// Estimates the degradation transfer cutoff between a sharp image and a
/// degraded image of the same scene at the same size.
///
/// Color inputs are reduced to luminance. Both images pass through the same
/// window/FFT path; the log-magnitude difference is polar-averaged and the
/// cutoff detected on the resulting profile.
pub fn estimate_pair_cutoff(
    hr: &Image,
    lr: &Image,
    opts: &EstimateOptions,
) -> Result<TransferEstimate> {
    if hr.width() != lr.width() || hr.height() != lr.height() {
        return Err(Error::DimensionMismatch(format!(
            "pair {}x{} vs {}x{}; match sizes before estimating",
            hr.width(),
            hr.height(),
            lr.width(),
            lr.height()
        )));
    }
    let to_grid = |img: &Image| -> RealGrid {
        if opts.window {
            windowed_luminance(img)
        } else {
            let lum = img.luminance();
            RealGrid {
                width: lum.width(),
                height: lum.height(),
                values: lum.data().to_vec(),
            }
        }
    };
    let hr_spec = fft2_grid(&to_grid(hr))?;
    let lr_spec = fft2_grid(&to_grid(lr))?;
    let diff = transfer_log_diff(&hr_spec, &lr_spec, opts.eps)?;
    let radial_bins = opts
        .radial_bins
        .unwrap_or_else(|| hr.width().min(hr.height()) / 2);
    let profile = polar_radial_average(
        &diff,
        radial_bins,
        opts.angular_samples,
        opts.exponentiate_first,
    )?;
    detect_cutoff(&profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Direct O(N^4) DFT in the same unitary, DC-centered convention.
    fn naive_dft(grid: &RealGrid) -> Vec<Complex<f64>> {
        let (w, h) = (grid.width(), grid.height());
        let mut out = vec![Complex::default(); w * h];
        let scale = 1.0 / ((w * h) as f64).sqrt();
        for iy in 0..h {
            let v = iy as f64 - (h / 2) as f64;
            for ix in 0..w {
                let u = ix as f64 - (w / 2) as f64;
                let mut acc = Complex::default();
                for n in 0..h {
                    for m in 0..w {
                        let phase = -2.0 * PI * (u * m as f64 / w as f64 + v * n as f64 / h as f64);
                        acc += grid.get(m, n) * Complex::new(phase.cos(), phase.sin());
                    }
                }
                out[iy * w + ix] = acc * scale;
            }
        }
        out
    }

    /// Direct inverse of the same convention, no symmetry handling.
    fn naive_idft(spec: &Spectrum) -> Vec<Complex<f64>> {
        let (w, h) = (spec.width(), spec.height());
        let mut out = vec![Complex::default(); w * h];
        let scale = 1.0 / ((w * h) as f64).sqrt();
        for n in 0..h {
            for m in 0..w {
                let mut acc = Complex::default();
                for iy in 0..h {
                    let v = iy as f64 - (h / 2) as f64;
                    for ix in 0..w {
                        let u = ix as f64 - (w / 2) as f64;
                        let phase =
                            2.0 * PI * (u * m as f64 / w as f64 + v * n as f64 / h as f64);
                        acc += spec.get(ix, iy) * Complex::new(phase.cos(), phase.sin());
                    }
                }
                out[n * w + m] = acc * scale;
            }
        }
        out
    }

    fn noise_grid(w: usize, h: usize, seed: u64) -> RealGrid {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        RealGrid::new(w, h, (0..w * h).map(|_| rng.random::<f64>()).collect()).unwrap()
    }

    fn noise_image(w: usize, h: usize, seed: u64) -> Image {
        let g = noise_grid(w, h, seed);
        Image::new(w, h, 1, g.values().to_vec()).unwrap()
    }

    #[test]
    fn forward_matches_direct_summation() {
        for (w, h, seed) in [(16, 16, 1u64), (16, 12, 2), (9, 15, 3)] {
            let grid = noise_grid(w, h, seed);
            let spec = fft2_grid(&grid).unwrap();
            let oracle = naive_dft(&grid);
            for (b, o) in spec.bins().iter().zip(&oracle) {
                assert!((b - o).norm() < 1e-9, "{w}x{h}: {b} vs {o}");
            }
        }
    }

    #[test]
    fn constant_image_concentrates_at_dc() {
        let img = Image::constant(16, 16, 1, 0.3).unwrap();
        let spec = fft2(&img).unwrap();
        assert!((spec.get(8, 8).re - 0.3 * 16.0).abs() < 1e-12);
        assert!(spec.get(8, 8).im.abs() < 1e-12);
        for iy in 0..16 {
            for ix in 0..16 {
                if (ix, iy) != (8, 8) {
                    assert!(spec.get(ix, iy).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn impulse_spreads_flat_magnitude() {
        let mut data = vec![0.0; 256];
        data[0] = 1.0;
        let img = Image::new(16, 16, 1, data).unwrap();
        let spec = fft2(&img).unwrap();
        for b in spec.bins() {
            assert!((b.norm() - 1.0 / 16.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_cosine_lands_in_its_bins() {
        let w = 32;
        let data: Vec<f64> = (0..w * w)
            .map(|i| 0.5 + 0.25 * (2.0 * PI * 5.0 * (i % w) as f64 / w as f64).cos())
            .collect();
        let img = Image::new(w, w, 1, data).unwrap();
        let spec = fft2(&img).unwrap();
        assert!((spec.get(16, 16).re - 0.5 * 32.0).abs() < 1e-9);
        assert!((spec.get(16 + 5, 16).norm() - 0.25 / 2.0 * 32.0).abs() < 1e-9);
        assert!((spec.get(16 - 5, 16).norm() - 0.25 / 2.0 * 32.0).abs() < 1e-9);
        // Everything else is leakage-free for an integer cycle count.
        let energy_elsewhere: f64 = (0..w * w)
            .filter(|i| {
                let (ix, iy) = (i % w, i / w);
                !(iy == 16 && (ix == 16 || ix == 11 || ix == 21))
            })
            .map(|i| spec.bins()[i].norm_sqr())
            .sum();
        assert!(energy_elsewhere < 1e-18);
    }

    #[test]
    fn round_trip_is_tight() {
        for (w, h) in [(64, 64), (48, 36), (33, 27)] {
            let img = noise_image(w, h, 7);
            let back = ifft2(&fft2(&img).unwrap()).unwrap();
            let worst = img
                .data()
                .iter()
                .zip(back.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            assert!(worst < 1e-9, "{w}x{h}: {worst}");
        }
    }

    #[test]
    fn parseval_holds() {
        let img = noise_image(40, 56, 11);
        let spatial: f64 = img.data().iter().map(|v| v * v).sum();
        let spectral: f64 = fft2(&img).unwrap().bins().iter().map(|b| b.norm_sqr()).sum();
        assert!((spatial - spectral).abs() / spatial < 1e-6);
    }

    #[test]
    fn real_input_gives_conjugate_symmetry() {
        let img = noise_image(24, 18, 13);
        assert!(fft2(&img).unwrap().conjugate_symmetry_residual() < 1e-9);
    }

    #[test]
    fn asymmetric_spectrum_is_rejected() {
        let img = noise_image(16, 16, 17);
        let mut spec = fft2(&img).unwrap();
        let w = spec.width();
        spec.bins_mut()[8 * w + 11] += Complex::new(0.0, 0.5);
        match ifft2(&spec) {
            Err(Error::SymmetryViolation { .. }) => {}
            other => panic!("expected symmetry violation, got {other:?}"),
        }
    }

    #[test]
    fn truncated_impulse_spectrum_inverts_to_sinc_lobes() {
        // Ideal low-pass on an impulse: the inverse holds negative lobes and
        // must match the direct inverse sum, so no clamping may interfere.
        let (w, h) = (16, 16);
        let mut bins = vec![Complex::default(); w * h];
        for iy in 0..h {
            for ix in 0..w {
                let u = ix as f64 - 8.0;
                let v = iy as f64 - 8.0;
                if (u * u + v * v).sqrt() <= 3.0 {
                    bins[iy * w + ix] = Complex::new(1.0, 0.0);
                }
            }
        }
        let spec = Spectrum {
            width: w,
            height: h,
            bins,
        };
        let grid = ifft2(&spec).unwrap();
        let oracle = naive_idft(&spec);
        for (a, o) in grid.values().iter().zip(&oracle) {
            assert!((a - o.re).abs() < 1e-9);
        }
        assert!(grid.values().iter().any(|&v| v < -1e-3), "sinc lobes lost");
    }

    #[test]
    fn hann_window_shape() {
        let win = hann_window(64);
        assert!(win[0].abs() < 1e-12);
        assert!((win[32] - 1.0).abs() < 1e-12);
        for i in 1..64 {
            assert!((win[i] - win[64 - i]).abs() < 1e-12);
        }
    }

    #[test]
    fn log_magnitude_floors_empty_bins() {
        let img = Image::constant(16, 16, 1, 0.5).unwrap();
        let lm = log_magnitude(&fft2(&img).unwrap(), 1e-8);
        assert!((lm.get(8, 8) - (0.5f64 * 16.0 + 1e-8).ln()).abs() < 1e-9);
        assert!((lm.get(0, 0) - 1e-8f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn identical_pair_has_zero_log_diff() {
        let img = noise_image(32, 32, 19);
        let s = fft2(&img).unwrap();
        let diff = transfer_log_diff(&s, &s, DEFAULT_EPS).unwrap();
        assert!(diff.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn halved_pair_reads_log_half() {
        let img = noise_image(64, 64, 23);
        let halved = Image::new(
            64,
            64,
            1,
            img.data().iter().map(|v| v * 0.5).collect(),
        )
        .unwrap();
        let hr = fft2(&img).unwrap();
        let lr = fft2(&halved).unwrap();
        let diff = transfer_log_diff(&hr, &lr, DEFAULT_EPS).unwrap();
        let expect = 0.5f64.ln();
        for (i, b) in hr.bins().iter().enumerate() {
            if b.norm() > 1e-3 {
                assert!(
                    (diff.values()[i] - expect).abs() < 1e-4,
                    "bin {i}: {} vs {expect}",
                    diff.values()[i]
                );
            }
        }
    }

    #[test]
    fn polar_recovers_isotropic_radial_function() {
        let (w, h) = (64, 64);
        let sigma = 0.2;
        let values: Vec<f64> = (0..w * h)
            .map(|i| {
                let u = ((i % w) as f64 - 32.0) / w as f64;
                let v = ((i / w) as f64 - 32.0) / h as f64;
                (-(u * u + v * v) / (2.0 * sigma * sigma)).exp()
            })
            .collect();
        let grid = RealGrid::new(w, h, values).unwrap();
        let profile = polar_radial_average(&grid, 32, 360, false).unwrap();
        for r in 0..32 {
            let rho = profile.freq_at(r);
            let expect = (-(rho * rho) / (2.0 * sigma * sigma)).exp();
            assert!(
                (profile.values()[r] - expect).abs() < 2e-3,
                "bin {r}: {} vs {expect}",
                profile.values()[r]
            );
        }
    }

    #[test]
    fn polar_of_zero_log_grid_is_unity() {
        let grid = RealGrid::new(32, 32, vec![0.0; 32 * 32]).unwrap();
        let profile = polar_radial_average(&grid, 16, 360, true).unwrap();
        assert!(profile.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn polar_angular_mean_cancels_odd_functions() {
        // Horizontal ramp, antisymmetric about the center column. Opposite
        // rays hit mirrored lattice cells, so every bin cancels.
        let (w, h) = (64, 64);
        let values: Vec<f64> = (0..w * h)
            .map(|i| ((i % w) as f64 - 32.0) / 32.0)
            .collect();
        let grid = RealGrid::new(w, h, values).unwrap();
        let profile = polar_radial_average(&grid, 32, 360, false).unwrap();
        // Independent check on one ring: direct summation with the same ray
        // set, accumulated in reverse order.
        let r = 20;
        let rho = 20.0 * profile.bin_width_cyc_per_sample();
        let mut direct = 0.0;
        for t in (0..360).rev() {
            let theta = 2.0 * PI * t as f64 / 360.0;
            direct += bilinear_clamped(
                grid.values(),
                w,
                h,
                32.0 + rho * theta.cos() * w as f64,
                32.0 + rho * theta.sin() * h as f64,
            );
        }
        direct /= 360.0;
        assert!((profile.values()[r] - direct).abs() < 1e-12);
        for &v in profile.values() {
            assert!(v.abs() < 1e-12, "odd function left residue {v}");
        }
    }

    #[test]
    fn polar_average_is_rotation_invariant() {
        // 90-degree rotation about the DC bin permutes the sampled rays, so
        // profiles agree to reduction-order rounding.
        let w = 64;
        let grid = noise_grid(w, w, 29);
        let c = (w / 2) as isize;
        let rotated: Vec<f64> = (0..w * w)
            .map(|i| {
                let di = (i / w) as isize - c;
                let dj = (i % w) as isize - c;
                let oi = (c + dj).rem_euclid(w as isize) as usize;
                let oj = (c - di).rem_euclid(w as isize) as usize;
                grid.get(oj, oi)
            })
            .collect();
        let rot = RealGrid::new(w, w, rotated).unwrap();
        let a = polar_radial_average(&grid, 32, 360, false).unwrap();
        let b = polar_radial_average(&rot, 32, 360, false).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn polar_rejects_bad_bin_counts() {
        let grid = RealGrid::new(32, 32, vec![0.0; 32 * 32]).unwrap();
        assert!(polar_radial_average(&grid, 0, 360, false).is_err());
        assert!(polar_radial_average(&grid, 17, 360, false).is_err());
        assert!(polar_radial_average(&grid, 16, 2, false).is_err());
    }

    fn butterworth_profile(fc: f64, order: u32, bins: usize) -> RadialProfile {
        let bw = 0.5 / bins as f64;
        let values = (0..bins)
            .map(|r| {
                let rho = r as f64 * bw;
                1.0 / (1.0 + (rho / fc).powi(2 * order as i32)).sqrt()
            })
            .collect();
        RadialProfile::from_values(values, bw).unwrap()
    }

    #[test]
    fn detects_butterworth_knee_within_two_bins() {
        // fc at bin 50 of 256.
        let profile = butterworth_profile(50.0 / 512.0, 2, 256);
        let est = detect_cutoff(&profile).unwrap();
        assert!(
            (est.cutoff_bin as isize - 50).unsigned_abs() <= 2,
            "cutoff at bin {}",
            est.cutoff_bin
        );
        assert!(est.confidence > 0.9);
        assert!((est.plateau - 1.0).abs() < 0.01);
        assert_eq!(est.cutoff_cyc_per_sample, profile.freq_at(est.cutoff_bin));
    }

    #[test]
    fn flat_profile_never_crosses() {
        let profile = RadialProfile::from_values(vec![1.0; 256], 0.5 / 256.0).unwrap();
        let est = detect_cutoff(&profile).unwrap();
        assert_eq!(est.cutoff_bin, 255);
        assert_eq!(est.confidence, 0.0);
    }

    #[test]
    fn detected_bin_is_monotone_in_cutoff() {
        let mut last = 0;
        for fc in [0.1, 0.2, 0.3, 0.4] {
            let est = detect_cutoff(&butterworth_profile(fc, 2, 256)).unwrap();
            assert!(est.cutoff_bin > last, "fc {fc}: bin {}", est.cutoff_bin);
            last = est.cutoff_bin;
        }
    }

    #[test]
    fn short_profiles_are_rejected() {
        let profile = RadialProfile::from_values(vec![1.0; 15], 0.5 / 15.0).unwrap();
        assert!(detect_cutoff(&profile).is_err());
    }

    #[test]
    fn identical_pair_estimates_nyquist_with_zero_confidence() {
        let img = noise_image(64, 64, 31);
        let est = estimate_pair_cutoff(&img, &img, &EstimateOptions::default()).unwrap();
        assert_eq!(est.cutoff_bin, 31);
        assert_eq!(est.confidence, 0.0);
    }

    #[test]
    fn mismatched_pair_sizes_are_rejected() {
        let a = noise_image(64, 64, 1);
        let b = noise_image(32, 32, 1);
        assert!(matches!(
            estimate_pair_cutoff(&a, &b, &EstimateOptions::default()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn profile_csv_format() {
        let profile = RadialProfile::from_values(vec![1.0, 0.5], 0.25).unwrap();
        let mut buf = Vec::new();
        profile.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "radius_bin,freq_cyc_per_sample,value\n0,0.000000000,1.000000000\n1,0.250000000,0.500000000\n"
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn round_trip_any_size(w in 8usize..24, h in 8usize..24, seed in 0u64..1000) {
            let img = noise_image(w, h, seed);
            let back = ifft2(&fft2(&img).unwrap()).unwrap();
            for (a, b) in img.data().iter().zip(back.values()) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn parseval_any_size(w in 8usize..24, h in 8usize..24, seed in 0u64..1000) {
            let img = noise_image(w, h, seed);
            let spatial: f64 = img.data().iter().map(|v| v * v).sum();
            let spectral: f64 = fft2(&img).unwrap().bins().iter().map(|b| b.norm_sqr()).sum();
            prop_assert!((spatial - spectral).abs() / spatial.max(1e-12) < 1e-6);
        }
    }
}
