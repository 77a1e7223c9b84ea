//! Forward degradation: low-pass filtering, decimation, and read noise.
//!
//! The chain that manufactures a degraded image from a sharp one:
//!
//! ```text
//! HR --> Butterworth low-pass (per channel, frequency domain)
//!    --> decimate by N (optional)
//!    --> additive Gaussian read noise --> clamp to [0, 1]
//! ```
//!
//! The filter's cutoff is expressed in cycles per input-grid sample, so a
//! cutoff of 0.25 halves power at half Nyquist regardless of image size.
//! After decimation by `N` the same feature sits at `N * cutoff` on the
//! output grid; callers comparing against estimates made on the output grid
//! account for that rescale themselves.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imageio::Image;
use crate::spectral::{fft2_grid, ifft2, RealGrid};

/// Isotropic Butterworth low-pass in digital frequency.
///
/// ```text
/// gain(rho) = 1 / sqrt(1 + (rho / cutoff)^(2 * order))
/// ```
///
/// Gain is exactly 1 at DC and `1 / sqrt(2)` (-3 dB) at `rho == cutoff`;
/// larger orders steepen the rolloff without moving the knee.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ButterworthFilter {
    /// Knee position, cycles/sample on the grid the filter is applied to.
    pub cutoff: f64,
    pub order: u32,
}

impl ButterworthFilter {
    pub fn new(cutoff: f64, order: u32) -> Result<Self> {
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(Error::InvalidInput(format!(
                "filter cutoff must be positive, got {cutoff}"
            )));
        }
        if order == 0 {
            return Err(Error::InvalidInput("filter order must be at least 1".into()));
        }
        Ok(Self { cutoff, order })
    }

    /// Gain at radial frequency `rho` (cycles/sample).
    #[inline]
    pub fn gain(&self, rho: f64) -> f64 {
        if rho == 0.0 {
            return 1.0;
        }
        1.0 / (1.0 + (rho / self.cutoff).powi(2 * self.order as i32)).sqrt()
    }

    /// Gain sampled on a DC-centered `width x height` spectrum grid, in the
    /// spectrum's row-major bin order.
    pub fn gain_grid(&self, width: usize, height: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(width * height);
        for iy in 0..height {
            let v = (iy as f64 - (height / 2) as f64) / height as f64;
            for ix in 0..width {
                let u = (ix as f64 - (width / 2) as f64) / width as f64;
                out.push(self.gain((u * u + v * v).sqrt()));
            }
        }
        out
    }
}

/// Full description of one synthetic degradation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DegradationConfig {
    /// Butterworth knee, cycles per input-grid sample.
    pub cutoff: f64,
    pub order: u32,
    /// Integer decimation factor; 1 keeps the input grid.
    pub downsample: usize,
    /// Read noise standard deviation in [0, 1] pixel units.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for DegradationConfig {
    fn default() -> Self {
        Self {
            cutoff: 0.25,
            order: 2,
            downsample: 1,
            noise_sigma: 1.0 / 255.0,
            seed: 0,
        }
    }
}

impl DegradationConfig {
    pub fn validate(&self) -> Result<()> {
        ButterworthFilter::new(self.cutoff, self.order)?;
        if self.downsample == 0 {
            return Err(Error::InvalidInput("downsample factor must be at least 1".into()));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "noise sigma must be non-negative, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }

    pub fn filter(&self) -> ButterworthFilter {
        ButterworthFilter {
            cutoff: self.cutoff,
            order: self.order,
        }
    }
}

/// Applies `filter` to every channel of `img` in the frequency domain and
/// clamps the result back to [0, 1].
pub fn apply_filter(img: &Image, filter: &ButterworthFilter) -> Result<Image> {
    let (w, h, c) = (img.width(), img.height(), img.channels());
    let gains = filter.gain_grid(w, h);
    let mut planes = Vec::with_capacity(c);
    for ch in 0..c {
        let plane = img.channel_plane(ch);
        let mut spec = fft2_grid(&RealGrid::new(w, h, plane)?)?;
        for (b, &g) in spec.bins_mut().iter_mut().zip(&gains) {
            *b *= g;
        }
        planes.push(ifft2(&spec)?.values().to_vec());
    }
    let mut out = Image::from_planes(w, h, &planes)?;
    if let Some(p) = img.provenance() {
        out.set_provenance(p.clone());
    }
    Ok(out)
}

/// Keeps every `factor`-th sample starting at the origin. When a dimension
/// is not divisible the trailing remainder rows/columns are dropped first
/// and the original size is recorded in the output's provenance.
pub fn downsample(img: &Image, factor: usize) -> Result<Image> {
    if factor == 0 {
        return Err(Error::InvalidInput("downsample factor must be at least 1".into()));
    }
    if factor == 1 {
        return Ok(img.clone());
    }
    let (w, h, c) = (img.width(), img.height(), img.channels());
    let (nw, nh) = (w / factor, h / factor);
    if nw < 1 || nh < 1 {
        return Err(Error::InvalidInput(format!(
            "cannot decimate {w}x{h} by {factor}"
        )));
    }
    let mut data = Vec::with_capacity(nw * nh * c);
    for y in 0..nh {
        for x in 0..nw {
            for ch in 0..c {
                data.push(img.get(x * factor, y * factor, ch));
            }
        }
    }
    let mut out = Image::new(nw, nh, c, data)?;
    let mut prov = img.provenance().cloned().unwrap_or_default();
    if w % factor != 0 || h % factor != 0 {
        prov.cropped_from = Some((w, h));
    }
    if !prov.is_empty() {
        out.set_provenance(prov);
    }
    Ok(out)
}

/// Box-average pooling by `factor`, the bandlimit-friendly alternative to
/// plain decimation. Same size and cropping rules as [`downsample`].
pub fn downsample_area(img: &Image, factor: usize) -> Result<Image> {
    if factor == 0 {
        return Err(Error::InvalidInput("downsample factor must be at least 1".into()));
    }
    if factor == 1 {
        return Ok(img.clone());
    }
    let (w, h, c) = (img.width(), img.height(), img.channels());
    let (nw, nh) = (w / factor, h / factor);
    if nw < 1 || nh < 1 {
        return Err(Error::InvalidInput(format!(
            "cannot pool {w}x{h} by {factor}"
        )));
    }
    let norm = 1.0 / (factor * factor) as f64;
    let mut data = Vec::with_capacity(nw * nh * c);
    for y in 0..nh {
        for x in 0..nw {
            for ch in 0..c {
                let mut acc = 0.0;
                for dy in 0..factor {
                    for dx in 0..factor {
                        acc += img.get(x * factor + dx, y * factor + dy, ch);
                    }
                }
                data.push(acc * norm);
            }
        }
    }
    let mut out = Image::new(nw, nh, c, data)?;
    let mut prov = img.provenance().cloned().unwrap_or_default();
    if w % factor != 0 || h % factor != 0 {
        prov.cropped_from = Some((w, h));
    }
    if !prov.is_empty() {
        out.set_provenance(prov);
    }
    Ok(out)
}

/// Adds zero-mean Gaussian noise of standard deviation `sigma` to every
/// sample and clamps to [0, 1].
///
/// The generator is a counter-based stream cipher keyed by `seed` with
/// `stream` as the stream index, so each image in a batch draws from its
/// own independent sequence while the whole batch stays reproducible. The
/// fill is sequential in pixel order.
pub fn add_read_noise(img: &Image, sigma: f64, seed: u64, stream: u64) -> Result<Image> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "noise sigma must be non-negative, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(img.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::InvalidInput(format!("bad noise parameters: {e}")))?;
    let data = img
        .data()
        .iter()
        .map(|v| (v + normal.sample(&mut rng)).clamp(0.0, 1.0))
        .collect();
    let mut out = Image::new(img.width(), img.height(), img.channels(), data)?;
    if let Some(p) = img.provenance() {
        out.set_provenance(p.clone());
    }
    Ok(out)
}

/// Runs the full degradation chain on one image.
pub fn synthesize_lr(hr: &Image, config: &DegradationConfig) -> Result<Image> {
    synthesize_lr_indexed(hr, config, 0)
}

/// [`synthesize_lr`] with an explicit noise stream index, for batches where
/// every output needs distinct noise under one seed.
pub fn synthesize_lr_indexed(hr: &Image, config: &DegradationConfig, stream: u64) -> Result<Image> {
    config.validate()?;
    let filtered = apply_filter(hr, &config.filter())?;
    let small = downsample(&filtered, config.downsample)?;
    add_read_noise(&small, config.noise_sigma, config.seed, stream)
}
