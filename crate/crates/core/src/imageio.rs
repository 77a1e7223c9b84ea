//! In-memory image representation and file I/O.
//!
//! Pixels are `f64` in `[0, 1]`, row-major, channel-interleaved, one or
//! three channels. Files are normalized into that range on load (8- or
//! 16-bit sources) and quantized to 8 bits only on save. Intermediate
//! processing stays in floating point; operations clamp once at their end.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::camera::{CameraSpec, SceneGeometry};
use crate::error::{Error, Result};

/// BT.601 luma weights.
const LUMA_R: f64 = 0.299;
const LUMA_G: f64 = 0.587;
const LUMA_B: f64 = 0.114;

/// Optional record of where an image came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub camera: Option<CameraSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<SceneGeometry>,
    /// Bit depth of the file this image was decoded from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_bit_depth: Option<u8>,
    /// Original size before a divisibility crop, if one was applied.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cropped_from: Option<(usize, usize)>,
}

impl Provenance {
    pub fn is_empty(&self) -> bool {
        self == &Provenance::default()
    }
}

/// A real-valued image with unit dynamic range.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
    provenance: Option<Box<Provenance>>,
}

impl Image {
    /// Builds an image from samples already in `[0, 1]`. Rejects non-finite
    /// or out-of-range values; use [`Image::from_clamped`] for raw results
    /// of numeric pipelines.
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        Self::check_shape(width, height, channels, data.len())?;
        for &v in &data {
            if !v.is_finite() {
                return Err(Error::InvalidInput("non-finite pixel value".into()));
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidInput(format!(
                    "pixel value {v} outside [0, 1]; clamp explicitly if intended"
                )));
            }
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
            provenance: None,
        })
    }

    /// Builds an image from arbitrary finite samples, clamping into `[0, 1]`.
    pub fn from_clamped(
        width: usize,
        height: usize,
        channels: usize,
        mut data: Vec<f64>,
    ) -> Result<Self> {
        Self::check_shape(width, height, channels, data.len())?;
        for v in &mut data {
            if !v.is_finite() {
                return Err(Error::InvalidInput("non-finite pixel value".into()));
            }
            *v = v.clamp(0.0, 1.0);
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
            provenance: None,
        })
    }

    /// Constant-valued image.
    pub fn constant(width: usize, height: usize, channels: usize, value: f64) -> Result<Self> {
        Self::new(width, height, channels, vec![value; width * height * channels])
    }

    fn check_shape(width: usize, height: usize, channels: usize, len: usize) -> Result<()> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput("image dimensions must be nonzero".into()));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidInput(format!(
                "channel count must be 1 or 3, got {channels}"
            )));
        }
        if len != width * height * channels {
            return Err(Error::DimensionMismatch(format!(
                "buffer length {len} does not match {width}x{height}x{channels}"
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_deref()
    }

    pub fn set_provenance(&mut self, provenance: Provenance) {
        if provenance.is_empty() {
            self.provenance = None;
        } else {
            self.provenance = Some(Box::new(provenance));
        }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.set_provenance(provenance);
        self
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f64 {
        debug_assert!(x < self.width && y < self.height && c < self.channels);
        self.data[(y * self.width + x) * self.channels + c]
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// One channel as a contiguous plane.
    pub fn channel_plane(&self, c: usize) -> Vec<f64> {
        assert!(c < self.channels, "channel {c} out of range");
        if self.channels == 1 {
            return self.data.clone();
        }
        self.data.iter().skip(c).step_by(self.channels).copied().collect()
    }

    /// Reassembles an image from per-channel planes, clamping to `[0, 1]`.
    pub fn from_planes(width: usize, height: usize, planes: &[Vec<f64>]) -> Result<Self> {
        let channels = planes.len();
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidInput(format!(
                "plane count must be 1 or 3, got {channels}"
            )));
        }
        for p in planes {
            if p.len() != width * height {
                return Err(Error::DimensionMismatch(
                    "plane length does not match dimensions".into(),
                ));
            }
        }
        let mut data = vec![0.0; width * height * channels];
        for (c, p) in planes.iter().enumerate() {
            for (i, &v) in p.iter().enumerate() {
                data[i * channels + c] = v;
            }
        }
        Self::from_clamped(width, height, channels, data)
    }

    /// BT.601 luminance; single-channel images pass through unchanged.
    pub fn luminance(&self) -> Image {
        if self.channels == 1 {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.width * self.height);
        for px in self.data.chunks_exact(3) {
            out.push(LUMA_R * px[0] + LUMA_G * px[1] + LUMA_B * px[2]);
        }
        let mut img = Image {
            width: self.width,
            height: self.height,
            channels: 1,
            data: out,
            provenance: self.provenance.clone(),
        };
        // Convex combination of in-range values stays in range; clamp only
        // guards against accumulated rounding at the boundaries.
        for v in &mut img.data {
            *v = v.clamp(0.0, 1.0);
        }
        img
    }

    /// Axis-aligned crop. The region must lie inside the image.
    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> Result<Image> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput("crop dimensions must be nonzero".into()));
        }
        if x0 + width > self.width || y0 + height > self.height {
            return Err(Error::InvalidInput(format!(
                "crop {width}x{height}+{x0}+{y0} exceeds image {}x{}",
                self.width, self.height
            )));
        }
        let mut data = Vec::with_capacity(width * height * self.channels);
        for y in y0..y0 + height {
            let row = &self.data[(y * self.width + x0) * self.channels
                ..(y * self.width + x0 + width) * self.channels];
            data.extend_from_slice(row);
        }
        Ok(Image {
            width,
            height,
            channels: self.channels,
            data,
            provenance: self.provenance.clone(),
        })
    }
}

/// Loads a PNG, PGM, or PPM file, normalizing to `[0, 1]`.
///
/// Gray stays single-channel, RGB stays three-channel, and an alpha channel
/// is dropped. The source bit depth (8 or 16) is recorded in provenance.
pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let decoded = image::open(path)?;
    let (bit_depth, width, height, channels, data) = match decoded {
        image::DynamicImage::ImageLuma8(img) => {
            let (w, h) = img.dimensions();
            let data = img.into_raw().into_iter().map(|v| v as f64 / 255.0).collect();
            (8u8, w, h, 1usize, data)
        }
        image::DynamicImage::ImageRgb8(img) => {
            let (w, h) = img.dimensions();
            let data = img.into_raw().into_iter().map(|v| v as f64 / 255.0).collect();
            (8, w, h, 3, data)
        }
        image::DynamicImage::ImageLuma16(img) => {
            let (w, h) = img.dimensions();
            let data = img.into_raw().into_iter().map(|v| v as f64 / 65535.0).collect();
            (16, w, h, 1, data)
        }
        image::DynamicImage::ImageRgb16(img) => {
            let (w, h) = img.dimensions();
            let data = img.into_raw().into_iter().map(|v| v as f64 / 65535.0).collect();
            (16, w, h, 3, data)
        }
        image::DynamicImage::ImageLumaA8(img) => {
            let (w, h) = img.dimensions();
            let data = img.into_raw().chunks_exact(2).map(|p| p[0] as f64 / 255.0).collect();
            (8, w, h, 1, data)
        }
        image::DynamicImage::ImageRgba8(img) => {
            let (w, h) = img.dimensions();
            let data = img
                .into_raw()
                .chunks_exact(4)
                .flat_map(|p| p[..3].iter().map(|&v| v as f64 / 255.0).collect::<Vec<_>>())
                .collect();
            (8, w, h, 3, data)
        }
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "unhandled pixel layout {:?} in {}",
                other.color(),
                path.display()
            )))
        }
    };
    let mut img = Image::from_clamped(width as usize, height as usize, channels, data)?;
    img.set_provenance(Provenance {
        source_bit_depth: Some(bit_depth),
        ..Provenance::default()
    });
    Ok(img)
}

/// Saves as 8-bit PNG, PGM, or PPM depending on the file extension.
pub fn save_image(path: impl AsRef<Path>, img: &Image) -> Result<()> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    match ext.as_str() {
        "png" | "pgm" | "ppm" => {}
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "extension '{other}' (use png, pgm, or ppm)"
            )))
        }
    }
    let quantize = |v: f64| (v.clamp(0.0, 1.0) * 255.0).round() as u8;
    // PGM holds gray only, PPM holds color only; PNG holds either.
    match (img.channels, ext.as_str()) {
        (1, "ppm") => {
            return Err(Error::UnsupportedFormat(
                "ppm stores color images; use pgm or png for gray".into(),
            ))
        }
        (3, "pgm") => {
            return Err(Error::UnsupportedFormat(
                "pgm stores gray images; use ppm or png for color".into(),
            ))
        }
        _ => {}
    }
    if img.channels == 1 {
        let buf: Vec<u8> = img.data.iter().map(|&v| quantize(v)).collect();
        let gray = image::GrayImage::from_raw(img.width as u32, img.height as u32, buf)
            .expect("buffer sized from image");
        gray.save(path)?;
    } else {
        let buf: Vec<u8> = img.data.iter().map(|&v| quantize(v)).collect();
        let rgb = image::RgbImage::from_raw(img.width as u32, img.height as u32, buf)
            .expect("buffer sized from image");
        rgb.save(path)?;
    }
    Ok(())
}
