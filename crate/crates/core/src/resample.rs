//! Interpolation and resizing primitives shared by the spectral polar
//! resampler, the capture simulator, and pair FOV matching.

use crate::error::{Error, Result};
use crate::imageio::Image;
use crate::parallel;

/// Bilinear sample of a row-major plane at fractional coordinates, with
/// edge clamping. Coordinates are in index units, pixel centers at integers.
#[inline]
pub(crate) fn bilinear_clamped(values: &[f64], width: usize, height: usize, x: f64, y: f64) -> f64 {
    debug_assert_eq!(values.len(), width * height);
    let xc = x.clamp(0.0, (width - 1) as f64);
    let yc = y.clamp(0.0, (height - 1) as f64);
    let x0 = (xc.floor() as usize).min(width - 1);
    let y0 = (yc.floor() as usize).min(height - 1);
    let x1 = (x0 + 1).min(width - 1);
    let y1 = (y0 + 1).min(height - 1);
    let fx = xc - x0 as f64;
    let fy = yc - y0 as f64;
    let top = values[y0 * width + x0] * (1.0 - fx) + values[y0 * width + x1] * fx;
    let bottom = values[y1 * width + x0] * (1.0 - fx) + values[y1 * width + x1] * fx;
    top * (1.0 - fy) + bottom * fy
}

/// Catmull-Rom tap weights (cubic with a = -0.5) for phase `t` in `[0, 1)`,
/// covering source offsets -1, 0, 1, 2 around the floor index. Weights sum
/// to one for every phase, so flat signals pass through unchanged.
#[inline]
fn catmull_rom_weights(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        -0.5 * t3 + t2 - 0.5 * t,
        1.5 * t3 - 2.5 * t2 + 1.0,
        -1.5 * t3 + 2.0 * t2 + 0.5 * t,
        0.5 * t3 - 0.5 * t2,
    ]
}

/// Per-axis resampling plan: for each destination index, the base source
/// index of the 4-tap window and its weights.
fn axis_plan(src: usize, dst: usize) -> Vec<(isize, [f64; 4])> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|d| {
            // Pixel-center alignment: both grids span the same extent.
            let s = (d as f64 + 0.5) * scale - 0.5;
            let base = s.floor();
            (base as isize - 1, catmull_rom_weights(s - base))
        })
        .collect()
}

#[inline]
fn clamp_index(i: isize, n: usize) -> usize {
    i.clamp(0, n as isize - 1) as usize
}

/// Resizes to an arbitrary size with separable Catmull-Rom interpolation,
/// replicating edges. Output is clamped to `[0, 1]` at the end.
pub fn resize_catmull_rom(img: &Image, dst_width: usize, dst_height: usize) -> Result<Image> {
    if dst_width == 0 || dst_height == 0 {
        return Err(Error::InvalidInput("target dimensions must be nonzero".into()));
    }
    let (sw, sh, ch) = (img.width(), img.height(), img.channels());
    if dst_width == sw && dst_height == sh {
        return Ok(img.clone());
    }
    let xplan = axis_plan(sw, dst_width);
    let yplan = axis_plan(sh, dst_height);
    let planes: Vec<Vec<f64>> = (0..ch)
        .map(|c| {
            let src = img.channel_plane(c);
            // Horizontal pass: sw x sh -> dst_width x sh.
            let mut mid = vec![0.0; dst_width * sh];
            parallel::for_each_chunk_mut(&mut mid, dst_width, |y, row| {
                let src_row = &src[y * sw..(y + 1) * sw];
                for (x, out) in row.iter_mut().enumerate() {
                    let (base, w) = xplan[x];
                    let mut acc = 0.0;
                    for (k, &wk) in w.iter().enumerate() {
                        acc += wk * src_row[clamp_index(base + k as isize, sw)];
                    }
                    *out = acc;
                }
            });
            // Vertical pass: dst_width x sh -> dst_width x dst_height.
            let mut out = vec![0.0; dst_width * dst_height];
            parallel::for_each_chunk_mut(&mut out, dst_width, |y, row| {
                let (base, w) = yplan[y];
                let rows: Vec<usize> = (0..4).map(|k| clamp_index(base + k as isize, sh)).collect();
                for (x, out_px) in row.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (k, &wk) in w.iter().enumerate() {
                        acc += wk * mid[rows[k] * dst_width + x];
                    }
                    *out_px = acc;
                }
            });
            out
        })
        .collect();
    let mut out = Image::from_planes(dst_width, dst_height, &planes)?;
    if let Some(p) = img.provenance() {
        out.set_provenance(p.clone());
    }
    Ok(out)
}

/// Integer-factor upsample via [`resize_catmull_rom`].
pub fn upsample(img: &Image, factor: usize) -> Result<Image> {
    if factor == 0 {
        return Err(Error::InvalidInput("upsample factor must be nonzero".into()));
    }
    resize_catmull_rom(img, img.width() * factor, img.height() * factor)
}
