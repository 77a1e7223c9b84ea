//! Helpers shared by the integration suites: deterministic test scenes and
//! small statistics utilities.

use degrade_core::imageio::Image;
use degrade_core::simulator::{render_scene, ScenePattern};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Multi-scale synthetic scene standing in for a natural photograph:
/// a smooth gradient base, soft blobs across two decades of size, and
/// hard-edged discs whose step edges keep the spectrum populated out to
/// Nyquist.
pub fn natural_scene(size: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = size as f64;
    let mut vals = vec![0.0f64; size * size];
    let (gx, gy): (f64, f64) = (rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
    for y in 0..size {
        for x in 0..size {
            vals[y * size + x] = gx * x as f64 / n + gy * y as f64 / n;
        }
    }
    for _ in 0..220 {
        let cx = rng.random::<f64>() * n;
        let cy = rng.random::<f64>() * n;
        // Log-uniform radii from sub-pixel detail to broad washes.
        let sigma = 0.8 * (24.0f64 / 0.8).powf(rng.random::<f64>());
        let amp = (rng.random::<f64>() - 0.5) * 0.9;
        let reach = (3.0 * sigma).ceil() as isize;
        let (icx, icy) = (cx.round() as isize, cy.round() as isize);
        for dy in -reach..=reach {
            let y = icy + dy;
            if y < 0 || y >= size as isize {
                continue;
            }
            for dx in -reach..=reach {
                let x = icx + dx;
                if x < 0 || x >= size as isize {
                    continue;
                }
                let r2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                vals[y as usize * size + x as usize] +=
                    amp * (-r2 / (2.0 * sigma * sigma)).exp();
            }
        }
    }
    for _ in 0..60 {
        let cx = rng.random::<f64>() * n;
        let cy = rng.random::<f64>() * n;
        let radius = 2.0 + rng.random::<f64>() * 28.0;
        let amp = (rng.random::<f64>() - 0.5) * 0.5;
        let reach = radius.ceil() as isize;
        let (icx, icy) = (cx.round() as isize, cy.round() as isize);
        for dy in -reach..=reach {
            let y = icy + dy;
            if y < 0 || y >= size as isize {
                continue;
            }
            for dx in -reach..=reach {
                let x = icx + dx;
                if x < 0 || x >= size as isize {
                    continue;
                }
                let r2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                if r2 <= radius * radius {
                    vals[y as usize * size + x as usize] += amp;
                }
            }
        }
    }
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(1e-12);
    for v in &mut vals {
        *v = 0.02 + 0.96 * (*v - lo) / span;
    }
    Image::new(size, size, 1, vals).unwrap()
}

/// Zone plate in pixel units with full ring coverage at every radial
/// frequency up to Nyquist (local frequency reaches 0.5 cycles/px at the
/// edge midpoints; the corner overspill folds into extra in-band rings,
/// which only adds usable energy for transfer estimation).
pub fn pixel_zone_plate(size: usize) -> Image {
    let field = render_scene(
        &ScenePattern::ZonePlate {
            chirp_cyc_per_mm2: 1.0 / size as f64,
        },
        size,
        size as f64,
    )
    .unwrap();
    Image::new(size, size, 1, field.values().to_vec()).unwrap()
}

// Each integration target compiles its own copy of this module and not
// every target ranks anything.
#[allow(dead_code)]
fn rank(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0;
        for &k in &order[i..=j] {
            ranks[k] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation; ties get averaged ranks.
#[allow(dead_code)]
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let (ra, rb) = (rank(a), rank(b));
    let n = a.len() as f64;
    let mean = (n - 1.0) / 2.0;
    let mut num = 0.0;
    let mut da = 0.0;
    let mut db = 0.0;
    for i in 0..a.len() {
        let (xa, xb) = (ra[i] - mean, rb[i] - mean);
        num += xa * xb;
        da += xa * xa;
        db += xb * xb;
    }
    num / (da.sqrt() * db.sqrt()).max(1e-300)
}
