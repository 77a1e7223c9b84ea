//! Self-contained radial-profile plots: axes, polyline, threshold and
//! cutoff markers, numeric labels from a tiny built-in glyph set. No
//! drawing library, just pixels into an image buffer.

use std::path::Path;

use degrade_core::imageio::{save_image, Image};
use degrade_core::spectral::TransferEstimate;

const W: usize = 640;
const H: usize = 400;
const LEFT: usize = 56;
const RIGHT: usize = 616;
const TOP: usize = 24;
const BOTTOM: usize = 360;

const INK: [f64; 3] = [0.15, 0.15, 0.15];
const GRID: [f64; 3] = [0.85, 0.85, 0.85];
const CURVE: [f64; 3] = [0.10, 0.25, 0.75];
const THRESHOLD: [f64; 3] = [0.55, 0.55, 0.55];
const CUTOFF: [f64; 3] = [0.80, 0.15, 0.15];

struct Canvas {
    data: Vec<f64>,
}

impl Canvas {
    fn new() -> Self {
        Self {
            data: vec![1.0; W * H * 3],
        }
    }

    fn set(&mut self, x: isize, y: isize, color: [f64; 3]) {
        if x < 0 || y < 0 || x >= W as isize || y >= H as isize {
            return;
        }
        let i = (y as usize * W + x as usize) * 3;
        self.data[i..i + 3].copy_from_slice(&color);
    }

    fn hline(&mut self, y: usize, x0: usize, x1: usize, color: [f64; 3]) {
        for x in x0..=x1 {
            self.set(x as isize, y as isize, color);
        }
    }

    fn vline(&mut self, x: usize, y0: usize, y1: usize, color: [f64; 3]) {
        for y in y0..=y1 {
            self.set(x as isize, y as isize, color);
        }
    }

    fn dashed_hline(&mut self, y: usize, x0: usize, x1: usize, color: [f64; 3]) {
        for x in x0..=x1 {
            if (x / 4) % 2 == 0 {
                self.set(x as isize, y as isize, color);
            }
        }
    }

    fn line(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, color: [f64; 3]) {
        let steps = (x1 - x0).abs().max((y1 - y0).abs()).ceil().max(1.0) as usize;
        for i in 0..=steps {
            let t = i as f64 / steps as f64;
            let x = (x0 + t * (x1 - x0)).round() as isize;
            let y = (y0 + t * (y1 - y0)).round() as isize;
            self.set(x, y, color);
            self.set(x, y + 1, color);
        }
    }
}

/// 3x5 glyphs, one bit per pixel, rows top to bottom.
fn glyph(c: char) -> [u8; 5] {
    match c {
        '0' => [0b111, 0b101, 0b101, 0b101, 0b111],
        '1' => [0b010, 0b110, 0b010, 0b010, 0b111],
        '2' => [0b111, 0b001, 0b111, 0b100, 0b111],
        '3' => [0b111, 0b001, 0b111, 0b001, 0b111],
        '4' => [0b101, 0b101, 0b111, 0b001, 0b001],
        '5' => [0b111, 0b100, 0b111, 0b001, 0b111],
        '6' => [0b111, 0b100, 0b111, 0b101, 0b111],
        '7' => [0b111, 0b001, 0b010, 0b010, 0b010],
        '8' => [0b111, 0b101, 0b111, 0b101, 0b111],
        '9' => [0b111, 0b101, 0b111, 0b001, 0b111],
        '.' => [0b000, 0b000, 0b000, 0b000, 0b010],
        '-' => [0b000, 0b000, 0b111, 0b000, 0b000],
        _ => [0b000; 5],
    }
}

fn draw_text(canvas: &mut Canvas, x: usize, y: usize, text: &str, color: [f64; 3]) {
    const SCALE: usize = 2;
    let mut cx = x;
    for c in text.chars() {
        let g = glyph(c);
        for (row, bits) in g.iter().enumerate() {
            for col in 0..3 {
                if bits & (0b100 >> col) != 0 {
                    for dy in 0..SCALE {
                        for dx in 0..SCALE {
                            canvas.set(
                                (cx + col * SCALE + dx) as isize,
                                (y + row * SCALE + dy) as isize,
                                color,
                            );
                        }
                    }
                }
            }
        }
        cx += 4 * SCALE;
    }
}

/// Renders the profile with its threshold and detected cutoff marked.
pub fn render_profile_plot(est: &TransferEstimate) -> Image {
    let mut canvas = Canvas::new();
    let values = est.profile.values();
    let max_freq = est.profile.freq_at(values.len().saturating_sub(1)).max(1e-9);
    let max_val = values.iter().cloned().fold(1.0f64, f64::max) * 1.05;

    let to_x = |freq: f64| LEFT as f64 + freq / max_freq * (RIGHT - LEFT) as f64;
    let to_y = |v: f64| BOTTOM as f64 - (v / max_val).clamp(0.0, 1.0) * (BOTTOM - TOP) as f64;

    // Grid at fixed frequency and gain stops.
    for tick in [0.1, 0.2, 0.3, 0.4, 0.5] {
        if tick <= max_freq + 1e-9 {
            canvas.vline(to_x(tick).round() as usize, TOP, BOTTOM, GRID);
        }
    }
    for tick in [0.25, 0.5, 0.75, 1.0] {
        canvas.hline(to_y(tick).round() as usize, LEFT, RIGHT, GRID);
    }

    // Threshold and cutoff markers under the curve.
    canvas.dashed_hline(
        to_y(est.threshold()).round() as usize,
        LEFT,
        RIGHT,
        THRESHOLD,
    );
    let cx = to_x(est.cutoff_cyc_per_sample).round() as usize;
    canvas.vline(cx.clamp(LEFT, RIGHT), TOP, BOTTOM, CUTOFF);

    // The profile itself.
    for i in 1..values.len() {
        canvas.line(
            to_x(est.profile.freq_at(i - 1)),
            to_y(values[i - 1]),
            to_x(est.profile.freq_at(i)),
            to_y(values[i]),
            CURVE,
        );
    }

    // Axes over everything else.
    canvas.hline(BOTTOM, LEFT, RIGHT, INK);
    canvas.vline(LEFT, TOP, BOTTOM, INK);

    // Labels: y gain stops, x frequency stops, cutoff readout.
    draw_text(&mut canvas, LEFT - 26, to_y(1.0) as usize - 5, "1.0", INK);
    draw_text(&mut canvas, LEFT - 26, to_y(0.5) as usize - 5, "0.5", INK);
    draw_text(&mut canvas, LEFT - 26, BOTTOM - 5, "0.0", INK);
    draw_text(&mut canvas, LEFT - 4, BOTTOM + 10, "0", INK);
    for tick in [0.1, 0.2, 0.3, 0.4, 0.5] {
        if tick <= max_freq + 1e-9 {
            draw_text(
                &mut canvas,
                to_x(tick) as usize - 10,
                BOTTOM + 10,
                &format!("{tick:.1}"),
                INK,
            );
        }
    }
    draw_text(
        &mut canvas,
        (cx + 6).min(RIGHT - 60),
        TOP + 6,
        &format!("{:.4}", est.cutoff_cyc_per_sample),
        CUTOFF,
    );

    Image::from_clamped(W, H, 3, canvas.data).expect("plot canvas is always well-formed")
}

pub fn save_profile_plot(est: &TransferEstimate, path: &Path) -> Result<(), degrade_core::Error> {
    save_image(path, &render_profile_plot(est))
}
