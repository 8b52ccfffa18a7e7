//! Deterministic synthetic test images, values in `[0, 1]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::image::{ColorImage, Image};

/// Smoothly interpolated lattice noise summed over octaves, roughly in `[0, 1]`.
pub fn value_noise(width: usize, height: usize, cell: f64, octaves: u32, seed: u64) -> Image {
    let mut out = Image::zeros(width, height);
    let mut amp = 1.0;
    let mut total = 0.0;
    let mut c = cell;
    for o in 0..octaves {
        let gw = (width as f64 / c).ceil() as usize + 2;
        let gh = (height as f64 / c).ceil() as usize + 2;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(o as u64);
        let lattice: Vec<f64> = (0..gw * gh).map(|_| rng.random::<f64>()).collect();
        let smooth = |t: f64| t * t * (3.0 - 2.0 * t);
        for y in 0..height {
            for x in 0..width {
                let fx = x as f64 / c;
                let fy = y as f64 / c;
                let (ix, iy) = (fx.floor() as usize, fy.floor() as usize);
                let (tx, ty) = (smooth(fx - ix as f64), smooth(fy - iy as f64));
                let l = |i: usize, j: usize| lattice[j * gw + i];
                let top = l(ix, iy) * (1.0 - tx) + l(ix + 1, iy) * tx;
                let bot = l(ix, iy + 1) * (1.0 - tx) + l(ix + 1, iy + 1) * tx;
                let v = top * (1.0 - ty) + bot * ty;
                let i = y * width + x;
                out.data_mut()[i] += amp * v;
            }
        }
        total += amp;
        amp *= 0.5;
        c = (c / 2.0).max(1.0);
    }
    out.scale(1.0 / total)
}

fn ellipse(x: f64, y: f64, cx: f64, cy: f64, rx: f64, ry: f64, angle: f64) -> f64 {
    let (s, c) = angle.sin_cos();
    let dx = x - cx;
    let dy = y - cy;
    let u = (dx * c + dy * s) / rx;
    let v = (-dx * s + dy * c) / ry;
    u * u + v * v
}

/// Soft step: 1 inside (`d < 1`), 0 outside, blurred over `edge` in `d`.
fn inside(d: f64, edge: f64) -> f64 {
    (0.5 - (d - 1.0) / edge).clamp(0.0, 1.0)
}

/// Shaded overlapping fruit-like blobs on a textured backdrop.
pub fn peppers(n: usize) -> Image {
    let s = n as f64;
    let texture = value_noise(n, n, s / 6.0, 4, 101);
    let blobs = [
        (0.30, 0.35, 0.22, 0.17, 0.4, 0.85),
        (0.68, 0.30, 0.20, 0.24, -0.3, 0.55),
        (0.45, 0.70, 0.28, 0.18, 0.1, 0.7),
        (0.82, 0.75, 0.13, 0.16, 0.8, 0.35),
        (0.12, 0.78, 0.10, 0.14, 0.0, 0.95),
    ];
    Image::from_fn(n, n, |x, y| {
        let (px, py) = (x as f64 / s, y as f64 / s);
        let mut v = 0.18 + 0.15 * texture.get(x, y);
        for &(cx, cy, rx, ry, ang, level) in &blobs {
            let d = ellipse(px, py, cx, cy, rx, ry, ang);
            let shade = level * (1.0 - 0.45 * d) + 0.25 * (1.0 - d).max(0.0).powi(6);
            let w = inside(d, 0.15);
            v = v * (1.0 - w) + shade * w;
        }
        v.clamp(0.0, 1.0)
    })
}

/// Rolling terrain under a graded sky.
pub fn landscape(n: usize) -> Image {
    let s = n as f64;
    let texture = value_noise(n, n, s / 10.0, 5, 202);
    Image::from_fn(n, n, |x, y| {
        let (px, py) = (x as f64 / s, y as f64 / s);
        let ridge = 0.45 + 0.08 * (px * 9.0).sin() + 0.05 * (px * 23.0 + 1.0).sin();
        let hill = 0.7 + 0.06 * (px * 5.0 + 2.0).cos();
        if py < ridge {
            0.85 - 0.4 * py + 0.05 * texture.get(x, y)
        } else if py < hill {
            0.35 + 0.3 * texture.get(x, y)
        } else {
            0.15 + 0.5 * texture.get(x, y) * (1.0 - (py - hill))
        }
    })
}

/// Smooth elliptical phantom.
pub fn phantom(n: usize) -> Image {
    let s = n as f64;
    let parts = [
        (0.5, 0.5, 0.42, 0.46, 0.0, 0.6),
        (0.5, 0.52, 0.36, 0.40, 0.0, -0.3),
        (0.38, 0.45, 0.08, 0.16, 0.3, 0.35),
        (0.62, 0.45, 0.10, 0.18, -0.3, 0.25),
        (0.5, 0.72, 0.06, 0.05, 0.0, 0.3),
    ];
    Image::from_fn(n, n, |x, y| {
        let (px, py) = (x as f64 / s, y as f64 / s);
        let mut v = 0.05;
        for &(cx, cy, rx, ry, ang, level) in &parts {
            v += level * inside(ellipse(px, py, cx, cy, rx, ry, ang), 0.3);
        }
        v.clamp(0.0, 1.0)
    })
}

/// Bar groups of decreasing period plus a radial star.
pub fn resolution_chart(n: usize) -> Image {
    let s = n as f64;
    Image::from_fn(n, n, |x, y| {
        let (px, py) = (x as f64 / s, y as f64 / s);
        if py < 0.5 {
            let group = (px * 4.0).floor();
            let period = (s / 8.0 / 2f64.powf(group)).max(2.0);
            if ((x as f64 / (period / 2.0)).floor() as i64) % 2 == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            let (dx, dy) = (px - 0.5, py - 0.75);
            let r = (dx * dx + dy * dy).sqrt();
            if r > 0.23 {
                0.5
            } else if (dy.atan2(dx) * 8.0 / std::f64::consts::PI).floor() as i64 % 2 == 0 {
                1.0
            } else {
                0.0
            }
        }
    })
}

/// Binary three-glyph logo (block letters B, N, U).
pub fn text_logo(n: usize) -> Image {
    let stroke = (n / 20).max(1);
    let glyph_w = n / 5;
    let glyph_h = n / 3;
    let y0 = n / 3;
    let mut img = Image::zeros(n, n);
    let mut fill = |x0: usize, y0: usize, w: usize, h: usize| {
        for y in y0..(y0 + h).min(n) {
            for x in x0..(x0 + w).min(n) {
                img.set(x, y, 1.0);
            }
        }
    };
    // B
    let x0 = n / 10;
    fill(x0, y0, stroke, glyph_h);
    fill(x0, y0, glyph_w - stroke, stroke);
    fill(x0, y0 + glyph_h / 2, glyph_w - stroke, stroke);
    fill(x0, y0 + glyph_h - stroke, glyph_w - stroke, stroke);
    fill(x0 + glyph_w - stroke, y0 + stroke, stroke, glyph_h / 2 - stroke);
    fill(x0 + glyph_w - stroke, y0 + glyph_h / 2 + stroke, stroke, glyph_h / 2 - 2 * stroke);
    // N
    let x0 = 4 * n / 10;
    fill(x0, y0, stroke, glyph_h);
    fill(x0 + glyph_w - stroke, y0, stroke, glyph_h);
    for k in 0..glyph_h {
        let x = x0 + k * (glyph_w - stroke) / glyph_h;
        fill(x, y0 + k, stroke, 1);
    }
    // U
    let x0 = 7 * n / 10;
    fill(x0, y0, stroke, glyph_h);
    fill(x0 + glyph_w - stroke, y0, stroke, glyph_h);
    fill(x0, y0 + glyph_h - stroke, glyph_w, stroke);
    img
}

/// Per-pixel uniform grain in `[0, 1)`.
pub fn grain(width: usize, height: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Image::from_fn(width, height, |_, _| rng.random::<f64>())
}

/// Furry animal (head, ears, body) in grass. Fur and grass are short streaks
/// of pixel-scale grain.
pub fn animal(n: usize) -> Image {
    let s = n as f64;
    let g = grain(n + 4, n + 4, 303);
    let streak = |x: usize, y: usize, dx: isize| {
        let mut acc = 0.0;
        for k in 0..3isize {
            let gx = (x as isize + 2 + k * dx) as usize;
            let gy = (y as isize + 2 + k) as usize;
            acc += g.get(gx, gy);
        }
        acc / 3.0
    };
    let bg = value_noise(n, n, s / 5.0, 3, 304);
    Image::from_fn(n, n, |x, y| {
        let (px, py) = (x as f64 / s, y as f64 / s);
        let head = ellipse(px, py, 0.42, 0.38, 0.17, 0.15, 0.0);
        let body = ellipse(px, py, 0.58, 0.70, 0.30, 0.19, -0.2);
        let ear_l = ellipse(px, py, 0.32, 0.22, 0.05, 0.09, -0.4);
        let ear_r = ellipse(px, py, 0.52, 0.22, 0.05, 0.09, 0.4);
        let eye_l = ellipse(px, py, 0.37, 0.36, 0.025, 0.02, 0.0);
        let eye_r = ellipse(px, py, 0.47, 0.36, 0.025, 0.02, 0.0);
        let m = inside(head, 0.2).max(inside(body, 0.2)).max(inside(ear_l, 0.3)).max(inside(ear_r, 0.3));
        let eyes = inside(eye_l, 0.5).max(inside(eye_r, 0.5));
        let coat = (0.45 + FUR * (streak(x, y, 1) - 0.5)) * (1.0 - 0.8 * eyes);
        let back = 0.3 + 0.2 * bg.get(x, y) + FUR * (streak(x, y, 0) - 0.5);
        let v = m * coat + (1.0 - m) * back;
        v.clamp(0.0, 1.0)
    })
}

const FUR: f64 = 0.5;

/// Color host built from three differently weighted grayscale scenes.
pub fn color_scene(n: usize) -> ColorImage {
    let p = peppers(n);
    let l = landscape(n);
    let r = p.combine(0.8, &l, 0.2).expect("same size");
    let g = p.combine(0.3, &l, 0.6).expect("same size");
    let b = phantom(n).combine(0.5, &l, 0.4).expect("same size");
    ColorImage::new(r, g, b).expect("same size")
}

/// Color watermark: logo in red, animal in green, their blend in blue.
pub fn color_watermark(n: usize) -> ColorImage {
    let t = text_logo(n);
    let a = animal(n);
    let b = t.combine(0.5, &a, 0.5).expect("same size");
    ColorImage::new(t, a, b).expect("same size")
}

/// Named lookup for the CLI.
pub fn by_name(name: &str, n: usize) -> Option<Image> {
    Some(match name {
        "peppers" => peppers(n),
        "landscape" => landscape(n),
        "phantom" => phantom(n),
        "chart" => resolution_chart(n),
        "logo" => text_logo(n),
        "animal" => animal(n),
        _ => return None,
    })
}

pub const NAMES: [&str; 6] = ["peppers", "landscape", "phantom", "chart", "logo", "animal"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assets_are_deterministic_and_in_range() {
        for name in NAMES {
            let a = by_name(name, 37).unwrap();
            assert_eq!(a, by_name(name, 37).unwrap(), "{name}");
            assert!(a.min() >= 0.0 && a.max() <= 1.0, "{name}");
            assert!(a.max() - a.min() > 0.3, "{name} has too little contrast");
        }
        assert!(by_name("nope", 8).is_none());
    }

    #[test]
    fn logo_is_binary() {
        let l = text_logo(64);
        assert!(l.data().iter().all(|&v| v == 0.0 || v == 1.0));
        let on = l.data().iter().filter(|&&v| v == 1.0).count();
        assert!(on > 64 * 64 / 40 && on < 64 * 64 / 4);
    }

    #[test]
    fn value_noise_bounded() {
        let v = value_noise(20, 30, 5.0, 3, 9);
        assert!(v.min() >= 0.0 && v.max() <= 1.0);
        assert_ne!(v, value_noise(20, 30, 5.0, 3, 10));
    }
}
