//! Brute-force reference implementations. These follow the defining sums
//! directly and share no code path with the library beyond `round_level` and
//! the plane accessors.

#![allow(dead_code)]

use coocscale::{round_level, ImagePlane};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn random_plane(width: usize, height: usize, rng: &mut impl Rng) -> ImagePlane {
    ImagePlane::from_fn(width, height, |_, _| rng.gen_range(0..=255u8) as f64).unwrap()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Level-pair counts from the double sum over all pixel pairs `(i, j)` with
/// `j` inside the radius-`k` square around `i`, both inside the image.
pub fn cooc_quadruple_loop(f: &ImagePlane, k: usize) -> Vec<u64> {
    let mut counts = vec![0u64; 256 * 256];
    let (w, h) = (f.width(), f.height());
    for ri in 0..h {
        for ci in 0..w {
            let a = round_level(f.get(ri, ci)) as usize;
            for rj in 0..h {
                for cj in 0..w {
                    if ri.abs_diff(rj) <= k && ci.abs_diff(cj) <= k {
                        let b = round_level(f.get(rj, cj)) as usize;
                        counts[a * 256 + b] += 1;
                    }
                }
            }
        }
    }
    counts
}

/// Box mean followed by a direct 2-D Gaussian with replicate padding.
pub fn guide_oracle(f: &ImagePlane, d: usize, sigma: f64) -> ImagePlane {
    let (ow, oh) = (f.width() / d, f.height() / d);
    let boxed = ImagePlane::from_fn(ow, oh, |r, c| {
        let mut s = 0.0;
        for y in 0..d {
            for x in 0..d {
                s += f.get(r * d + y, c * d + x);
            }
        }
        s / (d * d) as f64
    })
    .unwrap();
    if sigma == 0.0 {
        return boxed;
    }
    gaussian_2d_oracle(&boxed, sigma)
}

pub fn gaussian_2d_oracle(p: &ImagePlane, sigma: f64) -> ImagePlane {
    let radius = (3.0 * sigma).ceil() as isize;
    let g = |x: isize| (-((x * x) as f64) / (2.0 * sigma * sigma)).exp();
    ImagePlane::from_fn(p.width(), p.height(), |r, c| {
        let (mut num, mut den) = (0.0, 0.0);
        for dy in -radius..=radius {
            for dx in -radius..=radius {
                let w = g(dy) * g(dx);
                num += w * p.clamped_get(r as isize + dy, c as isize + dx);
                den += w;
            }
        }
        num / den
    })
    .unwrap()
}

/// Weighted aggregation evaluated pixel by pixel: for each output pixel,
/// sum over every input pixel in the `[-d, d]^2` window around the patch
/// anchor `(r d + d/2, c d + d/2)`. Returns `None` for zero total weight.
pub fn filter_oracle(f: &ImagePlane, guide: &ImagePlane, counts: &[u64], d: usize) -> Vec<Option<f64>> {
    let mut out = Vec::new();
    for r in 0..guide.height() {
        for c in 0..guide.width() {
            let a = round_level(guide.get(r, c)) as usize;
            let (cr, cc) = (r * d + d / 2, c * d + d / 2);
            let (mut p, mut q) = (0.0, 0.0);
            for y in 0..f.height() {
                for x in 0..f.width() {
                    if y.abs_diff(cr) <= d && x.abs_diff(cc) <= d {
                        let v = f.get(y, x);
                        let w = counts[a * 256 + round_level(v) as usize] as f64;
                        p += w * v;
                        q += w;
                    }
                }
            }
            out.push(if q > 0.0 { Some(p / q) } else { None });
        }
    }
    out
}

/// Min and max of the input window used for output pixel `(r, c)`.
pub fn window_bounds(f: &ImagePlane, r: usize, c: usize, d: usize) -> (f64, f64) {
    let (cr, cc) = (r * d + d / 2, c * d + d / 2);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for y in 0..f.height() {
        for x in 0..f.width() {
            if y.abs_diff(cr) <= d && x.abs_diff(cc) <= d {
                lo = lo.min(f.get(y, x));
                hi = hi.max(f.get(y, x));
            }
        }
    }
    (lo, hi)
}

pub fn cubic(x: f64) -> f64 {
    let x = x.abs();
    let a = -0.5;
    if x <= 1.0 {
        (a + 2.0) * x.powi(3) - (a + 3.0) * x.powi(2) + 1.0
    } else if x < 2.0 {
        a * x.powi(3) - 5.0 * a * x.powi(2) + 8.0 * a * x - 4.0 * a
    } else {
        0.0
    }
}

pub fn lanczos3(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    if x.abs() >= 3.0 {
        return 0.0;
    }
    let px = std::f64::consts::PI * x;
    3.0 * px.sin() * (px / 3.0).sin() / (px * px)
}

/// Direct 2-D evaluation of a kernel downscale with kernel stretched by `d`,
/// replicate padding, and weights normalized per output pixel.
pub fn kernel_downscale_2d(f: &ImagePlane, d: usize, support: f64, kernel: fn(f64) -> f64) -> ImagePlane {
    let s = d as f64;
    ImagePlane::from_fn(f.width() / d, f.height() / d, |r, c| {
        let cy = (r as f64 + 0.5) * s - 0.5;
        let cx = (c as f64 + 0.5) * s - 0.5;
        let reach = (support * s).ceil() as isize + 1;
        let (mut num, mut den) = (0.0, 0.0);
        for y in cy as isize - reach..=cy as isize + reach {
            for x in cx as isize - reach..=cx as isize + reach {
                let w = kernel((y as f64 - cy) / s) * kernel((x as f64 - cx) / s);
                num += w * f.clamped_get(y, x);
                den += w;
            }
        }
        num / den
    })
    .unwrap()
}
