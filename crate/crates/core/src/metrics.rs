//! Quality measures and synthetic test signals.

use crate::error::{Error, Result};
use crate::image::ImagePlane;

/// Mean squared difference of two equally sized planes.
pub fn mean_squared_error(a: &ImagePlane, b: &ImagePlane) -> Result<f64> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", a.width(), a.height()),
            actual: format!("{}x{}", b.width(), b.height()),
        });
    }
    let sse: f64 = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sse / a.len() as f64)
}

/// PSNR in dB for a given MSE with 8-bit peak 255; zero error gives
/// `f64::INFINITY`.
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (255.0 * 255.0 / mse).log10()
    }
}

/// Peak signal-to-noise ratio in dB for 8-bit peak 255. Identical planes
/// give `f64::INFINITY`.
pub fn psnr(a: &ImagePlane, b: &ImagePlane) -> Result<f64> {
    mean_squared_error(a, b).map(psnr_from_mse)
}

/// Mean squared forward difference: the sum of squared horizontal and
/// vertical neighbour differences divided by the pixel count.
pub fn gradient_energy(plane: &ImagePlane) -> Result<f64> {
    let (w, h) = (plane.width(), plane.height());
    if w < 2 && h < 2 {
        return Err(Error::InvalidImage("gradient energy needs at least two pixels".into()));
    }
    let mut sum = 0.0;
    for r in 0..h {
        let row = plane.row(r);
        for pair in row.windows(2) {
            sum += (pair[1] - pair[0]).powi(2);
        }
        if r + 1 < h {
            for (x, y) in row.iter().zip(plane.row(r + 1)) {
                sum += (y - x).powi(2);
            }
        }
    }
    Ok(sum / plane.len() as f64)
}

/// `127.5 (1 + cos(rate r^2))`, with `r` measured from
/// `((height - 1) / 2, (width - 1) / 2)`.
pub fn radial_chirp(width: usize, height: usize, rate: f64) -> Result<ImagePlane> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::InvalidParameter(format!("chirp rate must be positive, got {rate}")));
    }
    let cy = (height as f64 - 1.0) / 2.0;
    let cx = (width as f64 - 1.0) / 2.0;
    ImagePlane::from_fn(width, height, |r, c| {
        let dy = r as f64 - cy;
        let dx = c as f64 - cx;
        127.5 * (1.0 + (rate * (dx * dx + dy * dy)).cos())
    })
}

/// Chirp rate whose local frequency reaches `peak` cycles per pixel at the
/// pixel farthest from the centre of a `width`x`height` chirp.
///
/// The local frequency of `cos(rate r^2)` at radius `r` is `rate r / pi`.
pub fn chirp_rate_for_peak(width: usize, height: usize, peak: f64) -> f64 {
    let half_w = (width as f64 - 1.0) / 2.0;
    let half_h = (height as f64 - 1.0) / 2.0;
    let r_max = half_w.hypot(half_h).max(1.0);
    std::f64::consts::PI * peak / r_max
}
