//! Baseline integer-factor downscalers and the guide image construction.
//!
//! The cubic and Lanczos resamplers stretch their kernels by the factor `d`
//! (antialiased downscaling) and renormalize the taps of every output pixel,
//! so a constant plane maps to the same constant exactly. Out-of-range taps
//! use replicate padding.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{clamp_index, ImagePlane};

/// Parameters of the box + Gaussian guide image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuideParams {
    pub factor: usize,
    /// Gaussian standard deviation in output pixels. Zero disables smoothing.
    pub sigma: f64,
}

impl GuideParams {
    pub fn new(factor: usize, sigma: f64) -> Result<Self> {
        check_factor(factor)?;
        check_sigma(sigma)?;
        Ok(Self { factor, sigma })
    }
}

pub(crate) fn check_factor(factor: usize) -> Result<()> {
    if factor < 2 {
        return Err(Error::InvalidParameter(format!(
            "downscale factor must be at least 2, got {factor}"
        )));
    }
    Ok(())
}

pub(crate) fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sigma must be finite and non-negative, got {sigma}"
        )));
    }
    Ok(())
}

/// Validates the factor and returns the output `(width, height)`.
pub fn output_dims(plane: &ImagePlane, factor: usize) -> Result<(usize, usize)> {
    check_factor(factor)?;
    let (w, h) = (plane.width(), plane.height());
    if w % factor != 0 || h % factor != 0 {
        return Err(Error::NotDivisible {
            width: w,
            height: h,
            factor,
        });
    }
    Ok((w / factor, h / factor))
}

/// Mean of every `factor`x`factor` patch.
pub fn box_downscale(plane: &ImagePlane, factor: usize) -> Result<ImagePlane> {
    let (ow, oh) = output_dims(plane, factor)?;
    let area = (factor * factor) as f64;
    let mut out = vec![0.0; ow * oh];
    out.par_chunks_mut(ow).enumerate().for_each(|(r, out_row)| {
        for (c, o) in out_row.iter_mut().enumerate() {
            let anchor = plane.get(r * factor, c * factor);
            let mut sum = 0.0;
            for y in r * factor..(r + 1) * factor {
                for &v in &plane.row(y)[c * factor..(c + 1) * factor] {
                    sum += v - anchor;
                }
            }
            *o = anchor + sum / area;
        }
    });
    Ok(ImagePlane::from_parts(ow, oh, out))
}

/// Top-left pixel of every patch.
pub fn subsample_downscale(plane: &ImagePlane, factor: usize) -> Result<ImagePlane> {
    let (ow, oh) = output_dims(plane, factor)?;
    let mut out = Vec::with_capacity(ow * oh);
    for r in 0..oh {
        let row = plane.row(r * factor);
        out.extend((0..ow).map(|c| row[c * factor]));
    }
    Ok(ImagePlane::from_parts(ow, oh, out))
}

/// Catmull-Rom cubic (a = -0.5).
pub fn cubic_kernel(x: f64) -> f64 {
    const A: f64 = -0.5;
    let x = x.abs();
    if x <= 1.0 {
        ((A + 2.0) * x - (A + 3.0)) * x * x + 1.0
    } else if x < 2.0 {
        ((A * x - 5.0 * A) * x + 8.0 * A) * x - 4.0 * A
    } else {
        0.0
    }
}

/// Lanczos window with three lobes.
pub fn lanczos3_kernel(x: f64) -> f64 {
    fn sinc(x: f64) -> f64 {
        if x == 0.0 {
            1.0
        } else {
            let px = std::f64::consts::PI * x;
            px.sin() / px
        }
    }
    if x.abs() < 3.0 {
        sinc(x) * sinc(x / 3.0)
    } else {
        0.0
    }
}

/// Resampling taps for one output sample.
#[derive(Debug, Clone)]
struct Taps {
    indices: Vec<usize>,
    weights: Vec<f64>,
}

impl Taps {
    /// Weighted sum of `sample` over the taps. Accumulated relative to the
    /// first tap's sample so that equal samples reproduce that value exactly.
    #[inline]
    fn apply(&self, sample: impl Fn(usize) -> f64) -> f64 {
        let anchor = sample(self.indices[0]);
        anchor
            + self
                .indices
                .iter()
                .zip(&self.weights)
                .fold(0.0, |acc, (&i, &wt)| acc + wt * (sample(i) - anchor))
    }
}

/// Normalized taps for every output index along one axis. Output sample `o`
/// sits at input coordinate `(o + 0.5) * factor - 0.5`.
fn axis_taps(in_len: usize, factor: usize, support: f64, kernel: fn(f64) -> f64) -> Vec<Taps> {
    let out_len = in_len / factor;
    let scale = factor as f64;
    let radius = support * scale;
    (0..out_len)
        .map(|o| {
            let center = (o as f64 + 0.5) * scale - 0.5;
            let first = (center - radius).ceil() as isize;
            let last = (center + radius).floor() as isize;
            let mut indices = Vec::new();
            let mut weights = Vec::new();
            for i in first..=last {
                let w = kernel((i as f64 - center) / scale);
                if w != 0.0 {
                    indices.push(clamp_index(i, in_len));
                    weights.push(w);
                }
            }
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
            Taps { indices, weights }
        })
        .collect()
}

/// Separable convolution with per-output taps: rows first, then columns.
fn separable_resample(plane: &ImagePlane, col_taps: &[Taps], row_taps: &[Taps]) -> ImagePlane {
    let h = plane.height();
    let ow = col_taps.len();
    let oh = row_taps.len();
    let mut horizontal = vec![0.0; ow * h];
    horizontal
        .par_chunks_mut(ow)
        .enumerate()
        .for_each(|(y, out_row)| {
            let src = plane.row(y);
            for (o, taps) in out_row.iter_mut().zip(col_taps) {
                *o = taps.apply(|i| src[i]);
            }
        });
    let mut out = vec![0.0; ow * oh];
    out.par_chunks_mut(ow).zip(row_taps).for_each(|(out_row, taps)| {
        for (x, o) in out_row.iter_mut().enumerate() {
            *o = taps.apply(|i| horizontal[i * ow + x]);
        }
    });
    ImagePlane::from_parts(ow, oh, out)
}

fn kernel_downscale(
    plane: &ImagePlane,
    factor: usize,
    support: f64,
    kernel: fn(f64) -> f64,
) -> Result<ImagePlane> {
    output_dims(plane, factor)?;
    let col_taps = axis_taps(plane.width(), factor, support, kernel);
    let row_taps = axis_taps(plane.height(), factor, support, kernel);
    Ok(separable_resample(plane, &col_taps, &row_taps))
}

/// Antialiased Catmull-Rom downscale.
pub fn bicubic_downscale(plane: &ImagePlane, factor: usize) -> Result<ImagePlane> {
    kernel_downscale(plane, factor, 2.0, cubic_kernel)
}

/// Antialiased Lanczos-3 downscale.
pub fn lanczos_downscale(plane: &ImagePlane, factor: usize) -> Result<ImagePlane> {
    kernel_downscale(plane, factor, 3.0, lanczos3_kernel)
}

/// Normalized 1-D Gaussian taps over `[-ceil(3 sigma), ceil(3 sigma)]`.
pub fn gaussian_weights(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let mut weights: Vec<f64> = (-radius..=radius)
        .map(|x| (-((x * x) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    weights
}

/// Same-size separable Gaussian blur with replicate padding. `sigma == 0`
/// returns the input unchanged.
pub fn gaussian_convolve(plane: &ImagePlane, sigma: f64) -> Result<ImagePlane> {
    check_sigma(sigma)?;
    if sigma == 0.0 {
        return Ok(plane.clone());
    }
    let weights = gaussian_weights(sigma);
    let radius = (weights.len() / 2) as isize;
    let (w, h) = (plane.width(), plane.height());
    let taps = |len: usize| -> Vec<Taps> {
        (0..len as isize)
            .map(|o| Taps {
                indices: (o - radius..=o + radius).map(|i| clamp_index(i, len)).collect(),
                weights: weights.clone(),
            })
            .collect()
    };
    Ok(separable_resample(plane, &taps(w), &taps(h)))
}

/// Box downscale followed by Gaussian smoothing at the output resolution.
pub fn build_guide(plane: &ImagePlane, params: GuideParams) -> Result<ImagePlane> {
    check_sigma(params.sigma)?;
    let boxed = box_downscale(plane, params.factor)?;
    gaussian_convolve(&boxed, params.sigma)
}
