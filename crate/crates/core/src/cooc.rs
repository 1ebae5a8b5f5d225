//! Co-occurrence guided downscaling.
//!
//! Learning counts, for every pixel `i` and every pixel `j` in the square
//! window of radius `k` around it, the ordered level pair
//! `(level(i), level(j))` into a 256x256 table. Filtering then produces each
//! output pixel as the average of the input pixels in a `[-d, d]^2` window,
//! weighted by the table row of the rounded guide level.
//!
//! Windows are truncated at the image border: only pixels inside the image
//! take part, and no pixel is counted twice.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{round_level, ImagePlane, RasterImage};
use crate::resample::{build_guide, check_factor, check_sigma, output_dims, GuideParams};

pub const LEVELS: usize = 256;

/// Which level indexes the first axis of the co-occurrence table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoocMode {
    /// Both levels come from the input image.
    #[default]
    InputPairs,
    /// The first level is the rounded guide value of the output cell that
    /// contains the input pixel.
    GuideIndexed,
}

impl CoocMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CoocMode::InputPairs => "input-pairs",
            CoocMode::GuideIndexed => "guide-indexed",
        }
    }
}

impl fmt::Display for CoocMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CoocMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "input-pairs" => Ok(CoocMode::InputPairs),
            "guide-indexed" => Ok(CoocMode::GuideIndexed),
            other => Err(Error::InvalidParameter(format!("unknown co-occurrence mode '{other}'"))),
        }
    }
}

/// Output rule for windows whose total weight is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fallback {
    /// Use the guide value of the output pixel.
    #[default]
    GuideValue,
    /// Use the unweighted mean of the window.
    UniformMean,
}

impl Fallback {
    pub fn as_str(self) -> &'static str {
        match self {
            Fallback::GuideValue => "guide-value",
            Fallback::UniformMean => "uniform-mean",
        }
    }
}

impl fmt::Display for Fallback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Fallback {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "guide-value" => Ok(Fallback::GuideValue),
            "uniform-mean" => Ok(Fallback::UniformMean),
            other => Err(Error::InvalidParameter(format!("unknown fallback policy '{other}'"))),
        }
    }
}

/// 256x256 table of level-pair counts.
#[derive(Clone, PartialEq, Eq)]
pub struct CoocMatrix {
    counts: Vec<u64>,
    radius: usize,
    mode: CoocMode,
}

impl fmt::Debug for CoocMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoocMatrix")
            .field("radius", &self.radius)
            .field("mode", &self.mode)
            .field("total", &self.total())
            .finish()
    }
}

impl CoocMatrix {
    /// Wraps a row-major table of `256 * 256` counts.
    pub fn from_counts(counts: Vec<u64>, radius: usize, mode: CoocMode) -> Result<Self> {
        if counts.len() != LEVELS * LEVELS {
            return Err(Error::InvalidParameter(format!(
                "co-occurrence table needs {} entries, got {}",
                LEVELS * LEVELS,
                counts.len()
            )));
        }
        Ok(Self {
            counts,
            radius,
            mode,
        })
    }

    #[inline]
    pub fn get(&self, a: u8, b: u8) -> u64 {
        self.counts[a as usize * LEVELS + b as usize]
    }

    /// Row `a` of the table, indexed by the second level.
    #[inline]
    pub fn row(&self, a: u8) -> &[u64] {
        let start = a as usize * LEVELS;
        &self.counts[start..start + LEVELS]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn mode(&self) -> CoocMode {
        self.mode
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn max_count(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// Every count multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Result<Self> {
        let counts = self
            .counts
            .iter()
            .map(|&c| c.checked_mul(factor))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidParameter(format!("scaling by {factor} overflows")))?;
        Ok(Self { counts, ..*self })
    }
}

/// Inclusive-exclusive range of indices within `radius` of `center`,
/// truncated to `[0, len)`.
#[inline]
fn window(center: usize, radius: usize, len: usize) -> Range<usize> {
    center.saturating_sub(radius)..(center + radius + 1).min(len)
}

/// Number of pairs counted in input-pairs mode:
/// the sum over all pixels of their truncated window size.
pub fn expected_total(width: usize, height: usize, radius: usize) -> u64 {
    let axis = |len: usize| -> u64 { (0..len).map(|i| window(i, radius, len).len() as u64).sum() };
    axis(width) * axis(height)
}

/// Learns the co-occurrence table of `plane` over windows of radius `radius`.
///
/// `guide` is required in [`CoocMode::GuideIndexed`] mode and must have
/// dimensions `(width / d, height / d)` for some factor `d >= 1`.
pub fn learn_cooccurrence(
    plane: &ImagePlane,
    radius: usize,
    mode: CoocMode,
    guide: Option<&ImagePlane>,
) -> Result<CoocMatrix> {
    if radius < 1 {
        return Err(Error::InvalidParameter("co-occurrence radius must be at least 1".into()));
    }
    let (w, h) = (plane.width(), plane.height());
    let levels = plane.levels();

    // first-axis level for each input pixel
    let anchors: Vec<u8> = match mode {
        CoocMode::InputPairs => levels.clone(),
        CoocMode::GuideIndexed => {
            let guide = guide.ok_or_else(|| {
                Error::InvalidParameter("guide-indexed co-occurrence needs a guide image".into())
            })?;
            let factor = guide_factor(plane, guide)?;
            let guide_levels = guide.levels();
            let gw = guide.width();
            (0..h)
                .flat_map(|r| (0..w).map(move |c| (r, c)))
                .map(|(r, c)| guide_levels[(r / factor) * gw + c / factor])
                .collect()
        }
    };

    // Row-parallel reduction into private tables; integer addition makes the
    // result independent of how rows are partitioned.
    let counts = (0..h)
        .into_par_iter()
        .fold(
            || vec![0u64; LEVELS * LEVELS],
            |mut table, r| {
                let rows = window(r, radius, h);
                for c in 0..w {
                    let base = anchors[r * w + c] as usize * LEVELS;
                    let cols = window(c, radius, w);
                    for y in rows.clone() {
                        for &b in &levels[y * w + cols.start..y * w + cols.end] {
                            table[base + b as usize] += 1;
                        }
                    }
                }
                table
            },
        )
        .reduce(
            || vec![0u64; LEVELS * LEVELS],
            |mut acc, table| {
                acc.iter_mut().zip(&table).for_each(|(a, t)| *a += t);
                acc
            },
        );

    CoocMatrix::from_counts(counts, radius, mode)
}

/// Recovers the integer factor relating `plane` and its guide.
fn guide_factor(plane: &ImagePlane, guide: &ImagePlane) -> Result<usize> {
    let mismatch = || Error::DimensionMismatch {
        expected: format!("guide of size ({}/d)x({}/d)", plane.width(), plane.height()),
        actual: format!("{}x{}", guide.width(), guide.height()),
    };
    if !plane.height().is_multiple_of(guide.height()) {
        return Err(mismatch());
    }
    let factor = plane.height() / guide.height();
    if plane.width() != guide.width() * factor {
        return Err(mismatch());
    }
    Ok(factor)
}

/// Co-occurrence weighted aggregation of `plane` onto the guide grid.
///
/// Output pixel `(r, c)` averages the input pixels in the truncated window of
/// radius `factor` centred on `(r * factor + factor / 2, c * factor + factor / 2)`,
/// each weighted by `cooc(level(guide(r, c)), level(pixel))`. Summation runs in
/// row-major window order.
pub fn cooc_filter(
    plane: &ImagePlane,
    guide: &ImagePlane,
    cooc: &CoocMatrix,
    factor: usize,
    fallback: Fallback,
) -> Result<ImagePlane> {
    let (ow, oh) = output_dims(plane, factor)?;
    if guide.width() != ow || guide.height() != oh {
        return Err(Error::DimensionMismatch {
            expected: format!("{ow}x{oh} guide"),
            actual: format!("{}x{}", guide.width(), guide.height()),
        });
    }
    let (w, h) = (plane.width(), plane.height());
    let values = plane.values();
    let levels = plane.levels();

    let mut out = vec![0.0; ow * oh];
    out.par_chunks_mut(ow).enumerate().for_each(|(r, out_row)| {
        let rows = window(r * factor + factor / 2, factor, h);
        for (c, o) in out_row.iter_mut().enumerate() {
            let cols = window(c * factor + factor / 2, factor, w);
            let guide_value = guide.get(r, c);
            let weights = cooc.row(round_level(guide_value));
            let anchor = values[rows.start * w + cols.start];
            // weighted sum relative to an anchor sample keeps constant windows exact
            let mut numerator = 0.0;
            let mut total: u64 = 0;
            let mut plain = 0.0;
            for y in rows.clone() {
                let span = y * w + cols.start..y * w + cols.end;
                for (&v, &b) in values[span.clone()].iter().zip(&levels[span]) {
                    let wt = weights[b as usize];
                    numerator += wt as f64 * (v - anchor);
                    total += wt;
                    plain += v - anchor;
                }
            }
            *o = if total > 0 {
                anchor + numerator / total as f64
            } else {
                match fallback {
                    Fallback::GuideValue => guide_value,
                    Fallback::UniformMean => anchor + plain / (rows.len() * cols.len()) as f64,
                }
            };
        }
    });
    Ok(ImagePlane::from_parts(ow, oh, out))
}

/// Parameters of the co-occurrence downscaler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DownscaleParams {
    pub factor: usize,
    /// Co-occurrence window radius, at least `factor`.
    pub radius: usize,
    pub sigma: f64,
    pub mode: CoocMode,
    pub fallback: Fallback,
}

impl DownscaleParams {
    pub const DEFAULT_SIGMA: f64 = 0.5;

    /// Defaults: radius equal to the factor, sigma 0.5, input-pairs
    /// learning, guide-value fallback.
    pub fn new(factor: usize) -> Self {
        Self {
            factor,
            radius: factor,
            sigma: Self::DEFAULT_SIGMA,
            mode: CoocMode::InputPairs,
            fallback: Fallback::GuideValue,
        }
    }

    pub fn with_radius(mut self, radius: usize) -> Self {
        self.radius = radius;
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_mode(mut self, mode: CoocMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_fallback(mut self, fallback: Fallback) -> Self {
        self.fallback = fallback;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_factor(self.factor)?;
        check_sigma(self.sigma)?;
        if self.radius < self.factor {
            return Err(Error::InvalidParameter(format!(
                "radius k = {} is smaller than factor d = {}; k >= d is required",
                self.radius, self.factor
            )));
        }
        Ok(())
    }

    pub fn guide_params(&self) -> GuideParams {
        GuideParams {
            factor: self.factor,
            sigma: self.sigma,
        }
    }
}

/// Guide, table and output for one channel.
#[derive(Debug, Clone)]
pub struct PlaneResult {
    pub guide: ImagePlane,
    pub cooc: CoocMatrix,
    pub output: ImagePlane,
}

/// Runs the full pipeline on a single plane, keeping the intermediates.
pub fn downscale_plane_detailed(plane: &ImagePlane, params: &DownscaleParams) -> Result<PlaneResult> {
    params.validate()?;
    let guide = build_guide(plane, params.guide_params())?;
    let cooc = learn_cooccurrence(plane, params.radius, params.mode, Some(&guide))?;
    let output = cooc_filter(plane, &guide, &cooc, params.factor, params.fallback)?;
    Ok(PlaneResult {
        guide,
        cooc,
        output,
    })
}

pub fn downscale_plane(plane: &ImagePlane, params: &DownscaleParams) -> Result<ImagePlane> {
    downscale_plane_detailed(plane, params).map(|r| r.output)
}

/// Downscales every channel independently with its own table.
pub fn downscale_cooc(img: &RasterImage, params: &DownscaleParams) -> Result<RasterImage> {
    params.validate()?;
    img.try_map_planes(|p| downscale_plane(p, params))
}
