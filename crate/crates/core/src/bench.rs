//! Timing harness for the scaling of guide construction, learning and
//! filtering with image size and window radius.

use std::io::Write;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::cooc::{cooc_filter, learn_cooccurrence, CoocMode, Fallback};
use crate::error::{Error, Result};
use crate::image::ImagePlane;
use crate::resample::{build_guide, check_factor, GuideParams};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    /// Side lengths of the square test planes.
    pub sizes: Vec<usize>,
    pub radii: Vec<usize>,
    pub factor: usize,
    pub sigma: f64,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![256, 512],
            radii: vec![2],
            factor: 2,
            sigma: 0.5,
            repeats: 5,
            seed: 0x5eed,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        check_factor(self.factor)?;
        if self.repeats == 0 {
            return Err(Error::InvalidParameter("repeats must be at least 1".into()));
        }
        if self.sizes.is_empty() {
            return Err(Error::InvalidParameter("size list is empty".into()));
        }
        if let Some(&s) = self.sizes.iter().find(|&&s| s == 0 || s % self.factor != 0) {
            return Err(Error::InvalidParameter(format!(
                "size {s} is not a positive multiple of factor {}",
                self.factor
            )));
        }
        if self.radii.is_empty() {
            return Err(Error::InvalidParameter("radius list is empty".into()));
        }
        if let Some(&k) = self.radii.iter().find(|&&k| k < self.factor) {
            return Err(Error::InvalidParameter(format!(
                "radius {k} is smaller than factor {}; k >= d is required",
                self.factor
            )));
        }
        Ok(())
    }
}

/// Median timings, in milliseconds, for one (size, radius) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub width: usize,
    pub height: usize,
    pub radius: usize,
    pub factor: usize,
    pub repeats: usize,
    pub guide_ms: f64,
    pub learn_ms: f64,
    pub filter_ms: f64,
    pub total_ms: f64,
}

/// Uniform random 8-bit plane.
pub fn random_plane(width: usize, height: usize, rng: &mut impl Rng) -> ImagePlane {
    let values = (0..width * height).map(|_| rng.gen_range(0..=255u8) as f64).collect();
    ImagePlane::from_parts(width, height, values)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    config.validate()?;
    let mut rng = StdRng::seed_from_u64(config.seed);
    let guide_params = GuideParams::new(config.factor, config.sigma)?;
    let mut rows = Vec::new();
    for &size in &config.sizes {
        let plane = random_plane(size, size, &mut rng);
        for &radius in &config.radii {
            // one untimed warm-up run
            let guide = build_guide(&plane, guide_params)?;
            let cooc = learn_cooccurrence(&plane, radius, CoocMode::InputPairs, None)?;
            cooc_filter(&plane, &guide, &cooc, config.factor, Fallback::GuideValue)?;

            let (mut g, mut l, mut f, mut t) = (vec![], vec![], vec![], vec![]);
            for _ in 0..config.repeats {
                let start = Instant::now();
                let guide = build_guide(&plane, guide_params)?;
                let guide_ms = elapsed_ms(start);

                let start = Instant::now();
                let cooc = learn_cooccurrence(&plane, radius, CoocMode::InputPairs, None)?;
                let learn_ms = elapsed_ms(start);

                let start = Instant::now();
                let out = cooc_filter(&plane, &guide, &cooc, config.factor, Fallback::GuideValue)?;
                let filter_ms = elapsed_ms(start);
                std::hint::black_box(out);

                g.push(guide_ms);
                l.push(learn_ms);
                f.push(filter_ms);
                t.push(guide_ms + learn_ms + filter_ms);
            }
            rows.push(BenchRow {
                width: size,
                height: size,
                radius,
                factor: config.factor,
                repeats: config.repeats,
                guide_ms: median(g),
                learn_ms: median(l),
                filter_ms: median(f),
                total_ms: median(t),
            });
        }
    }
    Ok(rows)
}

pub fn write_bench_csv(rows: &[BenchRow], out: impl Write) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row).map_err(|e| Error::Report(e.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}
