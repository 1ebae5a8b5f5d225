//! Uniform access to every downscaler, and the method comparison.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::cooc::{downscale_cooc, DownscaleParams};
use crate::error::{Error, Result};
use crate::image::{ImagePlane, RasterImage};
use crate::metrics::{gradient_energy, mean_squared_error, psnr_from_mse};
use crate::report::{QualityReport, QualityRow};
use crate::resample::{bicubic_downscale, box_downscale, lanczos_downscale, subsample_downscale};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Cooc,
    Box,
    Subsample,
    Bicubic,
    Lanczos,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Cooc,
        Method::Box,
        Method::Subsample,
        Method::Bicubic,
        Method::Lanczos,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Cooc => "cooc",
            Method::Box => "box",
            Method::Subsample => "subsample",
            Method::Bicubic => "bicubic",
            Method::Lanczos => "lanczos",
        }
    }

    /// Downscales by `params.factor`. Only [`Method::Cooc`] reads the other
    /// fields of `params`.
    pub fn downscale(self, img: &RasterImage, params: &DownscaleParams) -> Result<RasterImage> {
        let plane_fn: fn(&ImagePlane, usize) -> Result<ImagePlane> = match self {
            Method::Cooc => return downscale_cooc(img, params),
            Method::Box => box_downscale,
            Method::Subsample => subsample_downscale,
            Method::Bicubic => bicubic_downscale,
            Method::Lanczos => lanczos_downscale,
        };
        img.try_map_planes(|p| plane_fn(p, params.factor))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method '{s}'")))
    }
}

/// Mean gradient energy over channels.
pub fn image_gradient_energy(img: &RasterImage) -> Result<f64> {
    let mut total = 0.0;
    for p in img.planes() {
        total += gradient_energy(p)?;
    }
    Ok(total / img.channels() as f64)
}

/// PSNR over all samples of all channels.
pub fn image_psnr(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    if a.channels() != b.channels() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} channels", a.channels()),
            actual: format!("{} channels", b.channels()),
        });
    }
    let mut mse = 0.0;
    for (pa, pb) in a.planes().iter().zip(b.planes()) {
        mse += mean_squared_error(pa, pb)?;
    }
    Ok(psnr_from_mse(mse / a.channels() as f64))
}

/// Result of running every method on one input.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub outputs: Vec<(Method, RasterImage)>,
    pub report: QualityReport,
}

/// Runs every method at the same factor. PSNR of each output is taken
/// against the box output.
pub fn compare_methods(img: &RasterImage, params: &DownscaleParams) -> Result<Comparison> {
    params.validate()?;
    let mut outputs = Vec::with_capacity(Method::ALL.len());
    let mut timings = Vec::with_capacity(Method::ALL.len());
    for method in Method::ALL {
        let start = Instant::now();
        let out = method.downscale(img, params)?;
        timings.push(start.elapsed().as_secs_f64() * 1e3);
        outputs.push((method, out));
    }
    let reference = outputs
        .iter()
        .find(|(m, _)| *m == Method::Box)
        .map(|(_, o)| o.clone())
        .expect("box is always run");

    let mut report = QualityReport::default();
    for ((method, out), time_ms) in outputs.iter().zip(timings) {
        let psnr_db = match method {
            Method::Box => None,
            _ => Some(image_psnr(out, &reference)?),
        };
        let gradient = if out.width() * out.height() >= 2 {
            image_gradient_energy(out)?
        } else {
            0.0
        };
        report.push(QualityRow {
            method: method.to_string(),
            width: out.width(),
            height: out.height(),
            time_ms,
            gradient_energy: gradient,
            psnr_reference: psnr_db.map(|_| Method::Box.to_string()),
            psnr_db,
        });
    }
    Ok(Comparison { outputs, report })
}
