//! Image downscaling with a co-occurrence range kernel.
//!
//! The downscaler builds a coarse guide image (box average plus light
//! Gaussian smoothing), learns how often every pair of 8-bit levels occurs
//! close together in the input, and then forms each output pixel as a
//! weighted average of nearby input pixels, where the weight of a pixel is
//! the co-occurrence count between its level and the guide level. Pairs that
//! are common in the image get large weights, so structure that recurs across
//! the image survives the reduction instead of being averaged away.
//!
//! Classic baselines (box, subsampling, antialiased bicubic and Lanczos),
//! quality proxies, kernel diagnostics and a timing harness are included.

pub mod bench;
pub mod codec;
pub mod cooc;
pub mod diagnostics;
pub mod error;
pub mod image;
pub mod methods;
pub mod metrics;
pub mod report;
pub mod resample;

pub use codec::{load_image, save_image, ImageFormat};
pub use cooc::{
    cooc_filter, downscale_cooc, downscale_plane, learn_cooccurrence, CoocMatrix, CoocMode,
    DownscaleParams, Fallback,
};
pub use diagnostics::{kernel_diagnostics, KernelReport};
pub use error::{Error, Result};
pub use image::{round_level, ImagePlane, RasterImage};
pub use methods::{compare_methods, Method};
pub use report::{QualityReport, QualityRow};
pub use resample::{build_guide, GuideParams};
