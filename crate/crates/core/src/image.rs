//! In-memory image representation.
//!
//! Intensities are kept as `f64` in the nominal range `[0, 255]`; quantization
//! to 8-bit levels only happens through [`round_level`].

use crate::error::{Error, Result};

/// A single channel of row-major intensities.
#[derive(Debug, Clone, PartialEq)]
pub struct ImagePlane {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl ImagePlane {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "plane dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width
            .checked_mul(height)
            .ok_or(Error::DimensionOverflow {
                width: width as u64,
                height: height as u64,
            })?;
        if values.len() != expected {
            return Err(Error::InvalidImage(format!(
                "{width}x{height} plane needs {expected} values, got {}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidImage(format!(
                "non-finite value at index {pos}"
            )));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    /// Plane with every pixel set to `value`.
    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    /// Builds a plane from `f(row, col)`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(width.saturating_mul(height));
        for row in 0..height {
            for col in 0..width {
                values.push(f(row, col));
            }
        }
        Self::new(width, height, values)
    }

    /// Internal constructor for buffers whose shape is known to be valid.
    pub(crate) fn from_parts(width: usize, height: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), width * height);
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self {
            width,
            height,
            values,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.width..(row + 1) * self.width]
    }

    /// In-bounds access. Panics on out-of-range coordinates.
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        assert!(row < self.height && col < self.width, "({row}, {col}) out of bounds");
        self.values[row * self.width + col]
    }

    /// Access with replicate padding: coordinates are clamped to the nearest
    /// valid pixel.
    #[inline]
    pub fn clamped_get(&self, row: isize, col: isize) -> f64 {
        let r = clamp_index(row, self.height);
        let c = clamp_index(col, self.width);
        self.values[r * self.width + c]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Rounded 8-bit level of every pixel, row-major.
    pub fn levels(&self) -> Vec<u8> {
        self.values.iter().map(|&v| round_level(v)).collect()
    }

    /// Copies the `width`x`height` region whose top-left corner is `(top, left)`.
    pub fn crop(&self, top: usize, left: usize, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 || top + height > self.height || left + width > self.width {
            return Err(Error::DimensionMismatch {
                expected: format!("region inside {}x{}", self.width, self.height),
                actual: format!("{width}x{height} at ({top}, {left})"),
            });
        }
        let mut values = Vec::with_capacity(width * height);
        for row in top..top + height {
            let start = row * self.width + left;
            values.extend_from_slice(&self.values[start..start + width]);
        }
        Ok(Self::from_parts(width, height, values))
    }
}

#[inline]
pub(crate) fn clamp_index(index: isize, len: usize) -> usize {
    if index <= 0 {
        0
    } else if index as usize >= len {
        len - 1
    } else {
        index as usize
    }
}

/// Quantizes an intensity to an 8-bit level: round half away from zero, then
/// clamp to `[0, 255]`.
#[inline]
pub fn round_level(v: f64) -> u8 {
    // f64::round ties away from zero
    v.round().clamp(0.0, 255.0) as u8
}

/// A gray (1-channel) or RGB (3-channel) image.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    planes: Vec<ImagePlane>,
}

impl RasterImage {
    pub fn new(planes: Vec<ImagePlane>) -> Result<Self> {
        if planes.len() != 1 && planes.len() != 3 {
            return Err(Error::InvalidImage(format!(
                "expected 1 or 3 channels, got {}",
                planes.len()
            )));
        }
        let (w, h) = (planes[0].width(), planes[0].height());
        if planes.iter().any(|p| p.width() != w || p.height() != h) {
            return Err(Error::InvalidImage(
                "all channels must share the same dimensions".into(),
            ));
        }
        Ok(Self { planes })
    }

    pub fn gray(plane: ImagePlane) -> Self {
        Self {
            planes: vec![plane],
        }
    }

    pub fn channels(&self) -> usize {
        self.planes.len()
    }

    pub fn width(&self) -> usize {
        self.planes[0].width()
    }

    pub fn height(&self) -> usize {
        self.planes[0].height()
    }

    pub fn planes(&self) -> &[ImagePlane] {
        &self.planes
    }

    pub fn plane(&self, channel: usize) -> &ImagePlane {
        &self.planes[channel]
    }

    pub fn into_planes(self) -> Vec<ImagePlane> {
        self.planes
    }

    /// Applies `f` to every channel.
    pub fn try_map_planes(&self, f: impl Fn(&ImagePlane) -> Result<ImagePlane>) -> Result<Self> {
        let planes = self.planes.iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(planes)
    }

    /// Center-crops each dimension down to the largest multiple of `factor`.
    pub fn center_crop_to_multiple(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidParameter("crop factor must be positive".into()));
        }
        let (w, h) = (self.width(), self.height());
        let (cw, ch) = (w / factor * factor, h / factor * factor);
        if cw == 0 || ch == 0 {
            return Err(Error::NotDivisible {
                width: w,
                height: h,
                factor,
            });
        }
        let (top, left) = ((h - ch) / 2, (w - cw) / 2);
        self.try_map_planes(|p| p.crop(top, left, cw, ch))
    }
}
