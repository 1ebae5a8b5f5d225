//! 8-bit image file I/O: PNG (gray/RGB) and PNM (P2, P3, P5, P6, maxval 255).
//!
//! PNM output is byte-exact: `magic\nwidth height\n255\n` followed by the
//! payload. ASCII payloads use single spaces between samples and a newline
//! after each image row.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{round_level, ImagePlane, RasterImage};

/// Pixel count above which a header is considered to overflow.
pub const MAX_PIXELS: u64 = 1 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
    /// P2
    PgmAscii,
    /// P3
    PpmAscii,
    /// P5
    PgmBinary,
    /// P6
    PpmBinary,
}

impl ImageFormat {
    pub fn name(self) -> &'static str {
        match self {
            ImageFormat::Png => "PNG",
            ImageFormat::PgmAscii => "P2",
            ImageFormat::PpmAscii => "P3",
            ImageFormat::PgmBinary => "P5",
            ImageFormat::PpmBinary => "P6",
        }
    }

    fn pnm_magic(self) -> Option<&'static [u8; 2]> {
        match self {
            ImageFormat::Png => None,
            ImageFormat::PgmAscii => Some(b"P2"),
            ImageFormat::PpmAscii => Some(b"P3"),
            ImageFormat::PgmBinary => Some(b"P5"),
            ImageFormat::PpmBinary => Some(b"P6"),
        }
    }

    fn output_channels(self) -> Option<usize> {
        match self {
            ImageFormat::Png => None,
            ImageFormat::PgmAscii | ImageFormat::PgmBinary => Some(1),
            ImageFormat::PpmAscii | ImageFormat::PpmBinary => Some(3),
        }
    }

    /// Picks a format from a file extension. `.pnm` resolves to P5 or P6
    /// depending on `channels`.
    pub fn from_path(path: &Path, channels: usize) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "png" => Some(ImageFormat::Png),
            "pgm" => Some(ImageFormat::PgmBinary),
            "ppm" => Some(ImageFormat::PpmBinary),
            "pnm" if channels == 3 => Some(ImageFormat::PpmBinary),
            "pnm" => Some(ImageFormat::PgmBinary),
            _ => None,
        }
    }

    /// Identifies the format from the leading bytes of a file.
    pub fn sniff(data: &[u8]) -> Option<Self> {
        const PNG_SIGNATURE: &[u8] = &[0x89, b'P', b'N', b'G', 0x0d, 0x0a, 0x1a, 0x0a];
        if data.starts_with(PNG_SIGNATURE) {
            return Some(ImageFormat::Png);
        }
        match data.get(..2)? {
            b"P2" => Some(ImageFormat::PgmAscii),
            b"P3" => Some(ImageFormat::PpmAscii),
            b"P5" => Some(ImageFormat::PgmBinary),
            b"P6" => Some(ImageFormat::PpmBinary),
            _ => None,
        }
    }
}

/// Reads an image file. The format is taken from `hint` when given and
/// sniffed from the content otherwise.
pub fn load_image(path: impl AsRef<Path>, hint: Option<ImageFormat>) -> Result<RasterImage> {
    let data = fs::read(path)?;
    match hint {
        Some(format) => decode_as(&data, format),
        None => decode(&data),
    }
}

/// Writes `img` to `path` in `format`.
pub fn save_image(img: &RasterImage, path: impl AsRef<Path>, format: ImageFormat) -> Result<()> {
    let bytes = encode(img, format)?;
    fs::write(path, bytes)?;
    Ok(())
}

pub fn decode(data: &[u8]) -> Result<RasterImage> {
    let format = ImageFormat::sniff(data)
        .ok_or_else(|| Error::UnsupportedFormat("unrecognized file signature".into()))?;
    decode_as(data, format)
}

pub fn decode_as(data: &[u8], format: ImageFormat) -> Result<RasterImage> {
    match format {
        ImageFormat::Png => decode_png(data),
        _ => decode_pnm(data, format),
    }
}

pub fn encode(img: &RasterImage, format: ImageFormat) -> Result<Vec<u8>> {
    match format {
        ImageFormat::Png => encode_png(img),
        _ => encode_pnm(img, format),
    }
}

fn build_image(width: usize, height: usize, channels: usize, samples: &[u8]) -> Result<RasterImage> {
    let planes = (0..channels)
        .map(|ch| {
            let values = samples
                .iter()
                .skip(ch)
                .step_by(channels)
                .map(|&s| s as f64)
                .collect();
            ImagePlane::new(width, height, values)
        })
        .collect::<Result<Vec<_>>>()?;
    RasterImage::new(planes)
}

/// Interleaved 8-bit samples with `channels` samples per pixel. Gray images
/// are replicated when `channels` is 3.
fn interleave(img: &RasterImage, channels: usize) -> Vec<u8> {
    let n = img.width() * img.height();
    let mut out = Vec::with_capacity(n * channels);
    for i in 0..n {
        for ch in 0..channels {
            let plane = img.plane(ch.min(img.channels() - 1));
            out.push(round_level(plane.values()[i]));
        }
    }
    out
}

fn checked_pixels(width: u64, height: u64) -> Result<usize> {
    match width.checked_mul(height) {
        Some(n) if n <= MAX_PIXELS => Ok(n as usize),
        _ => Err(Error::DimensionOverflow { width, height }),
    }
}

// ---- PNM ----

struct PnmHeader {
    width: usize,
    height: usize,
    channels: usize,
    /// Offset of the first payload byte.
    payload: usize,
}

struct Tokens<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Next decimal token, `None` at end of input.
    fn next_number(&mut self, what: &str) -> Result<Option<u64>> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return match self.data.get(self.pos) {
                None => Ok(None),
                Some(&b) => Err(Error::Malformed(format!(
                    "unexpected byte 0x{b:02x} while reading {what}"
                ))),
            };
        }
        let text = std::str::from_utf8(&self.data[start..self.pos]).expect("ascii digits");
        text.parse::<u64>()
            .map(Some)
            .map_err(|_| Error::Malformed(format!("{what} out of range: {text}")))
    }

    fn require_number(&mut self, what: &str) -> Result<u64> {
        self.next_number(what)?
            .ok_or_else(|| Error::Truncated(format!("missing {what}")))
    }
}

fn parse_pnm_header(data: &[u8], format: ImageFormat) -> Result<PnmHeader> {
    let magic = format.pnm_magic().expect("pnm format");
    if data.len() < 2 {
        return Err(Error::Truncated("missing PNM magic".into()));
    }
    if &data[..2] != magic {
        return Err(Error::Malformed(format!(
            "expected magic {}",
            String::from_utf8_lossy(magic)
        )));
    }
    let mut tokens = Tokens { data, pos: 2 };
    let width = tokens.require_number("width")?;
    let height = tokens.require_number("height")?;
    let maxval = tokens.require_number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::Malformed(format!("zero dimension {width}x{height}")));
    }
    if maxval != 255 {
        return Err(Error::UnsupportedFormat(format!(
            "maxval {maxval} (only 255 is supported)"
        )));
    }
    let channels = format.output_channels().expect("pnm format");
    let pixels = checked_pixels(width, height)?;
    pixels
        .checked_mul(channels)
        .ok_or(Error::DimensionOverflow { width, height })?;
    // exactly one whitespace byte separates maxval from a binary payload
    let payload = match data.get(tokens.pos) {
        Some(b) if b.is_ascii_whitespace() => tokens.pos + 1,
        Some(_) => return Err(Error::Malformed("missing whitespace after maxval".into())),
        None => tokens.pos,
    };
    Ok(PnmHeader {
        width: width as usize,
        height: height as usize,
        channels,
        payload,
    })
}

fn decode_pnm(data: &[u8], format: ImageFormat) -> Result<RasterImage> {
    let header = parse_pnm_header(data, format)?;
    let count = header.width * header.height * header.channels;
    let samples: Vec<u8> = match format {
        ImageFormat::PgmBinary | ImageFormat::PpmBinary => {
            let payload = &data[header.payload.min(data.len())..];
            if payload.len() < count {
                return Err(Error::Truncated(format!(
                    "expected {count} payload bytes, found {}",
                    payload.len()
                )));
            }
            payload[..count].to_vec()
        }
        _ => {
            let mut tokens = Tokens {
                data,
                pos: header.payload,
            };
            let mut samples = Vec::with_capacity(count);
            for i in 0..count {
                let v = tokens.next_number("sample")?.ok_or_else(|| {
                    Error::Truncated(format!("expected {count} samples, found {i}"))
                })?;
                if v > 255 {
                    return Err(Error::Malformed(format!("sample {v} exceeds maxval 255")));
                }
                samples.push(v as u8);
            }
            samples
        }
    };
    build_image(header.width, header.height, header.channels, &samples)
}

fn encode_pnm(img: &RasterImage, format: ImageFormat) -> Result<Vec<u8>> {
    let channels = format.output_channels().expect("pnm format");
    if img.channels() > channels {
        return Err(Error::ChannelFormatMismatch {
            channels: img.channels(),
            format: format.name(),
        });
    }
    let magic = format.pnm_magic().expect("pnm format");
    let samples = interleave(img, channels);
    let mut out = Vec::with_capacity(samples.len() * 4 + 32);
    out.extend_from_slice(magic);
    write!(out, "\n{} {}\n255\n", img.width(), img.height())?;
    match format {
        ImageFormat::PgmBinary | ImageFormat::PpmBinary => out.extend_from_slice(&samples),
        _ => {
            for row in samples.chunks(img.width() * channels) {
                let mut first = true;
                for s in row {
                    if !first {
                        out.push(b' ');
                    }
                    first = false;
                    write!(out, "{s}")?;
                }
                out.push(b'\n');
            }
        }
    }
    Ok(out)
}

// ---- PNG ----

fn map_png_decoding(err: png::DecodingError) -> Error {
    match err {
        png::DecodingError::IoError(e) if e.kind() == io::ErrorKind::UnexpectedEof => {
            Error::Truncated(e.to_string())
        }
        png::DecodingError::IoError(e) => Error::Io(e),
        png::DecodingError::LimitsExceeded => Error::DimensionOverflow {
            width: 0,
            height: 0,
        },
        other => Error::Malformed(other.to_string()),
    }
}

fn decode_png(data: &[u8]) -> Result<RasterImage> {
    let mut decoder = png::Decoder::new(data);
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(map_png_decoding)?;
    let info = reader.info();
    if info.bit_depth == png::BitDepth::Sixteen {
        return Err(Error::UnsupportedFormat("16-bit PNG".into()));
    }
    let (width, height) = (info.width as u64, info.height as u64);
    checked_pixels(width, height)?;
    let (color, depth) = reader.output_color_type();
    if depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedFormat(format!("{depth:?} PNG output")));
    }
    let channels = match color {
        png::ColorType::Grayscale => 1,
        png::ColorType::Rgb => 3,
        other => {
            return Err(Error::UnsupportedFormat(format!("PNG color type {other:?}")));
        }
    };
    let mut buf = vec![0; reader.output_buffer_size()];
    let frame = reader.next_frame(&mut buf).map_err(map_png_decoding)?;
    let row_len = width as usize * channels;
    let mut samples = Vec::with_capacity(row_len * height as usize);
    for row in buf[..frame.buffer_size()].chunks(frame.line_size).take(height as usize) {
        samples.extend_from_slice(&row[..row_len]);
    }
    build_image(width as usize, height as usize, channels, &samples)
}

fn encode_png(img: &RasterImage) -> Result<Vec<u8>> {
    let width = u32::try_from(img.width()).map_err(|_| Error::DimensionOverflow {
        width: img.width() as u64,
        height: img.height() as u64,
    })?;
    let height = u32::try_from(img.height()).map_err(|_| Error::DimensionOverflow {
        width: img.width() as u64,
        height: img.height() as u64,
    })?;
    let color = if img.channels() == 3 {
        png::ColorType::Rgb
    } else {
        png::ColorType::Grayscale
    };
    let samples = interleave(img, img.channels());
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, width, height);
        encoder.set_color(color);
        encoder.set_depth(png::BitDepth::Eight);
        let mut writer = encoder
            .write_header()
            .map_err(|e| Error::Malformed(e.to_string()))?;
        writer
            .write_image_data(&samples)
            .map_err(|e| Error::Malformed(e.to_string()))?;
    }
    Ok(out)
}
