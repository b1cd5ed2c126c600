//! Raster types and the binary PNM (P5/P6) codec.
//!
//! Only maxval 255 is supported. Header tokens are separated by any run of
//! ASCII whitespace, `#` starts a comment running to the end of the line, and
//! exactly one whitespace byte separates maxval from the payload.

use crate::error::{Error, Result};

/// Single-channel 8-bit raster, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0)
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        GrayImage {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_raw(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(Error::InvalidDimensions {
                width,
                height,
                len: data.len(),
            });
        }
        Ok(GrayImage {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        GrayImage {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        self.data[y * self.width + x] = value;
    }

    /// Expands to three identical channels.
    pub fn to_rgb(&self) -> RgbImage {
        let data = self.data.iter().flat_map(|&v| [v, v, v]).collect();
        RgbImage {
            width: self.width,
            height: self.height,
            data,
        }
    }

    pub fn transpose(&self) -> GrayImage {
        GrayImage::from_fn(self.height, self.width, |x, y| self.get(y, x))
    }
}

/// Interleaved 8-bit RGB raster, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn filled(width: usize, height: usize, color: [u8; 3]) -> Self {
        let data = std::iter::repeat_n(color, width * height)
            .flatten()
            .collect();
        RgbImage {
            width,
            height,
            data,
        }
    }

    pub fn from_raw(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != 3 * width * height {
            return Err(Error::InvalidDimensions {
                width,
                height,
                len: data.len(),
            });
        }
        Ok(RgbImage {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, color: [u8; 3]) {
        let i = 3 * (y * self.width + x);
        self.data[i..i + 3].copy_from_slice(&color);
    }

    pub fn pixels(&self) -> impl Iterator<Item = [u8; 3]> + '_ {
        self.data.chunks_exact(3).map(|p| [p[0], p[1], p[2]])
    }
}

/// Real-valued raster used between the filtering stages.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl FloatImage {
    pub fn new(width: usize, height: usize) -> Self {
        FloatImage {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub fn from_raw(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0
            || height == 0
            || data.len() != width * height
            || data.iter().any(|v| !v.is_finite())
        {
            return Err(Error::InvalidDimensions {
                width,
                height,
                len: data.len(),
            });
        }
        Ok(FloatImage {
            width,
            height,
            data,
        })
    }

    pub(crate) fn from_vec_unchecked(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        FloatImage {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn transpose(&self) -> FloatImage {
        let mut data = Vec::with_capacity(self.data.len());
        for y in 0..self.width {
            for x in 0..self.height {
                data.push(self.get(y, x));
            }
        }
        FloatImage::from_vec_unchecked(self.height, self.width, data)
    }

    /// Round half up and clamp to `[0, 255]`.
    pub fn quantize(&self) -> GrayImage {
        let data = self.data.iter().map(|&v| quantize_sample(v)).collect();
        GrayImage {
            width: self.width,
            height: self.height,
            data,
        }
    }
}

#[inline]
pub(crate) fn quantize_sample(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Either raster kind, as decoded from a PNM stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PnmImage {
    Gray(GrayImage),
    Rgb(RgbImage),
}

impl PnmImage {
    pub fn dimensions(&self) -> (usize, usize) {
        match self {
            PnmImage::Gray(g) => g.dimensions(),
            PnmImage::Rgb(c) => c.dimensions(),
        }
    }

    /// Gray inputs are replicated into three channels.
    pub fn into_rgb(self) -> RgbImage {
        match self {
            PnmImage::Gray(g) => g.to_rgb(),
            PnmImage::Rgb(c) => c,
        }
    }
}

impl From<GrayImage> for PnmImage {
    fn from(img: GrayImage) -> Self {
        PnmImage::Gray(img)
    }
}

impl From<RgbImage> for PnmImage {
    fn from(img: RgbImage) -> Self {
        PnmImage::Rgb(img)
    }
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self, field: &str) -> Result<u32> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::MalformedHeader(format!("expected numeric {field}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedHeader(format!("{field} out of range")))
    }
}

/// Decodes a binary graymap (P5) or pixmap (P6).
pub fn read_pnm(bytes: &[u8]) -> Result<PnmImage> {
    let channels = match bytes.get(..2) {
        Some(b"P5") => 1,
        Some(b"P6") => 3,
        _ => {
            return Err(Error::MalformedHeader(
                "bad magic, expected P5 or P6".into(),
            ))
        }
    };
    let mut header = HeaderReader { bytes, pos: 2 };
    if !header
        .bytes
        .get(2)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(Error::MalformedHeader(
            "missing separator after magic".into(),
        ));
    }
    let width = header.number("width")? as usize;
    let height = header.number("height")? as usize;
    let maxval = header.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!(
            "zero dimension {width}x{height}"
        )));
    }
    if maxval != 255 {
        return Err(Error::UnsupportedMaxval(maxval));
    }
    match bytes.get(header.pos) {
        Some(b) if b.is_ascii_whitespace() => header.pos += 1,
        _ => {
            return Err(Error::MalformedHeader(
                "missing whitespace after maxval".into(),
            ))
        }
    }
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| Error::MalformedHeader("dimensions overflow".into()))?;
    let payload = &bytes[header.pos..];
    if payload.len() < expected {
        return Err(Error::TruncatedPayload {
            expected,
            found: payload.len(),
        });
    }
    let data = payload[..expected].to_vec();
    Ok(if channels == 1 {
        PnmImage::Gray(GrayImage {
            width,
            height,
            data,
        })
    } else {
        PnmImage::Rgb(RgbImage {
            width,
            height,
            data,
        })
    })
}

pub fn write_pgm(image: &GrayImage) -> Vec<u8> {
    encode(b"P5", image.width, image.height, &image.data)
}

pub fn write_ppm(image: &RgbImage) -> Vec<u8> {
    encode(b"P6", image.width, image.height, &image.data)
}

pub fn write_pnm(image: &PnmImage) -> Vec<u8> {
    match image {
        PnmImage::Gray(g) => write_pgm(g),
        PnmImage::Rgb(c) => write_ppm(c),
    }
}

fn encode(magic: &[u8], width: usize, height: usize, samples: &[u8]) -> Vec<u8> {
    let header = format!("\n{width} {height}\n255\n");
    let mut out = Vec::with_capacity(2 + header.len() + samples.len());
    out.extend_from_slice(magic);
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(samples);
    out
}
