//! 8-bit grayscale rasters, binary PGM I/O and bit-plane comparison.
//!
//! Samples are stored row-major with the origin at the top-left corner. Every
//! other module traverses images in this order.

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

/// Bits per sample. Fixed for the whole toolkit.
pub const BIT_DEPTH: u32 = 8;

/// Largest representable sample value, `2^BIT_DEPTH - 1`.
pub const MAX_SAMPLE: u8 = u8::MAX;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt file: {0}")]
    CorruptFile(String),
    #[error("invalid dimensions {width}x{height} for {len} samples")]
    InvalidDimensions {
        width: usize,
        height: usize,
        len: usize,
    },
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
}

/// An 8-bit grayscale image.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    samples: Vec<u8>,
}

impl std::fmt::Debug for GrayImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GrayImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl GrayImage {
    pub fn new(width: usize, height: usize, samples: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 || width.checked_mul(height) != Some(samples.len()) {
            return Err(ImageError::InvalidDimensions {
                width,
                height,
                len: samples.len(),
            });
        }
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    /// Image with every sample set to `value`.
    ///
    /// Panics if either dimension is zero.
    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self::new(width, height, vec![value; width * height]).expect("non-zero dimensions")
    }

    /// Builds an image by evaluating `f(row, col)` in raster order.
    ///
    /// Panics if either dimension is zero.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut samples = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                samples.push(f(row, col));
            }
        }
        Self::new(width, height, samples).expect("non-zero dimensions")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [u8] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<u8> {
        self.samples
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.samples[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.samples[row * self.width + col] = value;
    }

    pub fn same_dimensions(&self, other: &GrayImage) -> Result<(), ImageError> {
        if self.width != other.width || self.height != other.height {
            return Err(ImageError::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ));
        }
        Ok(())
    }
}

/// Parses a binary (`P5`) PGM with maxval 255.
pub fn decode_pgm(data: &[u8]) -> Result<GrayImage, ImageError> {
    let mut cursor = HeaderCursor { data, pos: 0 };
    let magic = data
        .get(..2)
        .ok_or_else(|| ImageError::CorruptFile("missing magic number".into()))?;
    if magic != b"P5" {
        return Err(ImageError::UnsupportedFormat(format!(
            "magic {:?}, only binary PGM (P5) is supported",
            String::from_utf8_lossy(magic)
        )));
    }
    cursor.pos = 2;
    let width = cursor.next_number("width")?;
    let height = cursor.next_number("height")?;
    let maxval = cursor.next_number("maxval")?;
    if maxval != 255 {
        return Err(ImageError::UnsupportedFormat(format!(
            "maxval {maxval}, only 255 is supported"
        )));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match data.get(cursor.pos) {
        Some(b) if b.is_ascii_whitespace() => cursor.pos += 1,
        _ => return Err(ImageError::CorruptFile("no separator after maxval".into())),
    }
    if width == 0 || height == 0 {
        return Err(ImageError::CorruptFile(format!(
            "degenerate dimensions {width}x{height}"
        )));
    }
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| ImageError::CorruptFile("dimensions overflow".into()))?;
    let raster = &data[cursor.pos..];
    if raster.len() < expected {
        return Err(ImageError::CorruptFile(format!(
            "expected {expected} sample bytes, found {}",
            raster.len()
        )));
    }
    GrayImage::new(width, height, raster[..expected].to_vec())
}

/// Serializes as `P5\n<w> <h>\n255\n` followed by the raw samples.
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.width(), img.height());
    let mut out = Vec::with_capacity(header.len() + img.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(img.samples());
    out
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage, ImageError> {
    decode_pgm(&fs::read(path)?)
}

pub fn save_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<(), ImageError> {
    fs::write(path, encode_pgm(img))?;
    Ok(())
}

struct HeaderCursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
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

    fn next_number(&mut self, what: &str) -> Result<usize, ImageError> {
        let before = self.pos;
        self.skip_whitespace_and_comments();
        if self.pos == before {
            return Err(ImageError::CorruptFile(format!(
                "expected whitespace before {what}"
            )));
        }
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ImageError::CorruptFile(format!("missing {what}")));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ImageError::CorruptFile(format!("{what} out of range")))
    }
}

/// Per-bit-plane comparison of two equally sized images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitplaneDiff {
    /// `plane_counts[k]` is the number of samples whose bit `k` differs.
    pub plane_counts: [usize; 8],
    /// Raster indices of samples that differ in any bit.
    pub positions: Vec<usize>,
}

impl BitplaneDiff {
    pub fn total_bits(&self) -> usize {
        self.plane_counts.iter().sum()
    }

    /// True when only bit-plane 0 differs.
    pub fn lsb_only(&self) -> bool {
        self.plane_counts[1..].iter().all(|&c| c == 0)
    }
}

pub fn bitplane_diff(a: &GrayImage, b: &GrayImage) -> Result<BitplaneDiff, ImageError> {
    a.same_dimensions(b)?;
    let mut plane_counts = [0usize; 8];
    let mut positions = Vec::new();
    for (idx, (&x, &y)) in a.samples().iter().zip(b.samples()).enumerate() {
        let diff = x ^ y;
        if diff == 0 {
            continue;
        }
        positions.push(idx);
        for (k, count) in plane_counts.iter_mut().enumerate() {
            *count += usize::from((diff >> k) & 1);
        }
    }
    Ok(BitplaneDiff {
        plane_counts,
        positions,
    })
}
