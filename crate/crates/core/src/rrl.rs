//! Rotational replacement of LSB (RRL).
//!
//! The host is tiled into 8×8 blocks in block raster order; margins that do
//! not fill a whole block are never touched. Each used block carries one
//! payload byte. The LSBs of block row `k` form a byte `r_k` (leftmost pixel
//! is the most significant bit). Embedding shifts the rows down by one
//! (`r_k ← r_{k−1}`) and writes the payload byte into the freed `r_0`.
//!
//! The shift pushes `r_7` out of the block. It is kept in a
//! [`RestorationRecord`] so that extraction can restore the host exactly;
//! without the record, extraction leaves `r_7` holding a copy of the
//! original `r_6`.

use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

use crate::codec::{bits_to_bytes, bytes_to_bits, frame_total_bits, Bits};
use crate::image::GrayImage;

pub const BLOCK_SIZE: usize = 8;
pub const RECORD_MAGIC: u16 = 0xD1F1;

/// Bytes read before the frame length is known: magic, version, length.
const FRAME_PREFIX_BYTES: usize = 7;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RrlError {
    #[error("payload of {requested} bits exceeds capacity of {capacity} bits")]
    CapacityExceeded { requested: usize, capacity: usize },
    #[error("malformed stream: {0}")]
    MalformedStream(String),
    #[error("restoration record mismatch: {0}")]
    RecordMismatch(String),
}

/// Host-to-watermark size ratio `γ = (M·N) / (m·n)`, kept exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Gamma(Ratio<u64>);

impl Gamma {
    pub fn ratio(&self) -> Ratio<u64> {
        self.0
    }

    /// RRL needs at least 8 host pixels per watermark bit.
    pub fn permits_embedding(&self) -> bool {
        self.0 >= Ratio::from_integer(8)
    }

    /// Whether one byte per 8×8 block suffices (`γ ≥ 64`).
    pub fn fits_8x8_blocks(&self) -> bool {
        self.0 >= Ratio::from_integer(64)
    }

    pub fn to_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Panics if the watermark has no bits.
pub fn gamma_ratio(host: (usize, usize), watermark: (usize, usize)) -> Gamma {
    let host = (host.0 * host.1) as u64;
    let mark = (watermark.0 * watermark.1) as u64;
    assert!(mark > 0, "watermark must contain at least one bit");
    Gamma(Ratio::new(host, mark))
}

/// Block grid of a host image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RrlGeometry {
    pub width: usize,
    pub height: usize,
    pub block_rows: usize,
    pub block_cols: usize,
}

impl RrlGeometry {
    pub fn of(img: &GrayImage) -> Self {
        Self {
            width: img.width(),
            height: img.height(),
            block_rows: img.height() / BLOCK_SIZE,
            block_cols: img.width() / BLOCK_SIZE,
        }
    }

    pub fn block_count(&self) -> usize {
        self.block_rows * self.block_cols
    }

    pub fn capacity_bits(&self) -> usize {
        8 * self.block_count()
    }

    /// Top-left sample of block `index` (block raster order).
    fn origin(&self, index: usize) -> (usize, usize) {
        (
            (index / self.block_cols) * BLOCK_SIZE,
            (index % self.block_cols) * BLOCK_SIZE,
        )
    }
}

pub fn rrl_capacity(img: &GrayImage) -> usize {
    RrlGeometry::of(img).capacity_bits()
}

fn read_lsb_rows(img: &GrayImage, geo: &RrlGeometry, block: usize) -> [u8; 8] {
    let (top, left) = geo.origin(block);
    let mut rows = [0u8; 8];
    for (k, row) in rows.iter_mut().enumerate() {
        let line = &img.samples()[(top + k) * geo.width + left..][..BLOCK_SIZE];
        *row = line.iter().fold(0, |acc, &px| (acc << 1) | (px & 1));
    }
    rows
}

fn write_lsb_rows(img: &mut GrayImage, geo: &RrlGeometry, block: usize, rows: &[u8; 8]) {
    let (top, left) = geo.origin(block);
    let width = geo.width;
    for (k, &row) in rows.iter().enumerate() {
        let line = &mut img.samples_mut()[(top + k) * width + left..][..BLOCK_SIZE];
        for (j, px) in line.iter_mut().enumerate() {
            *px = (*px & !1) | ((row >> (7 - j)) & 1);
        }
    }
}

/// Rotates a block's LSB rows down by one, inserting `byte` on top. Returns
/// the row pushed out of the bottom.
pub fn rotate_in(rows: &mut [u8; 8], byte: u8) -> u8 {
    let displaced = rows[7];
    rows.copy_within(0..7, 1);
    rows[0] = byte;
    displaced
}

/// Inverse of [`rotate_in`]. With `displaced = None` the bottom row keeps its
/// current value, duplicating the row above it.
pub fn rotate_out(rows: &mut [u8; 8], displaced: Option<u8>) -> u8 {
    let byte = rows[0];
    rows.copy_within(1..8, 0);
    if let Some(d) = displaced {
        rows[7] = d;
    }
    byte
}

/// Sidecar holding the LSB row each used block lost during embedding.
///
/// Wire format, big-endian: `magic(16) | block_size(8) | count(32)` followed
/// by `count` entries of `block_index(32) | byte(8)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestorationRecord {
    pub block_size: u8,
    pub displaced: Vec<(u32, u8)>,
}

impl RestorationRecord {
    pub fn used_block_count(&self) -> usize {
        self.displaced.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(7 + 5 * self.displaced.len());
        out.extend_from_slice(&RECORD_MAGIC.to_be_bytes());
        out.push(self.block_size);
        out.extend_from_slice(&(self.displaced.len() as u32).to_be_bytes());
        for &(index, byte) in &self.displaced {
            out.extend_from_slice(&index.to_be_bytes());
            out.push(byte);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, RrlError> {
        let bad = |msg: String| RrlError::RecordMismatch(msg);
        if bytes.len() < 7 {
            return Err(bad(format!("record of {} bytes is truncated", bytes.len())));
        }
        let magic = u16::from_be_bytes([bytes[0], bytes[1]]);
        if magic != RECORD_MAGIC {
            return Err(bad(format!("magic {magic:#06x}")));
        }
        let block_size = bytes[2];
        let count = u32::from_be_bytes(bytes[3..7].try_into().unwrap()) as usize;
        let body = &bytes[7..];
        if Some(body.len()) != count.checked_mul(5) {
            return Err(bad(format!(
                "{count} entries declared, {} body bytes present",
                body.len()
            )));
        }
        let displaced = body
            .chunks_exact(5)
            .map(|e| (u32::from_be_bytes(e[..4].try_into().unwrap()), e[4]))
            .collect();
        let record = Self {
            block_size,
            displaced,
        };
        record.validate()?;
        Ok(record)
    }

    fn validate(&self) -> Result<(), RrlError> {
        if usize::from(self.block_size) != BLOCK_SIZE {
            return Err(RrlError::RecordMismatch(format!(
                "block size {}",
                self.block_size
            )));
        }
        if self.displaced.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(RrlError::RecordMismatch(
                "block indices not strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RestoreMode {
    /// Displaced rows restored from the record; bit-exact.
    Exact,
    /// No record; each used block's bottom LSB row repeats the row above.
    Literal,
}

#[derive(Debug, Clone)]
pub struct RrlExtraction {
    pub payload: Bits,
    pub restored: GrayImage,
    pub mode: RestoreMode,
}

/// Embeds `payload` one byte per block. A trailing partial byte is padded
/// with zero bits.
pub fn rrl_embed(
    img: &GrayImage,
    payload: &[bool],
) -> Result<(GrayImage, RestorationRecord), RrlError> {
    let geo = RrlGeometry::of(img);
    if payload.len() > geo.capacity_bits() {
        return Err(RrlError::CapacityExceeded {
            requested: payload.len(),
            capacity: geo.capacity_bits(),
        });
    }
    let mut out = img.clone();
    let mut displaced = Vec::new();
    for (block, byte) in bits_to_bytes(payload).into_iter().enumerate() {
        let mut rows = read_lsb_rows(img, &geo, block);
        let lost = rotate_in(&mut rows, byte);
        write_lsb_rows(&mut out, &geo, block, &rows);
        displaced.push((block as u32, lost));
    }
    let record = RestorationRecord {
        block_size: BLOCK_SIZE as u8,
        displaced,
    };
    Ok((out, record))
}

/// Reads the framed payload from the top LSB row of consecutive blocks and
/// undoes the rotation.
///
/// The payload must be a frame from [`crate::codec::frame_encode`]: its
/// length prefix tells how many blocks were used. The returned bits are the
/// whole frame without byte padding; integrity is checked by
/// [`crate::codec::frame_decode`].
pub fn rrl_extract(
    wimg: &GrayImage,
    record: Option<&RestorationRecord>,
) -> Result<RrlExtraction, RrlError> {
    let geo = RrlGeometry::of(wimg);
    let blocks = geo.block_count();
    if blocks < FRAME_PREFIX_BYTES {
        return Err(RrlError::MalformedStream(format!(
            "{blocks} blocks cannot hold a frame header"
        )));
    }
    let prefix: Vec<u8> = (0..FRAME_PREFIX_BYTES)
        .map(|b| read_lsb_rows(wimg, &geo, b)[0])
        .collect();
    let total_bits = frame_total_bits(&bytes_to_bits(&prefix))
        .map_err(|e| RrlError::MalformedStream(e.to_string()))?;
    let used = total_bits.div_ceil(8);
    if used > blocks {
        return Err(RrlError::MalformedStream(format!(
            "frame of {total_bits} bits needs {used} blocks, image has {blocks}"
        )));
    }
    if let Some(rec) = record {
        rec.validate()?;
        if rec.used_block_count() != used {
            return Err(RrlError::RecordMismatch(format!(
                "record covers {} blocks, frame uses {used}",
                rec.used_block_count()
            )));
        }
        if rec
            .displaced
            .iter()
            .enumerate()
            .any(|(i, &(b, _))| b as usize != i)
        {
            return Err(RrlError::RecordMismatch(
                "record blocks are not the leading blocks".into(),
            ));
        }
    }

    let mut restored = wimg.clone();
    let mut bytes = Vec::with_capacity(used);
    for block in 0..used {
        let mut rows = read_lsb_rows(wimg, &geo, block);
        let lost = record.map(|r| r.displaced[block].1);
        bytes.push(rotate_out(&mut rows, lost));
        write_lsb_rows(&mut restored, &geo, block, &rows);
    }
    let mut payload = bytes_to_bits(&bytes);
    payload.truncate(total_bits);
    Ok(RrlExtraction {
        payload,
        restored,
        mode: if record.is_some() {
            RestoreMode::Exact
        } else {
            RestoreMode::Literal
        },
    })
}
