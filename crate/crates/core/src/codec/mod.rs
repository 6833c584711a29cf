//! Bit-exact auxiliary encodings shared by the embedders.
//!
//! All multi-byte fields are big-endian and bit sequences are written most
//! significant bit first.

mod bits;
mod crc;
mod frame;
mod prng;
mod rle;

use thiserror::Error;

pub use bits::{bits_to_bytes, bytes_to_bits, BitReader, BitWriter, Bits};
pub use crc::crc32;
pub use frame::{
    frame_decode, frame_encode, frame_total_bits, FRAME_HEADER_BITS, FRAME_MAGIC, FRAME_VERSION,
};
pub use prng::{prng_bits, XorShift64Star};
pub use rle::{rle_decode, rle_encode, rle_encoded_len, rle_runs, RleBitstream};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("bad frame magic {0:#06x}")]
    BadMagic(u16),
    #[error("unsupported frame version {0}")]
    BadVersion(u8),
    #[error("crc mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    CrcMismatch { stored: u32, computed: u32 },
    #[error("truncated: need {needed} bits, have {available}")]
    Truncated { needed: usize, available: usize },
    #[error("malformed run-length stream: {0}")]
    Malformed(String),
    #[error("prng seed must be nonzero")]
    ZeroSeed,
    #[error("payload of {0} bits is too long to frame")]
    TooLong(usize),
}
