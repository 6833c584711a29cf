//! Payload framing: `magic(16) | version(8) | data_bits(32) | crc32(32) | data`.

use super::{bits_to_bytes, crc32, BitReader, BitWriter, Bits, CodecError};

pub const FRAME_MAGIC: u16 = 0x5257;
pub const FRAME_VERSION: u8 = 0x01;
pub const FRAME_HEADER_BITS: usize = 88;

/// Bits needed to learn a frame's total length (magic, version, length).
const LENGTH_PREFIX_BITS: usize = 56;

pub fn frame_encode(data: &[bool]) -> Result<Bits, CodecError> {
    let len = u32::try_from(data.len()).map_err(|_| CodecError::TooLong(data.len()))?;
    let mut w = BitWriter::new();
    w.push_uint(FRAME_MAGIC.into(), 16);
    w.push_uint(FRAME_VERSION.into(), 8);
    w.push_uint(len.into(), 32);
    w.push_uint(crc32(&bits_to_bytes(data)).into(), 32);
    w.push_bits(data);
    Ok(w.into_bits())
}

/// Total frame length in bits, parsed from the leading magic/version/length
/// fields. Only the first 56 bits are inspected.
pub fn frame_total_bits(bits: &[bool]) -> Result<usize, CodecError> {
    let mut r = BitReader::new(bits);
    let magic = r.read_uint(16)? as u16;
    if magic != FRAME_MAGIC {
        return Err(CodecError::BadMagic(magic));
    }
    let version = r.read_uint(8)? as u8;
    if version != FRAME_VERSION {
        return Err(CodecError::BadVersion(version));
    }
    debug_assert_eq!(r.position() + 32, LENGTH_PREFIX_BITS);
    let data_bits = r.read_uint(32)? as usize;
    Ok(FRAME_HEADER_BITS + data_bits)
}

/// Parses and verifies a frame. Bits past the end of the frame (byte padding)
/// are ignored.
pub fn frame_decode(bits: &[bool]) -> Result<Bits, CodecError> {
    let total = frame_total_bits(bits)?;
    if bits.len() < total {
        return Err(CodecError::Truncated {
            needed: total,
            available: bits.len(),
        });
    }
    let mut r = BitReader::new(bits);
    r.read_bits(LENGTH_PREFIX_BITS)?;
    let stored = r.read_uint(32)? as u32;
    let data = r.read_bits(total - FRAME_HEADER_BITS)?;
    let computed = crc32(&bits_to_bytes(data));
    if stored != computed {
        return Err(CodecError::CrcMismatch { stored, computed });
    }
    Ok(data.to_vec())
}
