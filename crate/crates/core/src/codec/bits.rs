use super::CodecError;

/// A bit sequence, one `bool` per bit, in transmission order.
pub type Bits = Vec<bool>;

/// Packs bits MSB-first; the final byte is zero-padded.
pub fn bits_to_bytes(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | (u8::from(b) << (7 - i)))
        })
        .collect()
}

pub fn bytes_to_bits(bytes: &[u8]) -> Bits {
    bytes
        .iter()
        .flat_map(|&byte| (0..8).rev().map(move |k| (byte >> k) & 1 == 1))
        .collect()
}

#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    bits: Bits,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn push_uint(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        debug_assert!(
            width == 64 || value >> width == 0,
            "{value} does not fit in {width} bits"
        );
        for k in (0..width).rev() {
            self.bits.push((value >> k) & 1 == 1);
        }
    }

    pub fn push_bit(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn push_bits(&mut self, bits: &[bool]) {
        self.bits.extend_from_slice(bits);
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn into_bits(self) -> Bits {
        self.bits
    }
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a [bool]) -> Self {
        Self { bits, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }

    pub fn read_bits(&mut self, count: usize) -> Result<&'a [bool], CodecError> {
        if count > self.remaining() {
            return Err(CodecError::Truncated {
                needed: self.pos + count,
                available: self.bits.len(),
            });
        }
        let out = &self.bits[self.pos..self.pos + count];
        self.pos += count;
        Ok(out)
    }

    pub fn read_bit(&mut self) -> Result<bool, CodecError> {
        Ok(self.read_bits(1)?[0])
    }

    pub fn read_uint(&mut self, width: u32) -> Result<u64, CodecError> {
        debug_assert!(width <= 64);
        let bits = self.read_bits(width as usize)?;
        Ok(bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b)))
    }
}
