//! Byte-run-length coding of bit sequences with a raw fallback.
//!
//! Wire form: one flag bit, then either the original bits verbatim
//! (`flag = 1`) or a sequence of 8-bit run lengths (`flag = 0`). Runs
//! alternate in value starting with a run of zeros. A length byte of 0 adds
//! 255 to the current run and continues into the next byte, so a run of `r`
//! bits costs `ceil(r / 255)` bytes. A leading run of ones cannot be
//! expressed and always takes the raw form.

use super::{BitReader, BitWriter, Bits, CodecError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RleBitstream {
    Raw(Bits),
    Runs(Vec<u8>),
}

impl RleBitstream {
    /// Encoded size including the flag bit.
    pub fn bit_len(&self) -> usize {
        1 + match self {
            RleBitstream::Raw(bits) => bits.len(),
            RleBitstream::Runs(bytes) => 8 * bytes.len(),
        }
    }

    pub fn is_raw(&self) -> bool {
        matches!(self, RleBitstream::Raw(_))
    }

    pub fn to_bits(&self) -> Bits {
        let mut w = BitWriter::new();
        match self {
            RleBitstream::Raw(bits) => {
                w.push_bit(true);
                w.push_bits(bits);
            }
            RleBitstream::Runs(bytes) => {
                w.push_bit(false);
                for &b in bytes {
                    w.push_uint(b.into(), 8);
                }
            }
        }
        w.into_bits()
    }
}

fn run_lengths(bits: &[bool]) -> impl Iterator<Item = usize> + '_ {
    let mut rest = bits;
    std::iter::from_fn(move || {
        let first = *rest.first()?;
        let n = rest.iter().take_while(|&&b| b == first).count();
        rest = &rest[n..];
        Some(n)
    })
}

fn run_cost_bytes(run: usize) -> usize {
    run.div_ceil(255)
}

/// Size in bits of `rle_encode(bits).to_bits()`, without building it.
pub fn rle_encoded_len(bits: &[bool]) -> usize {
    if bits.first() == Some(&true) {
        return 1 + bits.len();
    }
    let body = 8 * run_lengths(bits).map(run_cost_bytes).sum::<usize>();
    1 + body.min(bits.len())
}

/// Run-length bytes for `bits`, or `None` when the input starts with a one.
/// No size comparison against the raw form is made.
pub fn rle_runs(bits: &[bool]) -> Option<Vec<u8>> {
    if bits.first() == Some(&true) {
        return None;
    }
    let mut bytes = Vec::new();
    for mut run in run_lengths(bits) {
        while run > 255 {
            bytes.push(0);
            run -= 255;
        }
        bytes.push(run as u8);
    }
    Some(bytes)
}

pub fn rle_encode(bits: &[bool]) -> RleBitstream {
    match rle_runs(bits) {
        Some(bytes) if 8 * bytes.len() <= bits.len() => RleBitstream::Runs(bytes),
        _ => RleBitstream::Raw(bits.to_vec()),
    }
}

/// Decodes `original_len` bits from the front of `stream`. Returns the bits
/// and the number of stream bits consumed, flag included.
pub fn rle_decode(stream: &[bool], original_len: usize) -> Result<(Bits, usize), CodecError> {
    let mut r = BitReader::new(stream);
    if r.read_bit()? {
        let bits = r.read_bits(original_len)?.to_vec();
        return Ok((bits, r.position()));
    }
    let mut out = Vec::with_capacity(original_len);
    let mut value = false;
    while out.len() < original_len {
        let mut run = 0usize;
        loop {
            match r.read_uint(8)? {
                0 => run += 255,
                n => {
                    run += n as usize;
                    break;
                }
            }
        }
        if out.len() + run > original_len {
            return Err(CodecError::Malformed(format!(
                "runs exceed declared length {original_len}"
            )));
        }
        out.resize(out.len() + run, value);
        value = !value;
    }
    Ok((out, r.position()))
}
