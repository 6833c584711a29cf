use super::{Bits, CodecError};

/// The xorshift64* generator used to produce reproducible benchmark payloads.
#[derive(Debug, Clone)]
pub struct XorShift64Star {
    state: u64,
}

impl XorShift64Star {
    const MULTIPLIER: u64 = 2_685_821_657_736_338_717;

    pub fn new(seed: u64) -> Result<Self, CodecError> {
        if seed == 0 {
            return Err(CodecError::ZeroSeed);
        }
        Ok(Self { state: seed })
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut s = self.state;
        s ^= s >> 12;
        s ^= s << 25;
        s ^= s >> 27;
        self.state = s;
        s.wrapping_mul(Self::MULTIPLIER)
    }
}

/// `count` pseudorandom bits; each 64-bit output is emitted MSB first.
pub fn prng_bits(seed: u64, count: usize) -> Result<Bits, CodecError> {
    let mut rng = XorShift64Star::new(seed)?;
    let mut bits = Vec::with_capacity(count);
    while bits.len() < count {
        let word = rng.next_u64();
        let take = (count - bits.len()).min(64);
        bits.extend((0..take).map(|k| (word >> (63 - k)) & 1 == 1));
    }
    Ok(bits)
}
