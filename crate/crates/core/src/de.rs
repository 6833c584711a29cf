//! Difference expansion (DE) reversible watermarking.
//!
//! Each pair of horizontally adjacent pixels `(x, y)` is mapped to an integer
//! average `α = ⌊(x + y) / 2⌋` and a difference `δ = x − y`. A pair is
//! *expandable* when `δ_w = 2δ + i` stays inside the invertible region for
//! both bit values, and *changeable* when its LSB can be overwritten the same
//! way. Every changeable pair carries exactly one bit of the embedded stream:
//! expanded pairs by [`expand_embed`], the rest by [`lsb_replace_diff`].
//!
//! Stream layout, written across all changeable pairs in raster order:
//!
//! ```text
//! magic 0xD1F0 (16) | map segment bits (24) | payload bits (24)
//! map segment: invert flag (1) | run-length coded map
//! saved true LSBs of every non-expanded pair, in order
//! payload
//! zero padding up to the number of changeable pairs
//! ```
//!
//! The run-length coder cannot start with a run of ones, so the map segment
//! begins with a flag that, when set, means the complement of the map was
//! coded. Changeability is invariant under both embedding operations, so the
//! extractor recovers the same set of carrier pairs from the watermarked
//! image alone.

use thiserror::Error;

use crate::codec::{rle_decode, rle_encode, rle_encoded_len, BitReader, BitWriter, Bits};
use crate::image::{GrayImage, BIT_DEPTH};

pub const DE_MAGIC: u16 = 0xD1F0;
pub const DE_HEADER_BITS: usize = 64;

const LENGTH_FIELD_BITS: u32 = 24;
const MAX_FIELD: usize = (1 << LENGTH_FIELD_BITS) - 1;
const MAX_PLAN_ITERATIONS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DeError {
    #[error("payload of {requested} bits exceeds the embedding capacity")]
    CapacityExceeded { requested: usize },
    #[error("malformed stream: {0}")]
    MalformedStream(String),
    #[error("pair (α = {alpha}, δ = {delta}) maps outside the pixel range")]
    OutOfRange { alpha: i32, delta: i32 },
}

/// Integer average and difference of a pixel pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DiffPair {
    pub alpha: i32,
    pub delta: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeClassification {
    /// Upper limit of the invertible region for this average.
    pub bound: i32,
    pub expandable: bool,
    pub changeable: bool,
}

pub fn forward_transform(x: u8, y: u8) -> DiffPair {
    let (x, y) = (i32::from(x), i32::from(y));
    DiffPair {
        alpha: (x + y).div_euclid(2),
        delta: x - y,
    }
}

/// Inverts [`forward_transform`]. Floors round toward negative infinity, so
/// `(α, −1)` maps to `(α, α + 1)`.
pub fn inverse_transform(alpha: i32, delta: i32) -> Result<(u8, u8), DeError> {
    let x = alpha + (delta + 1).div_euclid(2);
    let y = alpha - delta.div_euclid(2);
    match (u8::try_from(x), u8::try_from(y)) {
        (Ok(x), Ok(y)) => Ok((x, y)),
        _ => Err(DeError::OutOfRange { alpha, delta }),
    }
}

/// `min(2(2^n − 1 − α), 2α + 1)`: the largest `|δ|` that inverts into range.
pub fn region_bound(alpha: i32, bits: u32) -> i32 {
    let max = (1i32 << bits) - 1;
    (2 * (max - alpha)).min(2 * alpha + 1)
}

pub fn classify(alpha: i32, delta: i32, bits: u32) -> DeClassification {
    let bound = region_bound(alpha, bits);
    let fits = |base: i32| (0..=1).all(|i| (base + i).abs() <= bound);
    DeClassification {
        bound,
        expandable: fits(2 * delta),
        changeable: fits(2 * delta.div_euclid(2)),
    }
}

pub fn expand_embed(delta: i32, bit: bool) -> i32 {
    2 * delta + i32::from(bit)
}

/// Splits a watermarked difference into the original difference and the bit.
pub fn de_recover(watermarked: i32) -> (i32, bool) {
    (watermarked.div_euclid(2), watermarked.rem_euclid(2) == 1)
}

/// Overwrites the LSB of `delta` with `bit`, returning the new difference and
/// the bit that was replaced.
pub fn lsb_replace_diff(delta: i32, bit: bool) -> (i32, bool) {
    (
        2 * delta.div_euclid(2) + i32::from(bit),
        delta.rem_euclid(2) == 1,
    )
}

/// One bit per changeable pair in raster order: `true` = expanded,
/// `false` = LSB replaced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocationMap {
    bits: Bits,
}

impl LocationMap {
    pub fn new(bits: Bits) -> Self {
        Self { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn expanded_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Invert flag followed by the run-length coded map (or its complement).
    pub fn encode_segment(&self) -> Bits {
        let invert = self.bits.first() == Some(&true);
        let coded: Bits = self.bits.iter().map(|&b| b ^ invert).collect();
        let mut seg = vec![invert];
        seg.extend(rle_encode(&coded).to_bits());
        seg
    }

    pub fn segment_len(&self) -> usize {
        let invert = self.bits.first() == Some(&true);
        if invert {
            let coded: Bits = self.bits.iter().map(|&b| !b).collect();
            1 + rle_encoded_len(&coded)
        } else {
            1 + rle_encoded_len(&self.bits)
        }
    }

    /// Parses a map segment for `len` changeable pairs; returns the map and
    /// the number of bits consumed.
    pub fn decode_segment(segment: &[bool], len: usize) -> Result<(Self, usize), DeError> {
        let (&invert, body) = segment
            .split_first()
            .ok_or_else(|| DeError::MalformedStream("empty map segment".into()))?;
        let (coded, used) =
            rle_decode(body, len).map_err(|e| DeError::MalformedStream(e.to_string()))?;
        let bits = coded.into_iter().map(|b| b ^ invert).collect();
        Ok((Self { bits }, used + 1))
    }
}

/// Per-image classification shared by embedding, extraction and capacity.
struct PairScan {
    /// Sample index of `x` and the pair's transform, for changeable pairs only.
    carriers: Vec<(usize, DiffPair)>,
    /// Indices into `carriers` of expandable pairs, ascending.
    expandable: Vec<usize>,
}

impl PairScan {
    fn new(img: &GrayImage) -> Self {
        let mut carriers = Vec::new();
        let mut expandable = Vec::new();
        let width = img.width();
        for row in 0..img.height() {
            for col in (0..width - width % 2).step_by(2) {
                let idx = row * width + col;
                let s = img.samples();
                let pair = forward_transform(s[idx], s[idx + 1]);
                let class = classify(pair.alpha, pair.delta, BIT_DEPTH);
                if class.changeable {
                    if class.expandable {
                        expandable.push(carriers.len());
                    }
                    carriers.push((idx, pair));
                }
            }
        }
        Self {
            carriers,
            expandable,
        }
    }

    fn changeable_count(&self) -> usize {
        self.carriers.len()
    }

    /// Greedy map expanding the first `expanded` expandable pairs.
    fn location_map(&self, expanded: usize) -> LocationMap {
        let mut bits = vec![false; self.carriers.len()];
        for &slot in &self.expandable[..expanded] {
            bits[slot] = true;
        }
        LocationMap::new(bits)
    }

    /// Number of pairs to expand so that header, map, saved LSBs and payload
    /// fill the carrier pairs. Iterates because the coded map size depends
    /// on the expansion count.
    fn plan(&self, payload_bits: usize) -> Result<usize, DeError> {
        let exceeded = DeError::CapacityExceeded {
            requested: payload_bits,
        };
        if payload_bits > MAX_FIELD {
            return Err(exceeded);
        }
        let mut expanded = DE_HEADER_BITS + payload_bits;
        for _ in 0..MAX_PLAN_ITERATIONS {
            if expanded > self.expandable.len() {
                return Err(exceeded);
            }
            let seg = self.location_map(expanded).segment_len();
            if seg > MAX_FIELD {
                return Err(exceeded);
            }
            let needed = DE_HEADER_BITS + seg + payload_bits;
            if expanded >= needed {
                return Ok(expanded);
            }
            expanded = needed;
        }
        Err(exceeded)
    }
}

/// Summary of how a payload would be embedded into an image.
#[derive(Debug, Clone)]
pub struct EmbedPlan {
    pub changeable: usize,
    pub expandable: usize,
    pub map: LocationMap,
    pub map_segment_bits: usize,
}

impl EmbedPlan {
    pub fn expanded(&self) -> usize {
        self.map.expanded_count()
    }
}

pub fn de_plan(img: &GrayImage, payload_bits: usize) -> Result<EmbedPlan, DeError> {
    let scan = PairScan::new(img);
    let expanded = scan.plan(payload_bits)?;
    let map = scan.location_map(expanded);
    Ok(EmbedPlan {
        changeable: scan.changeable_count(),
        expandable: scan.expandable.len(),
        map_segment_bits: map.segment_len(),
        map,
    })
}

/// Largest payload, in bits, that [`de_embed`] accepts for `img`. Returns 0
/// when nothing fits, including when even an empty payload is refused.
pub fn de_capacity(img: &GrayImage) -> usize {
    let scan = PairScan::new(img);
    let fits = |p: usize| scan.plan(p).is_ok();
    if !fits(0) {
        return 0;
    }
    let all = scan.expandable.len();
    let mut hi = all
        .saturating_sub(DE_HEADER_BITS + scan.location_map(all).segment_len())
        .min(MAX_FIELD);
    if !fits(hi) {
        // Largest fitting value below `hi`, assuming rough monotonicity.
        let mut lo = 0;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if fits(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi = lo;
    }
    while fits(hi + 1) {
        hi += 1;
    }
    hi
}

pub fn de_embed(img: &GrayImage, payload: &[bool]) -> Result<GrayImage, DeError> {
    let scan = PairScan::new(img);
    let expanded = scan.plan(payload.len())?;
    let map = scan.location_map(expanded);
    let segment = map.encode_segment();

    let mut w = BitWriter::new();
    w.push_uint(DE_MAGIC.into(), 16);
    w.push_uint(segment.len() as u64, LENGTH_FIELD_BITS);
    w.push_uint(payload.len() as u64, LENGTH_FIELD_BITS);
    w.push_bits(&segment);
    for (&(_, pair), &is_expanded) in scan.carriers.iter().zip(map.bits()) {
        if !is_expanded {
            w.push_bit(pair.delta.rem_euclid(2) == 1);
        }
    }
    w.push_bits(payload);
    let mut stream = w.into_bits();
    debug_assert!(stream.len() <= scan.changeable_count());
    stream.resize(scan.changeable_count(), false);

    let mut out = img.clone();
    let samples = out.samples_mut();
    for ((&(idx, pair), &is_expanded), &bit) in scan.carriers.iter().zip(map.bits()).zip(&stream) {
        let delta = if is_expanded {
            expand_embed(pair.delta, bit)
        } else {
            lsb_replace_diff(pair.delta, bit).0
        };
        let (x, y) = inverse_transform(pair.alpha, delta)?;
        samples[idx] = x;
        samples[idx + 1] = y;
    }
    Ok(out)
}

/// Recovers the payload and the bit-exact original from a DE-watermarked
/// image.
pub fn de_extract(wimg: &GrayImage) -> Result<(Bits, GrayImage), DeError> {
    let malformed = |msg: &str| DeError::MalformedStream(msg.to_string());
    let scan = PairScan::new(wimg);
    let total = scan.changeable_count();
    let stream: Bits = scan
        .carriers
        .iter()
        .map(|&(_, pair)| pair.delta.rem_euclid(2) == 1)
        .collect();

    let mut r = BitReader::new(&stream);
    let header = (|| {
        Some((
            r.read_uint(16).ok()?,
            r.read_uint(24).ok()?,
            r.read_uint(24).ok()?,
        ))
    })();
    let (magic, seg_bits, payload_bits) =
        header.ok_or_else(|| malformed("too few changeable pairs for a header"))?;
    if magic != u64::from(DE_MAGIC) {
        return Err(malformed("magic mismatch"));
    }
    let (seg_bits, payload_bits) = (seg_bits as usize, payload_bits as usize);
    if DE_HEADER_BITS + seg_bits + payload_bits > total {
        return Err(malformed("declared lengths exceed the carrier count"));
    }
    let segment = &stream[DE_HEADER_BITS..DE_HEADER_BITS + seg_bits];
    let (map, used) = LocationMap::decode_segment(segment, total)?;
    if used != seg_bits {
        return Err(malformed("map segment length mismatch"));
    }
    let saved_start = DE_HEADER_BITS + seg_bits;
    let saved_count = total - map.expanded_count();
    let payload_start = saved_start + saved_count;
    if payload_start + payload_bits > total {
        return Err(malformed("saved LSBs and payload exceed the carrier count"));
    }
    let mut saved = stream[saved_start..payload_start].iter();
    let payload = stream[payload_start..payload_start + payload_bits].to_vec();

    let mut restored = wimg.clone();
    let samples = restored.samples_mut();
    for (&(idx, pair), &is_expanded) in scan.carriers.iter().zip(map.bits()) {
        let delta = if is_expanded {
            de_recover(pair.delta).0
        } else {
            let bit = *saved.next().expect("saved count matches map");
            lsb_replace_diff(pair.delta, bit).0
        };
        let (x, y) = inverse_transform(pair.alpha, delta)
            .map_err(|_| malformed("restored pair out of range"))?;
        samples[idx] = x;
        samples[idx + 1] = y;
    }
    Ok((payload, restored))
}
