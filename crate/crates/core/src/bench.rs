//! Payload sweep comparing DE and RRL on one host image.
//!
//! For every (scheme, payload) pair the harness generates a reproducible
//! payload, frames it, embeds it, scores the watermarked image against the
//! host, extracts, and checks that both the payload and the host come back
//! bit-exact. Embed and extract times are medians over several repeats.

use std::fmt;
use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use thiserror::Error;

use crate::codec::{frame_decode, frame_encode, prng_bits, CodecError, FRAME_HEADER_BITS};
use crate::de::{de_capacity, de_embed, de_extract, DeError};
use crate::image::GrayImage;
use crate::metrics::{psnr, ssim, MetricError, Psnr, SsimParams};
use crate::rrl::{rrl_capacity, rrl_embed, rrl_extract, RrlError};

/// Payload sizes of the reference sweep, in bits.
pub const TABLE_PAYLOADS: [usize; 10] =
    [128, 256, 512, 1024, 2048, 4096, 8192, 16384, 32768, 65536];

pub const CSV_HEADER: &str = "payload_bits,scheme,ssim,psnr_db,embed_ms,extract_ms,capped";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    De,
    Rrl,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::De => "DE",
            Scheme::Rrl => "RRL",
        })
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "de" => Ok(Scheme::De),
            "rrl" => Ok(Scheme::Rrl),
            other => Err(format!("unknown scheme {other:?} (expected de or rrl)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    De(#[from] DeError),
    #[error(transparent)]
    Rrl(#[from] RrlError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("round trip failed for {scheme} at {payload_bits} bits: {what}")]
    RoundTrip {
        scheme: Scheme,
        payload_bits: usize,
        what: &'static str,
    },
    #[error("repeats must be at least 1")]
    NoRepeats,
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub payloads: Vec<usize>,
    pub schemes: Vec<Scheme>,
    pub seed: u64,
    pub repeats: usize,
    pub ssim: SsimParams,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            payloads: TABLE_PAYLOADS.to_vec(),
            schemes: vec![Scheme::De, Scheme::Rrl],
            seed: 1,
            repeats: 5,
            ssim: SsimParams::default(),
        }
    }
}

/// One measurement of the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    /// Data bits actually embedded (after capping).
    pub payload_bits: usize,
    /// Data bits asked for.
    pub requested_bits: usize,
    pub scheme: Scheme,
    pub ssim: f64,
    pub psnr: Psnr,
    pub embed_ms: f64,
    pub extract_ms: f64,
    pub capped: bool,
}

impl BenchRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{:.8},{},{:.3},{:.3},{}",
            self.payload_bits,
            self.scheme,
            self.ssim,
            self.psnr,
            self.embed_ms,
            self.extract_ms,
            self.capped
        )
    }
}

/// Largest unframed payload a scheme can carry in `img`.
pub fn data_capacity(img: &GrayImage, scheme: Scheme) -> usize {
    let raw = match scheme {
        Scheme::De => de_capacity(img),
        Scheme::Rrl => rrl_capacity(img),
    };
    raw.saturating_sub(FRAME_HEADER_BITS)
}

fn median(mut samples: Vec<f64>) -> f64 {
    samples.sort_by(f64::total_cmp);
    let mid = samples.len() / 2;
    if samples.len() % 2 == 1 {
        samples[mid]
    } else {
        (samples[mid - 1] + samples[mid]) / 2.0
    }
}

/// Runs `op` `repeats` times; returns the last result and the median time.
fn timed<T, E>(repeats: usize, mut op: impl FnMut() -> Result<T, E>) -> Result<(T, f64), E> {
    let mut times = Vec::with_capacity(repeats);
    let mut last = None;
    for _ in 0..repeats {
        let start = Instant::now();
        let out = op()?;
        times.push(start.elapsed().as_secs_f64() * 1e3);
        last = Some(out);
    }
    Ok((last.expect("repeats >= 1"), median(times)))
}

pub fn run_bench(img: &GrayImage, config: &BenchConfig) -> Result<Vec<BenchRow>, BenchError> {
    if config.repeats == 0 {
        return Err(BenchError::NoRepeats);
    }
    let mut schemes = config.schemes.clone();
    schemes.sort();
    schemes.dedup();
    let mut payloads = config.payloads.clone();
    payloads.sort_unstable();
    payloads.dedup();

    let mut rows = Vec::new();
    for &scheme in &schemes {
        let capacity = data_capacity(img, scheme);
        for &requested in &payloads {
            rows.push(run_one(img, config, scheme, requested, capacity)?);
        }
    }
    Ok(rows)
}

fn run_one(
    img: &GrayImage,
    config: &BenchConfig,
    scheme: Scheme,
    requested: usize,
    capacity: usize,
) -> Result<BenchRow, BenchError> {
    let payload_bits = requested.min(capacity);
    let data = prng_bits(config.seed ^ requested as u64, payload_bits)?;
    let frame = frame_encode(&data)?;
    let fail = |what| BenchError::RoundTrip {
        scheme,
        payload_bits,
        what,
    };

    let (marked, extracted, restored, embed_ms, extract_ms) = match scheme {
        Scheme::De => {
            let (marked, embed_ms) = timed(config.repeats, || de_embed(img, &frame))?;
            let ((bits, restored), extract_ms) = timed(config.repeats, || de_extract(&marked))?;
            (marked, bits, restored, embed_ms, extract_ms)
        }
        Scheme::Rrl => {
            let ((marked, record), embed_ms) = timed(config.repeats, || rrl_embed(img, &frame))?;
            let (out, extract_ms) = timed(config.repeats, || rrl_extract(&marked, Some(&record)))?;
            (marked, out.payload, out.restored, embed_ms, extract_ms)
        }
    };
    if extracted != frame {
        return Err(fail("frame bits differ"));
    }
    if frame_decode(&extracted)? != data {
        return Err(fail("payload differs"));
    }
    if restored != *img {
        return Err(fail("restored image differs"));
    }

    Ok(BenchRow {
        payload_bits,
        requested_bits: requested,
        scheme,
        ssim: ssim(img, &marked, &config.ssim)?,
        psnr: psnr(img, &marked)?,
        embed_ms,
        extract_ms,
        capped: payload_bits < requested,
    })
}

pub fn csv_string(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}

pub fn write_csv(rows: &[BenchRow], path: impl AsRef<Path>) -> Result<(), BenchError> {
    fs::write(path, csv_string(rows))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(ssim: f64) -> BenchRow {
        BenchRow {
            payload_bits: 128,
            requested_bits: 128,
            scheme: Scheme::Rrl,
            ssim,
            psnr: Psnr::Infinite,
            embed_ms: 0.25,
            extract_ms: 1.0,
            capped: false,
        }
    }

    #[test]
    fn empty_csv_is_header_only() {
        assert_eq!(csv_string(&[]), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn csv_field_order_and_precision() {
        let text = csv_string(&[row(1.0)]);
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1], "128,RRL,1.00000000,inf,0.250,1.000,false");
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("de".parse::<Scheme>(), Ok(Scheme::De));
        assert_eq!("RRL".parse::<Scheme>(), Ok(Scheme::Rrl));
        assert!("lsb".parse::<Scheme>().is_err());
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn write_csv_to_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        write_csv(&[row(0.5)], &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(CSV_HEADER));
        assert!(text.contains("0.50000000"));
        assert!(write_csv(&[], dir.path().join("no/such/dir.csv")).is_err());
    }

    #[test]
    fn small_sweep_round_trips_and_caps() {
        let img = GrayImage::from_fn(64, 64, |r, c| (60 + (r + c) / 2) as u8);
        let config = BenchConfig {
            payloads: vec![64, 10_000],
            repeats: 1,
            ..BenchConfig::default()
        };
        let rows = run_bench(&img, &config).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].scheme, Scheme::De);
        assert!(!rows[0].capped);
        assert!(rows[1].capped);
        assert_eq!(rows[3].payload_bits, 512 - 88);
        assert!(rows[3].capped);
    }
}
