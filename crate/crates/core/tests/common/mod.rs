//! Deterministic test images.

#![allow(dead_code)]

use std::f64::consts::TAU;

use revmark::codec::XorShift64Star;
use revmark::GrayImage;

pub fn rng(seed: u64) -> XorShift64Star {
    XorShift64Star::new(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1).unwrap()
}

pub fn unit(rng: &mut XorShift64Star) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

pub fn random_bits(rng: &mut XorShift64Star, n: usize) -> Vec<bool> {
    (0..n).map(|_| rng.next_u64() >> 63 == 1).collect()
}

/// Uniform noise image.
pub fn noise_image(width: usize, height: usize, seed: u64) -> GrayImage {
    let mut r = rng(seed);
    GrayImage::from_fn(width, height, |_, _| (r.next_u64() >> 56) as u8)
}

/// Sum of a few random low-frequency waves plus uniform noise of amplitude
/// `noise`, clamped to `[lo, hi]`.
pub fn smooth_texture(
    width: usize,
    height: usize,
    seed: u64,
    noise: f64,
    (lo, hi): (f64, f64),
) -> GrayImage {
    let mut r = rng(seed);
    let mid = (lo + hi) / 2.0;
    let amp = (hi - lo) / 2.0;
    let waves: Vec<(f64, f64, f64, f64)> = (0..4)
        .map(|_| {
            let fx = (unit(&mut r) - 0.5) * 3.0 / width as f64;
            let fy = (unit(&mut r) - 0.5) * 3.0 / height as f64;
            (fx, fy, unit(&mut r) * TAU, 0.15 + 0.35 * unit(&mut r))
        })
        .collect();
    let norm: f64 = waves.iter().map(|w| w.3).sum();
    GrayImage::from_fn(width, height, |row, col| {
        let s: f64 = waves
            .iter()
            .map(|&(fx, fy, ph, a)| a * (TAU * (fx * col as f64 + fy * row as f64) + ph).sin())
            .sum();
        let n = (unit(&mut r) * 2.0 - 1.0) * noise;
        (mid + amp * s / norm + n).round().clamp(lo, hi) as u8
    })
}

/// LSB rows of 8×8 block `block` (raster block order), leftmost pixel in the
/// most significant bit.
pub fn block_lsb_rows(img: &GrayImage, block: usize) -> [u8; 8] {
    let cols = img.width() / 8;
    let (top, left) = ((block / cols) * 8, (block % cols) * 8);
    let mut rows = [0u8; 8];
    for (k, row) in rows.iter_mut().enumerate() {
        for j in 0..8 {
            *row = (*row << 1) | (img.get(top + k, left + j) & 1);
        }
    }
    rows
}
