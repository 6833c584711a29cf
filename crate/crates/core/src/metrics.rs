//! SSIM and PSNR between two equally sized images.
//!
//! SSIM combines luminance, contrast and structure comparisons:
//!
//! ```text
//!            (2·μx·μy + C1) · (2·σxy + C2)
//! SSIM = ─────────────────────────────────────
//!        (μx² + μy² + C1) · (σx² + σy² + C2)
//! ```
//!
//! with `C1 = (K1·L)²`, `C2 = (K2·L)²`. Variances and the covariance are
//! normalized by `N − 1`. All sums run in raster order in `f64`, so results
//! are reproducible bit for bit.

use std::fmt;

use thiserror::Error;

use crate::image::GrayImage;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("image too small: {0}")]
    TooSmall(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsimMode {
    /// One set of statistics over the whole image.
    Global,
    /// Mean of SSIM over every `size`×`size` window, stride 1, uniform
    /// weights.
    Windowed { size: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimParams {
    pub k1: f64,
    pub k2: f64,
    /// Dynamic range `L` of the samples.
    pub dynamic_range: f64,
    pub mode: SsimMode,
}

impl Default for SsimParams {
    fn default() -> Self {
        Self {
            k1: 0.01,
            k2: 0.03,
            dynamic_range: 255.0,
            mode: SsimMode::Global,
        }
    }
}

impl SsimParams {
    pub fn windowed(size: usize) -> Self {
        Self {
            mode: SsimMode::Windowed { size },
            ..Self::default()
        }
    }

    pub fn c1(&self) -> f64 {
        (self.k1 * self.dynamic_range).powi(2)
    }

    pub fn c2(&self) -> f64 {
        (self.k2 * self.dynamic_range).powi(2)
    }
}

/// Sample statistics of a signal pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimStats {
    pub mu_x: f64,
    pub mu_y: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub cov_xy: f64,
}

impl SsimStats {
    /// Two-pass statistics over paired samples. Needs at least two samples.
    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: Iterator<Item = (u8, u8)> + Clone,
    {
        let (mut n, mut sum_x, mut sum_y) = (0usize, 0.0, 0.0);
        for (x, y) in pairs.clone() {
            n += 1;
            sum_x += f64::from(x);
            sum_y += f64::from(y);
        }
        debug_assert!(n >= 2);
        let mu_x = sum_x / n as f64;
        let mu_y = sum_y / n as f64;
        let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
        for (x, y) in pairs {
            let dx = f64::from(x) - mu_x;
            let dy = f64::from(y) - mu_y;
            sxx += dx * dx;
            syy += dy * dy;
            sxy += dx * dy;
        }
        let norm = (n - 1) as f64;
        Self {
            mu_x,
            mu_y,
            var_x: sxx / norm,
            var_y: syy / norm,
            cov_xy: sxy / norm,
        }
    }

    pub fn sigma_x(&self) -> f64 {
        self.var_x.sqrt()
    }

    pub fn sigma_y(&self) -> f64 {
        self.var_y.sqrt()
    }

    pub fn ssim(&self, params: &SsimParams) -> f64 {
        let (c1, c2) = (params.c1(), params.c2());
        let numerator = (2.0 * self.mu_x * self.mu_y + c1) * (2.0 * self.cov_xy + c2);
        let denominator =
            (self.mu_x * self.mu_x + self.mu_y * self.mu_y + c1) * (self.var_x + self.var_y + c2);
        numerator / denominator
    }
}

fn check_dimensions(x: &GrayImage, y: &GrayImage) -> Result<(), MetricError> {
    if x.width() != y.width() || x.height() != y.height() {
        return Err(MetricError::DimensionMismatch(
            x.width(),
            x.height(),
            y.width(),
            y.height(),
        ));
    }
    Ok(())
}

pub fn ssim(x: &GrayImage, y: &GrayImage, params: &SsimParams) -> Result<f64, MetricError> {
    check_dimensions(x, y)?;
    match params.mode {
        SsimMode::Global => {
            if x.len() < 2 {
                return Err(MetricError::TooSmall(
                    "global SSIM needs at least two samples".into(),
                ));
            }
            let pairs = x.samples().iter().copied().zip(y.samples().iter().copied());
            Ok(SsimStats::from_pairs(pairs).ssim(params))
        }
        SsimMode::Windowed { size } => windowed_ssim(x, y, size, params),
    }
}

fn windowed_ssim(
    x: &GrayImage,
    y: &GrayImage,
    size: usize,
    params: &SsimParams,
) -> Result<f64, MetricError> {
    if size < 2 || x.width() < size || x.height() < size {
        return Err(MetricError::TooSmall(format!(
            "{}x{} image with {size}x{size} windows",
            x.width(),
            x.height()
        )));
    }
    let width = x.width();
    let (xs, ys) = (x.samples(), y.samples());
    let mut total = 0.0;
    let mut count = 0usize;
    for top in 0..=x.height() - size {
        for left in 0..=width - size {
            let window = (top..top + size).flat_map(|r| {
                let start = r * width + left;
                xs[start..start + size]
                    .iter()
                    .copied()
                    .zip(ys[start..start + size].iter().copied())
            });
            total += SsimStats::from_pairs(window).ssim(params);
            count += 1;
        }
    }
    Ok(total / count as f64)
}

/// Peak signal-to-noise ratio in decibels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psnr {
    Finite(f64),
    /// The images are identical.
    Infinite,
}

impl Psnr {
    pub fn db(&self) -> f64 {
        match *self {
            Psnr::Finite(v) => v,
            Psnr::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Psnr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Psnr::Finite(v) => write!(f, "{v:.4}"),
            Psnr::Infinite => f.write_str("inf"),
        }
    }
}

pub fn mse(x: &GrayImage, y: &GrayImage) -> Result<f64, MetricError> {
    check_dimensions(x, y)?;
    let sum: u64 = x
        .samples()
        .iter()
        .zip(y.samples())
        .map(|(&a, &b)| {
            let d = u64::from(a.abs_diff(b));
            d * d
        })
        .sum();
    Ok(sum as f64 / x.len() as f64)
}

/// `10·log10(255² / MSE)`.
pub fn psnr(x: &GrayImage, y: &GrayImage) -> Result<Psnr, MetricError> {
    let mse = mse(x, y)?;
    if mse == 0.0 {
        return Ok(Psnr::Infinite);
    }
    Ok(Psnr::Finite(10.0 * (255.0f64 * 255.0 / mse).log10()))
}
