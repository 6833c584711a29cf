//! Reversible watermarking for 8-bit grayscale images.
//!
//! Two embedders are provided:
//!
//! * [`de`]: difference expansion over horizontally adjacent pixel pairs,
//!   with a location map and saved LSBs carried in the watermark itself so
//!   extraction needs nothing but the watermarked image.
//! * [`rrl`]: rotational replacement of LSB, one payload byte per 8×8 block,
//!   with a sidecar [`rrl::RestorationRecord`] for bit-exact restoration.
//!
//! [`metrics`] measures the distortion (SSIM and PSNR), and [`bench`] runs
//! the payload sweep that compares the two schemes.

pub mod bench;
pub mod codec;
pub mod de;
pub mod image;
pub mod metrics;
pub mod rrl;

pub use crate::image::{bitplane_diff, load_pgm, save_pgm, BitplaneDiff, GrayImage, ImageError};
