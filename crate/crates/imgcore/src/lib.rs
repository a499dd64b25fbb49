//! Core image primitives shared by the augmentation and evaluation crates:
//! an 8-bit raster buffer, a counter-based deterministic RNG with substream
//! derivation, color-space conversion, bilinear resampling and PNG/PNM IO.
//!
//! Everything here is a pure function of its inputs. Pixel math widens to
//! `f64` inside kernels and rounds half-up on write-back, so identical inputs
//! produce byte-identical outputs across runs and thread counts.

mod color;
mod image;
mod io;
mod rng;
mod sample;

pub use color::{convert_colorspace, hsv_to_rgb_f64, rgb_to_hsv_f64, ColorSpace};
pub use image::Image;
pub use io::{read_image, write_image, ImageFormat};
pub use rng::RngStream;
pub use sample::{resize_bilinear, sample_bilinear, warp_bilinear};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("invalid image geometry: {0}")]
    InvalidGeometry(String),
    #[error("expected {expected} channels, got {got}")]
    ChannelMismatch { expected: u8, got: u8 },
    #[error("invalid range: lo {lo} > hi {hi}")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("unsupported image file: {0}")]
    UnsupportedFormat(String),
    #[error("decode error: {0}")]
    Decode(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, ImageError>;

/// Rounds half-up and clamps to the 8-bit sample range.
///
/// This is the single quantization rule used on every kernel write-back.
#[inline]
pub fn quantize(v: f64) -> u8 {
    let r = (v + 0.5).floor();
    if r <= 0.0 {
        0
    } else if r >= 255.0 {
        255
    } else {
        r as u8
    }
}
