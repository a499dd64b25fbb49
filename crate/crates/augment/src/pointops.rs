//! Point operations used by policies: per-pixel and histogram-level
//! transforms plus the two shears.

use imgcore::{quantize, Image, RngStream};
use serde_json::{json, Value};

use crate::color::{adjust_saturation, equalize_lut};
use crate::geometry::shear_warp;
use crate::params::{PointOpKind, PointOpParams};
use crate::{AugError, Result};

/// Keep the top `bits` bits of every sample.
pub fn posterize(img: &Image, bits: u32) -> Image {
    let mask = (0xFFu16 << (8 - bits)) as u8;
    let mut out = img.clone();
    for v in out.samples_mut() {
        *v &= mask;
    }
    out
}

/// Invert samples at or above the threshold.
pub fn solarize(img: &Image, threshold: u8) -> Image {
    let mut out = img.clone();
    for v in out.samples_mut() {
        if *v >= threshold {
            *v = 255 - *v;
        }
    }
    out
}

/// Global midpoint-convention histogram equalization, per channel.
pub fn equalize(img: &Image) -> Image {
    let area = (img.width() as usize * img.height() as usize) as u64;
    let mut out = img.clone();
    for c in 0..img.channels() {
        let mut hist = [0u64; 256];
        for y in 0..img.height() {
            for x in 0..img.width() {
                hist[img.get(x, y, c) as usize] += 1;
            }
        }
        let lut = equalize_lut(&hist, area);
        for y in 0..img.height() {
            for x in 0..img.width() {
                out.set(x, y, c, lut[img.get(x, y, c) as usize]);
            }
        }
    }
    out
}

/// Linear stretch of each channel to the full [0, 255] range.
pub fn autocontrast(img: &Image) -> Image {
    let mut out = img.clone();
    for c in 0..img.channels() {
        let mut lo = 255u8;
        let mut hi = 0u8;
        for y in 0..img.height() {
            for x in 0..img.width() {
                let v = img.get(x, y, c);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if lo == hi {
            continue;
        }
        // Multiply before dividing: the numerator stays an exact integer,
        // so midpoints like 127.5 round correctly.
        let span = (hi - lo) as f64;
        for y in 0..img.height() {
            for x in 0..img.width() {
                let v = img.get(x, y, c);
                out.set(x, y, c, quantize((v - lo) as f64 * 255.0 / span));
            }
        }
    }
    out
}

/// 255 - v on every sample.
pub fn invert(img: &Image) -> Image {
    let mut out = img.clone();
    for v in out.samples_mut() {
        *v = 255 - *v;
    }
    out
}

/// Blend between grayscale (0) and the original (1); 2 over-saturates.
/// Gray images pass through unchanged.
pub fn color(img: &Image, factor: f64) -> Image {
    if img.channels() == 1 {
        return img.clone();
    }
    adjust_saturation(img, factor)
}

/// Apply a point operation after validating its magnitude:
/// posterize bits 1-8, solarize threshold 0-255, |shear| <= 0.3,
/// color factor 0-2. Equalize, autocontrast and invert ignore magnitude.
pub fn point_op(img: &Image, kind: PointOpKind, magnitude: f64) -> Result<Image> {
    match kind {
        PointOpKind::Posterize => {
            let bits = magnitude.round();
            if !(1.0..=8.0).contains(&bits) {
                return Err(AugError::InvalidInput(format!(
                    "posterize bits {magnitude} outside 1..=8"
                )));
            }
            Ok(posterize(img, bits as u32))
        }
        PointOpKind::Solarize => {
            if !(0.0..=255.0).contains(&magnitude) {
                return Err(AugError::InvalidInput(format!(
                    "solarize threshold {magnitude} outside 0..=255"
                )));
            }
            Ok(solarize(img, magnitude.round() as u8))
        }
        PointOpKind::Equalize => Ok(equalize(img)),
        PointOpKind::Autocontrast => Ok(autocontrast(img)),
        PointOpKind::Invert => Ok(invert(img)),
        PointOpKind::ShearX | PointOpKind::ShearY => {
            if magnitude.abs() > 0.3 {
                return Err(AugError::InvalidInput(format!(
                    "shear fraction {magnitude} outside [-0.3, 0.3]"
                )));
            }
            Ok(if kind == PointOpKind::ShearX {
                shear_warp(img, magnitude, 0.0)
            } else {
                shear_warp(img, 0.0, magnitude)
            })
        }
        PointOpKind::Color => {
            if !(0.0..=2.0).contains(&magnitude) {
                return Err(AugError::InvalidInput(format!(
                    "color factor {magnitude} outside 0..=2"
                )));
            }
            Ok(color(img, magnitude))
        }
    }
}

/// Pipeline-stage wrapper; draws nothing from the stream.
pub fn point_op_stage(
    img: &Image,
    _rng: &mut RngStream,
    p: &PointOpParams,
) -> Result<(Image, Value)> {
    let out = point_op(img, p.op, p.magnitude)?;
    Ok((out, json!({ "op": p.op.as_str(), "magnitude": p.magnitude })))
}
