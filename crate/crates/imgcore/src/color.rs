use crate::{quantize, Image, ImageError, Result};

/// Target space for [`convert_colorspace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorSpace {
    Gray,
    Hsv,
    Rgb,
}

/// RGB ([0,255] each) to HSV with h in [0,360), s in [0,1], v in [0,255].
///
/// This is the full-precision form used inside color kernels; the 8-bit
/// encoding only happens in [`convert_colorspace`].
pub fn rgb_to_hsv_f64(r: f64, g: f64, b: f64) -> (f64, f64, f64) {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let v = max;
    let s = if max <= 0.0 { 0.0 } else { delta / max };
    let h = if delta <= 0.0 {
        0.0
    } else if max == r {
        60.0 * (((g - b) / delta).rem_euclid(6.0))
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    (h, s, v)
}

/// Inverse of [`rgb_to_hsv_f64`].
pub fn hsv_to_rgb_f64(h: f64, s: f64, v: f64) -> (f64, f64, f64) {
    let c = v * s;
    let hp = (h.rem_euclid(360.0)) / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp {
        hp if hp < 1.0 => (c, x, 0.0),
        hp if hp < 2.0 => (x, c, 0.0),
        hp if hp < 3.0 => (0.0, c, x),
        hp if hp < 4.0 => (0.0, x, c),
        hp if hp < 5.0 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    (r + m, g + m, b + m)
}

/// Convert between 8-bit color encodings.
///
/// * `Gray`: 3-channel input is reduced with Rec. 601 weights
///   (0.299/0.587/0.114, rounded half-up); gray input passes through.
/// * `Hsv`: 3-channel rgb input only. H maps [0°,360°) onto [0,255],
///   S and V onto [0,255].
/// * `Rgb`: 3-channel input is interpreted as the HSV encoding above and
///   decoded; gray input is replicated to three channels.
///
/// Quantizing H to one byte limits hue resolution to ~1.4°, so the
/// rgb→hsv→rgb round trip can move a fully saturated channel by up to
/// ±3; kernels that need tighter error bounds use the f64 helpers.
pub fn convert_colorspace(img: &Image, target: ColorSpace) -> Result<Image> {
    match target {
        ColorSpace::Gray => {
            if img.channels() == 1 {
                return Ok(img.clone());
            }
            let mut samples = Vec::with_capacity(img.width() as usize * img.height() as usize);
            for y in 0..img.height() {
                for x in 0..img.width() {
                    samples.push(img.luminance(x, y));
                }
            }
            Image::new(img.width(), img.height(), 1, samples)
        }
        ColorSpace::Hsv => {
            if img.channels() != 3 {
                return Err(ImageError::ChannelMismatch { expected: 3, got: img.channels() });
            }
            let mut out = img.clone();
            for y in 0..img.height() {
                for x in 0..img.width() {
                    let [r, g, b] = img.pixel(x, y);
                    let (h, s, v) = rgb_to_hsv_f64(r as f64, g as f64, b as f64);
                    out.set(x, y, 0, quantize(h / 360.0 * 255.0));
                    out.set(x, y, 1, quantize(s * 255.0));
                    out.set(x, y, 2, quantize(v));
                }
            }
            Ok(out)
        }
        ColorSpace::Rgb => {
            if img.channels() == 1 {
                let mut samples =
                    Vec::with_capacity(img.width() as usize * img.height() as usize * 3);
                for &v in img.samples() {
                    samples.extend_from_slice(&[v, v, v]);
                }
                return Image::new(img.width(), img.height(), 3, samples);
            }
            let mut out = img.clone();
            for y in 0..img.height() {
                for x in 0..img.width() {
                    let [hb, sb, vb] = img.pixel(x, y);
                    let (r, g, b) = hsv_to_rgb_f64(
                        hb as f64 / 255.0 * 360.0,
                        sb as f64 / 255.0,
                        vb as f64,
                    );
                    out.set(x, y, 0, quantize(r));
                    out.set(x, y, 1, quantize(g));
                    out.set(x, y, 2, quantize(b));
                }
            }
            Ok(out)
        }
    }
}
