//! Weather overlays: fog, rain, snow and sun flare. All require 3-channel
//! input.

use imgcore::{quantize, Image, RngStream};
use serde_json::{json, Value};

use crate::params::{FogParams, RainParams, SnowParams, SunFlareParams};
use crate::texture::blur_with_kernel;
use crate::{AugError, Result};

const FOG_BLOBS: usize = 8;

/// Blend toward white with a base haze plus circular blobs. `coef` scales
/// the whole alpha field, so zero is the identity.
pub fn fog_with(img: &Image, coef: f64, blobs: &[(f64, f64, f64)]) -> Image {
    let mut out = img.clone();
    for y in 0..img.height() {
        for x in 0..img.width() {
            let mut blob = 0.0f64;
            for &(cx, cy, r) in blobs {
                let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
                blob = blob.max((1.0 - d / r).clamp(0.0, 1.0));
            }
            let alpha = (coef * (0.3 + 0.7 * blob)).clamp(0.0, 1.0);
            for c in 0..img.channels() {
                let v = img.get(x, y, c) as f64;
                out.set(x, y, c, quantize(v + (255.0 - v) * alpha));
            }
        }
    }
    out
}

/// Fog. Draw order: intensity coefficient, then for each of 8 blobs its
/// center x, center y and radius (as a fraction of min(w, h) in [0.05, 0.15]).
pub fn fog(img: &Image, rng: &mut RngStream, p: &FogParams) -> Result<(Image, Value)> {
    img.require_channels(3).map_err(AugError::Image)?;
    let coef = rng.uniform(p.coef[0], p.coef[1])?;
    let min_dim = img.width().min(img.height()) as f64;
    let mut blobs = Vec::with_capacity(FOG_BLOBS);
    for _ in 0..FOG_BLOBS {
        let cx = rng.index(img.width() as usize) as f64;
        let cy = rng.index(img.height() as usize) as f64;
        let r = rng.uniform(0.05, 0.15)? * min_dim;
        blobs.push((cx, cy, r.max(1.0)));
    }
    let out = fog_with(img, coef, &blobs);
    Ok((out, json!({ "coef": coef })))
}

/// Rain streaks at the given slant, then a 7x7 blur and a brightness drop.
pub fn rain_with(img: &Image, slant_deg: f64, drops: &[(u32, u32)], p: &RainParams) -> Result<Image> {
    let mut streaked = img.clone();
    let slope = slant_deg.to_radians().tan();
    for &(x0, y0) in drops {
        for step in 0..p.drop_length {
            let y = y0 as i64 + step as i64;
            let x = x0 as i64 + (slope * step as f64).round() as i64;
            if x >= 0 && (x as u32) < img.width() && y >= 0 && (y as u32) < img.height() {
                for c in 0..3 {
                    streaked.set(x as u32, y as u32, c, p.color[c as usize]);
                }
            }
        }
    }
    let blurred = blur_with_kernel(&streaked, 7)?;
    Ok(crate::color::adjust_brightness(&blurred, p.brightness))
}

/// Rain. Draw order: slant angle, then per drop its x and y origin; the
/// drop count is area / 500 (at least one).
pub fn rain(img: &Image, rng: &mut RngStream, p: &RainParams) -> Result<(Image, Value)> {
    img.require_channels(3).map_err(AugError::Image)?;
    let slant = rng.uniform(-p.slant_limit, p.slant_limit)?;
    let n = ((img.width() as usize * img.height() as usize) / 500).max(1);
    let mut drops = Vec::with_capacity(n);
    for _ in 0..n {
        let x = rng.index(img.width() as usize) as u32;
        let y = rng.index(img.height() as usize) as u32;
        drops.push((x, y));
    }
    let out = rain_with(img, slant, &drops, p)?;
    Ok((out, json!({ "slant": slant, "drops": n })))
}

/// Brighten pixels whose HLS lightness falls below `threshold` (0-255 scale).
pub fn snow_with(img: &Image, threshold: f64, brightness: f64) -> Image {
    let mut out = img.clone();
    for y in 0..img.height() {
        for x in 0..img.width() {
            let [r, g, b] = img.pixel(x, y);
            let max = r.max(g).max(b) as f64;
            let min = r.min(g).min(b) as f64;
            let lightness = (max + min) / 2.0;
            if lightness < threshold {
                for c in 0..3 {
                    out.set(x, y, c, quantize(img.get(x, y, c) as f64 * brightness));
                }
            }
        }
    }
    out
}

/// Snow. Draw order: the snow point (lightness threshold as a fraction).
pub fn snow(img: &Image, rng: &mut RngStream, p: &SnowParams) -> Result<(Image, Value)> {
    img.require_channels(3).map_err(AugError::Image)?;
    let point = rng.uniform(p.point[0], p.point[1])?;
    let out = snow_with(img, point * 255.0, p.brightness);
    Ok((out, json!({ "snow_point": point })))
}

/// White discs of linearly decaying radius and alpha along a ray.
pub fn sun_flare_with(
    img: &Image,
    origin: (f64, f64),
    angle: f64,
    p: &SunFlareParams,
) -> Image {
    let mut out = img.clone();
    let min_dim = img.width().min(img.height()) as f64;
    let n = p.discs.max(1);
    for i in 0..n {
        let decay = (n - i) as f64 / n as f64;
        let cx = origin.0 + angle.cos() * p.step_fraction * min_dim * i as f64;
        let cy = origin.1 + angle.sin() * p.step_fraction * min_dim * i as f64;
        let radius = (p.radius_fraction * min_dim * decay).max(1.0);
        let alpha = p.alpha * decay;

        let x0 = (cx - radius).floor().max(0.0) as u32;
        let x1 = ((cx + radius).ceil() as i64).min(img.width() as i64 - 1).max(0) as u32;
        let y0 = (cy - radius).floor().max(0.0) as u32;
        let y1 = ((cy + radius).ceil() as i64).min(img.height() as i64 - 1).max(0) as u32;
        if cx + radius < 0.0 || cy + radius < 0.0 {
            continue;
        }
        for y in y0..=y1 {
            for x in x0..=x1 {
                let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
                if d <= radius {
                    for c in 0..3 {
                        let v = out.get(x, y, c) as f64;
                        out.set(x, y, c, quantize(v + (255.0 - v) * alpha));
                    }
                }
            }
        }
    }
    out
}

/// Sun flare. Draw order: origin x anywhere, origin y in the upper half,
/// ray angle in [0, 2 pi).
pub fn sun_flare(img: &Image, rng: &mut RngStream, p: &SunFlareParams) -> Result<(Image, Value)> {
    img.require_channels(3).map_err(AugError::Image)?;
    let ox = rng.index(img.width() as usize) as f64;
    let upper = (img.height() as usize).div_ceil(2);
    let oy = rng.index(upper) as f64;
    let angle = rng.uniform(0.0, std::f64::consts::TAU)?;
    let out = sun_flare_with(img, (ox, oy), angle, p);
    Ok((out, json!({ "origin": [ox, oy], "angle": angle })))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fog_zero_coefficient_is_identity() {
        let img = Image::constant(16, 16, 3, 80).unwrap();
        let mut rng = RngStream::new(5, 5);
        let p = FogParams { coef: [0.0, 0.0] };
        let (out, _) = fog(&img, &mut rng, &p).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn fog_brightens_toward_white() {
        let img = Image::constant(16, 16, 3, 80).unwrap();
        let mut rng = RngStream::new(5, 5);
        let (out, _) = fog(&img, &mut rng, &FogParams::default()).unwrap();
        assert!(out.samples().iter().all(|&v| v >= 80));
        assert!(out.mean() > img.mean());
    }

    #[test]
    fn rain_darkens_a_bright_constant_image() {
        let img = Image::constant(40, 40, 3, 200).unwrap();
        let mut rng = RngStream::new(9, 0);
        let (out, _) = rain(&img, &mut rng, &RainParams::default()).unwrap();
        assert!(out.mean() < img.mean(), "{} vs {}", out.mean(), img.mean());
    }

    #[test]
    fn rain_requires_color_input() {
        let img = Image::constant(8, 8, 1, 10).unwrap();
        let mut rng = RngStream::new(1, 1);
        assert!(rain(&img, &mut rng, &RainParams::default()).is_err());
    }

    #[test]
    fn snow_brightens_only_dark_pixels() {
        let mut img = Image::constant(4, 1, 3, 20).unwrap();
        for c in 0..3 {
            img.set(3, 0, c, 240);
        }
        let out = snow_with(&img, 0.2 * 255.0, 2.5);
        assert_eq!(out.pixel(0, 0), [50, 50, 50]);
        assert_eq!(out.pixel(3, 0), [240, 240, 240]);
    }

    #[test]
    fn sun_flare_touches_only_disc_regions() {
        let img = Image::constant(64, 64, 3, 30).unwrap();
        let p = SunFlareParams::default();
        let mut rng = RngStream::new(12, 3);
        let mut replay = rng;
        let (out, _) = sun_flare(&img, &mut rng, &p).unwrap();

        // Recompute disc bounding boxes from the replayed stream.
        let ox = replay.index(64) as f64;
        let oy = replay.index(32) as f64;
        let angle = replay.uniform(0.0, std::f64::consts::TAU).unwrap();
        let min_dim = 64.0;
        let mut boxes = Vec::new();
        for i in 0..p.discs {
            let decay = (p.discs - i) as f64 / p.discs as f64;
            let cx = ox + angle.cos() * p.step_fraction * min_dim * i as f64;
            let cy = oy + angle.sin() * p.step_fraction * min_dim * i as f64;
            let r = (p.radius_fraction * min_dim * decay).max(1.0);
            boxes.push((cx - r, cx + r, cy - r, cy + r));
        }
        let mut changed = 0u32;
        for y in 0..64u32 {
            for x in 0..64u32 {
                let inside = boxes.iter().any(|&(x0, x1, y0, y1)| {
                    (x as f64) >= x0.floor()
                        && (x as f64) <= x1.ceil()
                        && (y as f64) >= y0.floor()
                        && (y as f64) <= y1.ceil()
                });
                if !inside {
                    assert_eq!(out.pixel(x, y), [30, 30, 30], "pixel ({x},{y}) outside discs");
                } else if out.pixel(x, y) != [30, 30, 30] {
                    changed += 1;
                }
            }
        }
        assert!(changed > 0, "flare must modify at least one pixel");
    }
}
