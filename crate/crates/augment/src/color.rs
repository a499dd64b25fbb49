//! Color augmentations: brightness/contrast, color jitter, grayscale and
//! CLAHE.

use imgcore::{hsv_to_rgb_f64, quantize, rgb_to_hsv_f64, Image, RngStream};
use serde_json::{json, Value};

use crate::params::{BrightnessContrastParams, ClaheParams, ColorJitterParams};
use crate::{AugError, Result};

/// v' = clamp((v - 127.5)(1 + dc) + 127.5 + 255 db), applied per sample.
pub fn brightness_contrast_with(img: &Image, brightness: f64, contrast: f64) -> Image {
    let mut out = img.clone();
    for v in out.samples_mut() {
        let x = (*v as f64 - 127.5) * (1.0 + contrast) + 127.5 + 255.0 * brightness;
        *v = quantize(x);
    }
    out
}

/// Random brightness/contrast. Draw order: brightness delta, contrast delta.
pub fn brightness_contrast(
    img: &Image,
    rng: &mut RngStream,
    p: &BrightnessContrastParams,
) -> Result<(Image, Value)> {
    img.require_channels(3).map_err(AugError::Image)?;
    let db = rng.uniform(-p.brightness_limit, p.brightness_limit)?;
    let dc = rng.uniform(-p.contrast_limit, p.contrast_limit)?;
    let out = brightness_contrast_with(img, db, dc);
    Ok((out, json!({ "brightness": db, "contrast": dc })))
}

fn luminance_f64(r: f64, g: f64, b: f64) -> f64 {
    0.299 * r + 0.587 * g + 0.114 * b
}

/// Scale every sample by `factor`.
pub fn adjust_brightness(img: &Image, factor: f64) -> Image {
    let mut out = img.clone();
    for v in out.samples_mut() {
        *v = quantize(*v as f64 * factor);
    }
    out
}

/// Blend toward the image's mean luminance: v' = f v + (1-f) mean.
pub fn adjust_contrast(img: &Image, factor: f64) -> Image {
    let mut mean = 0.0;
    for y in 0..img.height() {
        for x in 0..img.width() {
            let [r, g, b] = img.pixel(x, y);
            mean += luminance_f64(r as f64, g as f64, b as f64);
        }
    }
    mean /= (img.width() as usize * img.height() as usize) as f64;
    let mut out = img.clone();
    for v in out.samples_mut() {
        *v = quantize(factor * *v as f64 + (1.0 - factor) * mean);
    }
    out
}

/// Blend toward the per-pixel luminance: factor 0 is grayscale, 1 identity.
pub fn adjust_saturation(img: &Image, factor: f64) -> Image {
    let mut out = img.clone();
    for y in 0..img.height() {
        for x in 0..img.width() {
            let [r, g, b] = img.pixel(x, y);
            let l = luminance_f64(r as f64, g as f64, b as f64);
            out.set(x, y, 0, quantize(factor * r as f64 + (1.0 - factor) * l));
            out.set(x, y, 1, quantize(factor * g as f64 + (1.0 - factor) * l));
            out.set(x, y, 2, quantize(factor * b as f64 + (1.0 - factor) * l));
        }
    }
    out
}

/// Rotate hue by a fraction of the full circle, through full-precision HSV.
pub fn adjust_hue(img: &Image, shift_fraction: f64) -> Image {
    let mut out = img.clone();
    for y in 0..img.height() {
        for x in 0..img.width() {
            let [r, g, b] = img.pixel(x, y);
            let (h, s, v) = rgb_to_hsv_f64(r as f64, g as f64, b as f64);
            let (r2, g2, b2) = hsv_to_rgb_f64(h + shift_fraction * 360.0, s, v);
            out.set(x, y, 0, quantize(r2));
            out.set(x, y, 1, quantize(g2));
            out.set(x, y, 2, quantize(b2));
        }
    }
    out
}

const JITTER_OPS: [&str; 4] = ["brightness", "contrast", "saturation", "hue"];

/// Color jitter: the four sub-operations applied in a seeded random order.
///
/// Draw order: brightness factor, contrast factor, saturation factor, hue
/// shift, then a shuffle over the op order. The sampled values and the order
/// appear in the returned log.
pub fn color_jitter(
    img: &Image,
    rng: &mut RngStream,
    p: &ColorJitterParams,
) -> Result<(Image, Value)> {
    img.require_channels(3).map_err(AugError::Image)?;
    let fb = rng.uniform(p.brightness[0], p.brightness[1])?;
    let fc = rng.uniform(p.contrast[0], p.contrast[1])?;
    let fs = rng.uniform(p.saturation[0], p.saturation[1])?;
    let fh = rng.uniform(-p.hue, p.hue)?;
    let mut order = [0usize, 1, 2, 3];
    rng.shuffle(&mut order);

    let mut out = img.clone();
    for &op in &order {
        out = match op {
            0 => adjust_brightness(&out, fb),
            1 => adjust_contrast(&out, fc),
            2 => adjust_saturation(&out, fs),
            _ => adjust_hue(&out, fh),
        };
    }
    let order_names: Vec<&str> = order.iter().map(|&i| JITTER_OPS[i]).collect();
    Ok((
        out,
        json!({
            "brightness": fb,
            "contrast": fc,
            "saturation": fs,
            "hue": fh,
            "order": order_names,
        }),
    ))
}

/// Rec. 601 luminance replicated to every input channel.
pub fn grayscale(img: &Image) -> Result<Image> {
    img.require_channels(3).map_err(AugError::Image)?;
    let mut out = img.clone();
    for y in 0..img.height() {
        for x in 0..img.width() {
            let l = img.luminance(x, y);
            for c in 0..3 {
                out.set(x, y, c, l);
            }
        }
    }
    Ok(out)
}

/// Histogram with one bin per 8-bit value.
fn histogram(values: impl Iterator<Item = u8>) -> [u64; 256] {
    let mut hist = [0u64; 256];
    for v in values {
        hist[v as usize] += 1;
    }
    hist
}

/// Clip the histogram at `clip_limit * area / 256` counts per bin and spread
/// the excess uniformly (remainder distributed with an even stride).
fn clip_histogram(hist: &mut [u64; 256], area: u64, clip_limit: f64) {
    if !clip_limit.is_finite() {
        return;
    }
    let clip = ((clip_limit * area as f64 / 256.0).floor() as u64).max(1);
    let mut excess = 0u64;
    for bin in hist.iter_mut() {
        if *bin > clip {
            excess += *bin - clip;
            *bin = clip;
        }
    }
    let batch = excess / 256;
    let mut residual = (excess % 256) as usize;
    for bin in hist.iter_mut() {
        *bin += batch;
    }
    if residual > 0 {
        let stride = (256usize.checked_div(residual).unwrap_or(0)).max(1);
        let mut i = 0;
        while i < 256 && residual > 0 {
            hist[i] += 1;
            residual -= 1;
            i += stride;
        }
    }
}

/// Midpoint-convention equalization LUT: value v maps to the quantile at the
/// middle of its own histogram mass, scaled to [0, 255]. A perfectly uniform
/// histogram maps every value to itself.
pub(crate) fn equalize_lut(hist: &[u64; 256], area: u64) -> [u8; 256] {
    let mut lut = [0u8; 256];
    let mut cdf = 0u64;
    for v in 0..256 {
        cdf += hist[v];
        let mid = cdf as f64 - hist[v] as f64 / 2.0;
        lut[v] = quantize(255.0 * mid / area as f64);
    }
    lut
}

/// Global midpoint-convention histogram equalization of a gray image.
pub fn equalize_gray(img: &Image) -> Image {
    let area = img.samples().len() as u64;
    let hist = histogram(img.samples().iter().copied());
    let lut = equalize_lut(&hist, area);
    let mut out = img.clone();
    for v in out.samples_mut() {
        *v = lut[*v as usize];
    }
    out
}

fn reflect_idx(i: i64, n: i64) -> i64 {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n - 1);
    let mut r = i.rem_euclid(period);
    if r >= n {
        r = period - r;
    }
    r
}

/// CLAHE on a single-channel image with a fixed clip limit and tile grid.
///
/// Tile LUTs are computed on a reflect-extended copy whose dimensions divide
/// the grid; the output interpolates bilinearly between the four surrounding
/// tile mappings.
pub fn clahe_gray(img: &Image, clip_limit: f64, tiles: [u32; 2]) -> Result<Image> {
    img.require_channels(1).map_err(AugError::Image)?;
    let [gx, gy] = tiles;
    if gx == 0 || gy == 0 {
        return Err(AugError::InvalidInput("tile grid must be at least 1x1".into()));
    }
    let (w, h) = (img.width(), img.height());
    let ext_w = w.div_ceil(gx) * gx;
    let ext_h = h.div_ceil(gy) * gy;
    let tile_w = (ext_w / gx) as usize;
    let tile_h = (ext_h / gy) as usize;
    let area = (tile_w * tile_h) as u64;

    let sample_ext = |x: i64, y: i64| -> u8 {
        img.get(reflect_idx(x, w as i64) as u32, reflect_idx(y, h as i64) as u32, 0)
    };

    let mut luts = vec![[0u8; 256]; (gx * gy) as usize];
    for ty in 0..gy as usize {
        for tx in 0..gx as usize {
            let x0 = tx * tile_w;
            let y0 = ty * tile_h;
            let mut hist = histogram(
                (0..tile_h).flat_map(|dy| {
                    (0..tile_w).map(move |dx| ((x0 + dx) as i64, (y0 + dy) as i64))
                })
                .map(|(x, y)| sample_ext(x, y)),
            );
            clip_histogram(&mut hist, area, clip_limit);
            luts[ty * gx as usize + tx] = equalize_lut(&hist, area);
        }
    }

    let mut out = img.clone();
    for y in 0..h as usize {
        let tyf = y as f64 / tile_h as f64 - 0.5;
        let ty0 = tyf.floor().max(0.0) as usize;
        let fy = (tyf - tyf.floor()).clamp(0.0, 1.0);
        let fy = if tyf < 0.0 { 0.0 } else { fy };
        let ty1 = (ty0 + 1).min(gy as usize - 1);
        for x in 0..w as usize {
            let txf = x as f64 / tile_w as f64 - 0.5;
            let tx0 = txf.floor().max(0.0) as usize;
            let fx = (txf - txf.floor()).clamp(0.0, 1.0);
            let fx = if txf < 0.0 { 0.0 } else { fx };
            let tx1 = (tx0 + 1).min(gx as usize - 1);

            let v = img.get(x as u32, y as u32, 0) as usize;
            let tl = luts[ty0 * gx as usize + tx0][v] as f64;
            let tr = luts[ty0 * gx as usize + tx1][v] as f64;
            let bl = luts[ty1 * gx as usize + tx0][v] as f64;
            let br = luts[ty1 * gx as usize + tx1][v] as f64;
            let top = (1.0 - fx) * tl + fx * tr;
            let bottom = (1.0 - fx) * bl + fx * br;
            out.set(x as u32, y as u32, 0, quantize((1.0 - fy) * top + fy * bottom));
        }
    }
    Ok(out)
}

/// CLAHE with a fixed clip limit. Gray input is equalized directly; color
/// input is processed on the HSV value channel and recombined through the
/// full-precision converters.
pub fn clahe_with(img: &Image, clip_limit: f64, tiles: [u32; 2]) -> Result<Image> {
    if img.channels() == 1 {
        return clahe_gray(img, clip_limit, tiles);
    }
    let (w, h) = (img.width(), img.height());
    let mut value = Vec::with_capacity(w as usize * h as usize);
    for y in 0..h {
        for x in 0..w {
            let [r, g, b] = img.pixel(x, y);
            value.push(r.max(g).max(b));
        }
    }
    let value_img = Image::new(w, h, 1, value)?;
    let equalized = clahe_gray(&value_img, clip_limit, tiles)?;
    let mut out = img.clone();
    for y in 0..h {
        for x in 0..w {
            let [r, g, b] = img.pixel(x, y);
            let (hh, ss, _) = rgb_to_hsv_f64(r as f64, g as f64, b as f64);
            let (r2, g2, b2) = hsv_to_rgb_f64(hh, ss, equalized.get(x, y, 0) as f64);
            out.set(x, y, 0, quantize(r2));
            out.set(x, y, 1, quantize(g2));
            out.set(x, y, 2, quantize(b2));
        }
    }
    Ok(out)
}

/// CLAHE with the clip limit drawn uniformly from the configured range
/// (one draw).
pub fn clahe(img: &Image, rng: &mut RngStream, p: &ClaheParams) -> Result<(Image, Value)> {
    let clip = rng.uniform(p.clip_limit[0], p.clip_limit[1])?;
    let out = clahe_with(img, clip, p.tiles)?;
    Ok((out, json!({ "clip_limit": clip, "tiles": p.tiles })))
}
