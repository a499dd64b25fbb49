//! Canny edge extraction used as an augmentation: the input is replaced by
//! its binary edge map, removing texture while keeping object shape.

use imgcore::{Image, RngStream};
use serde_json::{json, Value};

use crate::geometry::smooth_field;
use crate::params::CannyParams;
use crate::Result;

fn reflect(i: i64, n: i64) -> i64 {
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

/// Sobel gradients of a real-valued plane, reflect borders.
fn sobel(plane: &[f64], w: usize, h: usize) -> (Vec<f64>, Vec<f64>) {
    let at = |x: i64, y: i64| plane[reflect(y, h as i64) as usize * w + reflect(x, w as i64) as usize];
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let i = y as usize * w + x as usize;
            gx[i] = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
            gy[i] = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
        }
    }
    (gx, gy)
}

/// Tolerance for magnitude comparisons in the suppression step. Symmetric
/// edges produce plateau neighbors that are equal up to summation-order
/// noise; treating near-equal magnitudes as ties keeps the asymmetric rule
/// below deterministic.
const NMS_EPS: f64 = 1e-6;

/// Non-maximum suppression along the quantized gradient direction. The
/// asymmetric comparison (> before, >= after) keeps exactly one pixel of a
/// symmetric two-pixel plateau. Border pixels are suppressed.
fn non_maximum_suppression(mag: &[f64], gx: &[f64], gy: &[f64], w: usize, h: usize) -> Vec<f64> {
    let mut out = vec![0.0; w * h];
    for y in 1..h.saturating_sub(1) {
        for x in 1..w.saturating_sub(1) {
            let i = y * w + x;
            let mut angle = gy[i].atan2(gx[i]).to_degrees();
            if angle < 0.0 {
                angle += 180.0;
            }
            let (dx, dy) = if !(22.5..157.5).contains(&angle) {
                (1i64, 0i64)
            } else if angle < 67.5 {
                (1, 1)
            } else if angle < 112.5 {
                (0, 1)
            } else {
                (-1, 1)
            };
            let before = mag[(y as i64 - dy) as usize * w + (x as i64 - dx) as usize];
            let after = mag[(y as i64 + dy) as usize * w + (x as i64 + dx) as usize];
            if mag[i] > before + NMS_EPS && mag[i] >= after - NMS_EPS {
                out[i] = mag[i];
            }
        }
    }
    out
}

/// Double threshold with 8-connected breadth-first hysteresis.
fn hysteresis(thinned: &[f64], w: usize, h: usize, low: f64, high: f64) -> Vec<bool> {
    let mut edge = vec![false; w * h];
    let mut queue = Vec::new();
    for i in 0..w * h {
        if thinned[i] >= high && !edge[i] {
            edge[i] = true;
            queue.push(i);
            while let Some(j) = queue.pop() {
                let (x, y) = ((j % w) as i64, (j / w) as i64);
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let (nx, ny) = (x + dx, y + dy);
                        if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                            continue;
                        }
                        let k = ny as usize * w + nx as usize;
                        if !edge[k] && thinned[k] >= low {
                            edge[k] = true;
                            queue.push(k);
                        }
                    }
                }
            }
        }
    }
    edge
}

/// Full Canny chain: Gaussian smoothing, Sobel gradients, non-maximum
/// suppression, double threshold with hysteresis. Output samples are 0 or
/// 255, replicated to the input channel count.
pub fn canny_edge_with(img: &Image, low: f64, high: f64, sigma: f64) -> Image {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let mut gray = Vec::with_capacity(w * h);
    for y in 0..img.height() {
        for x in 0..img.width() {
            gray.push(if img.channels() == 1 {
                img.get(x, y, 0) as f64
            } else {
                let [r, g, b] = img.pixel(x, y);
                0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64
            });
        }
    }
    let smoothed = smooth_field(&gray, w, h, sigma);
    let (gx, gy) = sobel(&smoothed, w, h);
    let mag: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| a.hypot(*b)).collect();
    let thinned = non_maximum_suppression(&mag, &gx, &gy, w, h);
    let edges = hysteresis(&thinned, w, h, low, high);

    let ch = img.channels() as usize;
    let mut samples = vec![0u8; w * h * ch];
    for (i, &is_edge) in edges.iter().enumerate() {
        if is_edge {
            for c in 0..ch {
                samples[i * ch + c] = 255;
            }
        }
    }
    Image::new(img.width(), img.height(), img.channels(), samples)
        .expect("canny output geometry is valid")
}

/// Canny augmentation; draws nothing from the stream.
pub fn canny_edge(img: &Image, _rng: &mut RngStream, p: &CannyParams) -> Result<(Image, Value)> {
    let out = canny_edge_with(img, p.low, p.high, p.smooth_sigma);
    Ok((out, json!({ "low": p.low, "high": p.high, "sigma": p.smooth_sigma })))
}
