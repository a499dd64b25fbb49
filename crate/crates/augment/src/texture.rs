//! Texture augmentations: Gaussian blur and additive Gaussian noise.

use imgcore::{quantize, Image, RngStream};
use serde_json::{json, Value};

use crate::params::{GaussianBlurParams, GaussianNoiseParams};
use crate::{AugError, Result};

/// OpenCV-style default sigma for an odd kernel size.
pub fn blur_sigma(kernel: u32) -> f64 {
    0.3 * (((kernel - 1) / 2) as f64 - 1.0) + 0.8
}

/// Normalized 1-D Gaussian taps for an odd kernel size.
pub fn blur_kernel(kernel: u32) -> Vec<f64> {
    let sigma = blur_sigma(kernel);
    let radius = ((kernel - 1) / 2) as i64;
    let mut taps = Vec::with_capacity(kernel as usize);
    for i in -radius..=radius {
        taps.push((-(i as f64) * (i as f64) / (2.0 * sigma * sigma)).exp());
    }
    let sum: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= sum;
    }
    taps
}

/// Separable Gaussian blur with reflect borders. Pixel math stays in f64
/// until the final write-back.
pub fn blur_with_kernel(img: &Image, kernel: u32) -> Result<Image> {
    if kernel == 0 || kernel.is_multiple_of(2) {
        return Err(AugError::InvalidInput(format!("kernel size {kernel} must be odd")));
    }
    let taps = blur_kernel(kernel);
    let radius = ((kernel - 1) / 2) as i64;
    let (w, h, ch) = (img.width() as i64, img.height() as i64, img.channels() as usize);

    let reflect = |i: i64, n: i64| -> i64 {
        if n == 1 {
            return 0;
        }
        let period = 2 * (n - 1);
        let mut r = i.rem_euclid(period);
        if r >= n {
            r = period - r;
        }
        r
    };

    let mut horizontal = vec![0.0f64; (w * h) as usize * ch];
    for y in 0..h {
        for x in 0..w {
            for c in 0..ch {
                let mut acc = 0.0;
                for (ti, tv) in taps.iter().enumerate() {
                    let sx = reflect(x + ti as i64 - radius, w);
                    acc += tv * img.get(sx as u32, y as u32, c as u8) as f64;
                }
                horizontal[((y * w + x) as usize) * ch + c] = acc;
            }
        }
    }
    let mut out = img.clone();
    for y in 0..h {
        for x in 0..w {
            for c in 0..ch {
                let mut acc = 0.0;
                for (ti, tv) in taps.iter().enumerate() {
                    let sy = reflect(y + ti as i64 - radius, h);
                    acc += tv * horizontal[((sy * w + x) as usize) * ch + c];
                }
                out.set(x as u32, y as u32, c as u8, quantize(acc));
            }
        }
    }
    Ok(out)
}

/// Gaussian blur with the kernel size drawn uniformly from the configured
/// set (one draw).
pub fn gaussian_blur(
    img: &Image,
    rng: &mut RngStream,
    p: &GaussianBlurParams,
) -> Result<(Image, Value)> {
    if p.kernel_sizes.is_empty() {
        return Err(AugError::InvalidInput("kernel size set is empty".into()));
    }
    let kernel = p.kernel_sizes[rng.index(p.kernel_sizes.len())];
    let out = blur_with_kernel(img, kernel)?;
    Ok((out, json!({ "kernel": kernel })))
}

/// Additive zero-mean Gaussian noise. Draw order: the variance, then one
/// normal deviate per sample in buffer order.
pub fn gaussian_noise(
    img: &Image,
    rng: &mut RngStream,
    p: &GaussianNoiseParams,
) -> Result<(Image, Value)> {
    let variance = rng.uniform(p.variance[0], p.variance[1])?;
    let sigma = variance.max(0.0).sqrt();
    let mut out = img.clone();
    for v in out.samples_mut() {
        *v = quantize(*v as f64 + sigma * rng.normal());
    }
    Ok((out, json!({ "variance": variance })))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blur_keeps_constant_images_identical() {
        let img = Image::constant(9, 7, 3, 201).unwrap();
        for k in [3, 5, 7] {
            assert_eq!(blur_with_kernel(&img, k).unwrap(), img);
        }
    }

    #[test]
    fn impulse_response_matches_kernel_weights() {
        // Unit impulse at the center of a 7x7 zero image, k = 3: the center
        // output is 255 * w0^2 with w0 the center tap.
        let mut img = Image::constant(7, 7, 1, 0).unwrap();
        img.set(3, 3, 0, 255);
        let out = blur_with_kernel(&img, 3).unwrap();
        let w0 = blur_kernel(3)[1];
        assert_eq!(out.get(3, 3, 0), quantize(255.0 * w0 * w0));
        // Diagonal neighbor gets 255 * w1^2.
        let w1 = blur_kernel(3)[0];
        assert_eq!(out.get(2, 2, 0), quantize(255.0 * w1 * w1));
    }

    #[test]
    fn blur_matches_direct_convolution_and_preserves_mean() {
        let mut rng = RngStream::new(500, 0);
        let samples: Vec<u8> = (0..16 * 12).map(|_| rng.index(256) as u8).collect();
        let img = Image::new(16, 12, 1, samples).unwrap();
        let out = blur_with_kernel(&img, 5).unwrap();

        // Direct 2-D convolution oracle.
        let taps = blur_kernel(5);
        let reflect = |i: i64, n: i64| -> i64 {
            let period = 2 * (n - 1);
            let mut r = i.rem_euclid(period);
            if r >= n {
                r = period - r;
            }
            r
        };
        for y in 0..12i64 {
            for x in 0..16i64 {
                let mut acc = 0.0;
                for dy in -2i64..=2 {
                    for dx in -2i64..=2 {
                        let sx = reflect(x + dx, 16);
                        let sy = reflect(y + dy, 12);
                        acc += taps[(dy + 2) as usize]
                            * taps[(dx + 2) as usize]
                            * img.get(sx as u32, sy as u32, 0) as f64;
                    }
                }
                assert_eq!(out.get(x as u32, y as u32, 0), quantize(acc));
            }
        }
    }

    #[test]
    fn blur_preserves_the_mean() {
        // Normalized kernel + reflect border: only border reflection and
        // rounding can move the mean, and both stay under half a level on
        // non-degenerate images.
        let mut rng = RngStream::new(321, 1);
        let random: Vec<u8> = (0..64 * 64).map(|_| rng.index(256) as u8).collect();
        let gradient: Vec<u8> =
            (0..64 * 64).map(|i| ((i % 64) * 2 + (i / 64) * 2).min(255) as u8).collect();
        for samples in [random, gradient] {
            let img = Image::new(64, 64, 1, samples).unwrap();
            for k in [3, 5, 7] {
                let out = blur_with_kernel(&img, k).unwrap();
                let drift = (out.mean() - img.mean()).abs();
                assert!(drift <= 0.5, "k={k} mean drift {drift}");
            }
        }
    }

    #[test]
    fn even_kernel_is_rejected() {
        let img = Image::constant(4, 4, 1, 0).unwrap();
        assert!(blur_with_kernel(&img, 4).is_err());
    }

    #[test]
    fn zero_variance_noise_is_identity() {
        let img = Image::constant(16, 16, 3, 90).unwrap();
        let mut rng = RngStream::new(1, 2);
        let p = GaussianNoiseParams { variance: [0.0, 0.0] };
        let (out, _) = gaussian_noise(&img, &mut rng, &p).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn noise_is_deterministic_per_stream() {
        let img = Image::constant(32, 32, 3, 127).unwrap();
        let p = GaussianNoiseParams::default();
        let (a, _) = gaussian_noise(&img, &mut RngStream::new(9, 9), &p).unwrap();
        let (b, _) = gaussian_noise(&img, &mut RngStream::new(9, 9), &p).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noise_stddev_tracks_requested_variance() {
        let img = Image::constant(512, 512, 1, 127).unwrap();
        let p = GaussianNoiseParams { variance: [25.0, 25.0] };
        let mut rng = RngStream::new(77, 1);
        let (out, log) = gaussian_noise(&img, &mut rng, &p).unwrap();
        assert_eq!(log["variance"], 25.0);
        let mean = out.mean();
        let var: f64 = out
            .samples()
            .iter()
            .map(|&v| (v as f64 - mean) * (v as f64 - mean))
            .sum::<f64>()
            / out.samples().len() as f64;
        let sd = var.sqrt();
        assert!((4.5..=5.5).contains(&sd), "sd {sd}");
    }
}
