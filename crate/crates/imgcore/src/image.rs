use crate::{ImageError, Result};

/// Row-major 8-bit raster with 1 (gray) or 3 (rgb) channels.
///
/// Invariant: `samples.len() == width * height * channels`, all dimensions
/// at least 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: u32,
    height: u32,
    channels: u8,
    samples: Vec<u8>,
}

impl Image {
    pub fn new(width: u32, height: u32, channels: u8, samples: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(ImageError::InvalidGeometry(format!(
                "dimensions {width}x{height} must be at least 1x1"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(ImageError::InvalidGeometry(format!(
                "channels must be 1 or 3, got {channels}"
            )));
        }
        let expected = width as usize * height as usize * channels as usize;
        if samples.len() != expected {
            return Err(ImageError::InvalidGeometry(format!(
                "sample buffer has {} bytes, expected {expected}",
                samples.len()
            )));
        }
        Ok(Self { width, height, channels, samples })
    }

    /// Image filled with a single value in every sample.
    pub fn constant(width: u32, height: u32, channels: u8, value: u8) -> Result<Self> {
        let len = width as usize * height as usize * channels as usize;
        Self::new(width, height, channels, vec![value; len])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [u8] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<u8> {
        self.samples
    }

    #[inline]
    pub fn sample_index(&self, x: u32, y: u32, c: u8) -> usize {
        (y as usize * self.width as usize + x as usize) * self.channels as usize + c as usize
    }

    /// Sample at (x, y) for channel `c`. Callers guarantee bounds.
    #[inline]
    pub fn get(&self, x: u32, y: u32, c: u8) -> u8 {
        self.samples[self.sample_index(x, y, c)]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, c: u8, v: u8) {
        let i = self.sample_index(x, y, c);
        self.samples[i] = v;
    }

    /// Pixel as up-to-3 channel values.
    #[inline]
    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let mut px = [0u8; 3];
        for c in 0..self.channels {
            px[c as usize] = self.get(x, y, c);
        }
        px
    }

    /// Rec. 601 luminance of the pixel, rounded half-up. Gray images return
    /// the sample itself.
    #[inline]
    pub fn luminance(&self, x: u32, y: u32) -> u8 {
        if self.channels == 1 {
            return self.get(x, y, 0);
        }
        let [r, g, b] = self.pixel(x, y);
        crate::quantize(0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64)
    }

    /// Mean over all samples.
    pub fn mean(&self) -> f64 {
        let sum: u64 = self.samples.iter().map(|&v| v as u64).sum();
        sum as f64 / self.samples.len() as f64
    }

    /// True if every sample holds the same value.
    pub fn is_constant(&self) -> bool {
        self.samples.windows(2).all(|w| w[0] == w[1])
    }

    pub fn require_channels(&self, expected: u8) -> Result<()> {
        if self.channels != expected {
            return Err(ImageError::ChannelMismatch { expected, got: self.channels });
        }
        Ok(())
    }
}
