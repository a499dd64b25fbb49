use crate::{ImageError, Result};

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer; the only mixing primitive used by the generator.
#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based deterministic random stream.
///
/// Output `i` of a stream is `mix(base + (i+1)·γ)` — pure 64-bit integer
/// arithmetic, so a given `(seed, stream_id)` yields the identical sequence
/// on every platform. Substreams are derived by hashing labels into the
/// base state, which makes results independent of execution order: two
/// images processed concurrently draw from unrelated streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    base: u64,
    counter: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self::derive(seed, &[stream_id])
    }

    /// Derive a substream from a seed and a list of labels
    /// (e.g. `[image_index, stage_index]`).
    pub fn derive(seed: u64, labels: &[u64]) -> Self {
        let mut base = mix(seed ^ GAMMA);
        for &label in labels {
            base = mix(base ^ label.wrapping_mul(GAMMA));
        }
        Self { base, counter: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix(self.base.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    /// Uniform draw in [0, 1) with 53-bit resolution.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Uniform draw in [lo, hi). A degenerate interval returns `lo` (and
    /// still consumes one draw, so stream positions stay aligned).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> Result<f64> {
        if lo > hi {
            return Err(ImageError::InvalidRange { lo, hi });
        }
        let u = self.next_f64();
        Ok(lo + u * (hi - lo))
    }

    /// Uniform index in [0, n). `n` must be at least 1.
    #[inline]
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n >= 1);
        let i = (self.next_f64() * n as f64) as usize;
        i.min(n - 1)
    }

    /// Uniform integer in [lo, hi] inclusive.
    #[inline]
    pub fn int_range(&mut self, lo: u32, hi: u32) -> u32 {
        debug_assert!(lo <= hi);
        lo + self.index((hi - lo + 1) as usize) as u32
    }

    /// Bernoulli trial; always consumes exactly one draw.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Standard normal via Box-Muller; consumes exactly two draws.
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64(); // (0, 1], keeps ln finite
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, slice: &mut [T]) {
        for i in (1..slice.len()).rev() {
            let j = self.index(i + 1);
            slice.swap(i, j);
        }
    }
}
