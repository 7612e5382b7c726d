//! Memoryless AWGN channel with reproducible, stream-splittable randomness.
//!
//! Every random draw in the crate flows through an [`RngStream`]: a (seed,
//! stream id) pair mapped onto ChaCha8's independent-stream mechanism. Workers
//! derive disjoint substreams instead of sharing a generator, which is what
//! makes sweeps deterministic regardless of how work is partitioned.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// One channel transmission: the received vector and the noise that produced
/// it (retained for diagnostics; y = x + z holds exactly).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOutput {
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

/// A reproducible random stream: identical (seed, stream) pairs yield
/// identical sequences, distinct stream ids are statistically independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

/// SplitMix64 finalizer; scrambles structured tags (row keys, chunk indices)
/// into well-spread stream ids.
#[inline]
pub(crate) fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngStream { seed, stream }
    }

    /// Instantiate the generator for this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Derive a child stream. Children with distinct tags are independent of
    /// each other and of the parent.
    pub fn substream(&self, tag: u64) -> RngStream {
        RngStream {
            seed: self.seed,
            stream: mix64(self.stream ^ mix64(tag)),
        }
    }
}

/// Transmit `x` over the AWGN channel: y_i = x_i + z_i with z_i iid
/// N(0, noise_var). `noise_var = 0` is the exact noiseless mode.
pub fn transmit<R: Rng + ?Sized>(x: &[f64], noise_var: f64, rng: &mut R) -> Result<ChannelOutput> {
    if !(noise_var >= 0.0) || !noise_var.is_finite() {
        return Err(Error::arg(format!("noise variance must be nonnegative, got {noise_var}")));
    }
    if noise_var == 0.0 {
        return Ok(ChannelOutput { y: x.to_vec(), z: vec![0.0; x.len()] });
    }
    let sd = noise_var.sqrt();
    let mut y = Vec::with_capacity(x.len());
    let mut z = Vec::with_capacity(x.len());
    for &xi in x {
        let zi: f64 = sd * rng.sample::<f64, _>(StandardNormal);
        z.push(zi);
        y.push(xi + zi);
    }
    Ok(ChannelOutput { y, z })
}
