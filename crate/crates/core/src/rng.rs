//! Reproducible random streams.
//!
//! All randomness goes through ChaCha8, a counter-based generator. A `(seed,
//! stream)` pair identifies an independent sequence: the seed fills the key
//! and the stream index selects the ChaCha nonce, so splitting work across
//! restarts (or rows, or threads) by stream index gives identical results
//! regardless of how the work is scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use rand_chacha::ChaCha8Rng as StreamRng;

/// Generator for stream `stream` under `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw in `[0, 1)`.
#[inline]
pub fn unit(rng: &mut ChaCha8Rng) -> f64 {
    rng.random::<f64>()
}

/// Uniform index in `0..n`; `n` must be positive.
#[inline]
pub fn index(rng: &mut ChaCha8Rng, n: usize) -> usize {
    rng.random_range(0..n)
}

/// Bernoulli draw with success probability `p` (clamped to `[0, 1]`).
#[inline]
pub fn bernoulli(rng: &mut ChaCha8Rng, p: f64) -> bool {
    p >= 1.0 || (p > 0.0 && unit(rng) < p)
}

/// Uniform point on the probability simplex of dimension `q`.
pub fn simplex_point(rng: &mut ChaCha8Rng, q: usize) -> alloc::vec::Vec<f64> {
    let mut v: alloc::vec::Vec<f64> = (0..q)
        .map(|_| -crate::math::ln(1.0 - unit(rng)))
        .collect();
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        v.iter_mut().for_each(|x| *x /= s);
    } else {
        v.iter_mut().for_each(|x| *x = 1.0 / q as f64);
    }
    v
}
