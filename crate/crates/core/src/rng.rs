//! Seed derivation and random streams.
//!
//! Every random quantity in the crate is drawn from a ChaCha8 stream that is a
//! pure function of `(seed, stream)`. Experiments derive one seed per sample
//! index with [`derive_seed`], so the value of sample `i` never depends on how
//! samples are distributed over worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// SplitMix64 finalizer over `(seed, index)`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent ChaCha8 stream `stream` under key `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform point in the closed Euclidean ball of `radius` around `center`.
pub fn uniform_in_ball<R: Rng + ?Sized>(rng: &mut R, center: &[f64], radius: f64) -> Vec<f64> {
    let dim = center.len();
    let mut direction: Vec<f64> = (0..dim)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let len = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    if len == 0.0 {
        return center.to_vec();
    }
    let r = radius * rng.random::<f64>().powf(1.0 / dim as f64);
    for (d, c) in direction.iter_mut().zip(center) {
        *d = c + *d / len * r;
    }
    direction
}
