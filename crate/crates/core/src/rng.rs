//! Counter-based seeded randomness.
//!
//! Every random draw is addressed by `(seed, stream)`, so the value a sample
//! receives does not depend on how many draws happened before it or on the
//! order in which samples are evaluated.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Generator for the sample addressed by `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Isotropic standard Gaussian vector of length `len`.
pub fn gaussian_vector(rng: &mut ChaCha8Rng, len: usize) -> DVector<f64> {
    DVector::from_iterator(len, (0..len).map(|_| StandardNormal.sample(rng)))
}

/// Uniformly distributed point of the Euclidean unit sphere in `R^len`.
pub fn unit_vector(rng: &mut ChaCha8Rng, len: usize) -> DVector<f64> {
    loop {
        let v = gaussian_vector(rng, len);
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Mixes a stream index with a tag so that different sampling purposes
/// sharing one seed never collide.
pub fn tagged_stream(tag: u32, index: u64) -> u64 {
    ((tag as u64) << 48) ^ index
}
