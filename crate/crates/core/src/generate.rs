//! Seeded random instances.
//!
//! Algorithm: a `ChaCha8Rng` seeded with `seed_from_u64(seed)` draws
//! `rng.random_range(lo..=hi)` as `i64`, first for the `n*n` distance entries
//! row-major, then for the `n*n` flow entries row-major. ChaCha output and the
//! integer range sampler are both platform independent.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::QapInstance;
use crate::scalar::Scalar;
use crate::{Error, Result};

pub fn generate_instance<S: Scalar>(n: usize, seed: u64, lo: i64, hi: i64) -> Result<QapInstance<S>> {
    if lo > hi {
        return Err(Error::InvalidBounds { lo, hi });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |count: usize| -> Vec<S> { (0..count).map(|_| S::from_i64(rng.random_range(lo..=hi))).collect() };
    let r = draw(n * n);
    let w = draw(n * n);
    QapInstance::new(n, r, w)
}
