//! Seeded random streams.
//!
//! Every run owns one 64-bit seed. Each consumer draws from its own ChaCha8
//! stream, selected by `(purpose, index)`, so adding draws in one place never
//! shifts the numbers seen elsewhere.

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::Array;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    /// One stream per first-stage attempt.
    Stage1 = 1,
    /// Filling flexible cells in the second stage.
    Fill = 2,
    /// Moser-Tardos initial draw and resamples.
    Resample = 3,
}

pub fn stream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 48) | (index & ((1 << 48) - 1)));
    rng
}

/// Uniform `n x k` array, drawn column by column.
pub fn random_array(rng: &mut ChaCha8Rng, n: usize, k: usize, v: usize) -> Array {
    let dist = Uniform::new(0, v as u8);
    let cells: Vec<u8> = (0..n * k).map(|_| dist.sample(rng)).collect();
    Array::from_columns_unchecked(n, k, v, cells)
}
