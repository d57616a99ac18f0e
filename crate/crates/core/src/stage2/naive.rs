use rand_chacha::ChaCha8Rng;

use super::fill;
use crate::model::{Cell, Interaction};

/// One row per item: its columns fixed, everything else random.
pub fn naive_cover(uncovered: &[Interaction], k: usize, v: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<u8>> {
    let rows = uncovered
        .iter()
        .map(|item| {
            let mut row = vec![Cell::Flexible; k];
            for (&c, &s) in item.columns.iter().zip(&item.symbols) {
                row[c] = Cell::Fixed(s);
            }
            row
        })
        .collect();
    fill(rows, v, rng)
}
