use rand_chacha::ChaCha8Rng;

use super::{compatible, fill};
use crate::groups::SymbolGroup;
use crate::model::{Cell, Interaction};

/// First fit: each item goes into the first row with a compatible image,
/// using the compatible image of lowest group element. A new row takes the
/// canonical representative. Placements are never revisited.
pub fn greedy_cover(uncovered: &[Interaction], k: usize, group: &SymbolGroup, rng: &mut ChaCha8Rng) -> Vec<Vec<u8>> {
    let mut rows: Vec<Vec<Cell>> = Vec::new();
    for item in uncovered {
        let images = group.images(&item.symbols);
        let placed = rows.iter_mut().find_map(|row| {
            let img = images.iter().find(|img| compatible(row, &item.columns, img))?;
            Some((row, img.clone()))
        });
        match placed {
            Some((row, img)) => {
                for (&c, &s) in item.columns.iter().zip(&img) {
                    row[c] = Cell::Fixed(s);
                }
            }
            None => {
                let mut row = vec![Cell::Flexible; k];
                for (&c, &s) in item.columns.iter().zip(&item.symbols) {
                    row[c] = Cell::Fixed(s);
                }
                rows.push(row);
            }
        }
    }
    fill(rows, group.levels(), rng)
}
