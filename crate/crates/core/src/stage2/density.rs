use crate::error::{Error, Result};
use crate::groups::SymbolGroup;
use crate::model::Interaction;

/// Builds rows by conditional expectation until every item is covered.
///
/// A row starts fully flexible. At each step the (column, symbol) pair that
/// maximises the expected number of items covered by a uniform completion
/// is fixed, ties to the lowest column and then the lowest symbol. An item
/// with `f` free columns contributes `v^-f` for every image still consistent
/// with the row; the images are disjoint events, so this is exact. Scores
/// are kept as integers scaled by `v^t`.
///
/// Every row covers at least `ceil(u * len / v^t)` of the `u` remaining
/// items, where `len` is the orbit length; a shortfall is reported as
/// [`Error::GuaranteeViolated`].
pub fn density_cover(uncovered: &[Interaction], k: usize, group: &SymbolGroup) -> Result<Vec<Vec<u8>>> {
    let v = group.levels();
    let Some(t) = uncovered.first().map(|i| i.columns.len()) else {
        return Ok(Vec::new());
    };
    let vt = (v as u128).pow(t as u32);
    let pow: Vec<u128> = (0..=t).map(|e| (v as u128).pow(e as u32)).collect();
    let orbit_len = group.full_orbit_len() as u128;

    let items: Vec<Item> = uncovered
        .iter()
        .map(|i| Item { columns: i.columns.clone(), images: group.images(&i.symbols) })
        .collect();
    let mut alive: Vec<usize> = (0..items.len()).collect();
    let mut rows = Vec::new();

    while !alive.is_empty() {
        let u = alive.len() as u128;
        let mut by_column: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (slot, &i) in alive.iter().enumerate() {
            for &c in &items[i].columns {
                by_column[c].push(slot);
            }
        }
        // Per alive item: consistent image indices and number of free columns.
        let mut consistent: Vec<Vec<u16>> = alive.iter().map(|&i| (0..items[i].images.len() as u16).collect()).collect();
        let mut free: Vec<usize> = vec![t; alive.len()];
        let mut row: Vec<Option<u8>> = vec![None; k];
        let mut counts = vec![0u128; v];

        for _ in 0..k {
            let mut best: Option<(i128, usize, u8)> = None;
            for c in (0..k).filter(|&c| row[c].is_none()) {
                counts.iter_mut().for_each(|x| *x = 0);
                let mut before: u128 = 0;
                for &slot in &by_column[c] {
                    let imgs = &consistent[slot];
                    if imgs.is_empty() {
                        continue;
                    }
                    let item = &items[alive[slot]];
                    let pos = item.columns.iter().position(|&x| x == c).unwrap();
                    let weight = pow[t - free[slot]];
                    before += imgs.len() as u128 * weight;
                    for &g in imgs {
                        counts[item.images[g as usize][pos] as usize] += weight * v as u128;
                    }
                }
                for (s, &after) in counts.iter().enumerate() {
                    let gain = after as i128 - before as i128;
                    if best.is_none_or(|(b, _, _)| gain > b) {
                        best = Some((gain, c, s as u8));
                    }
                }
            }
            let (_, c, s) = best.expect("an unfixed column remains");
            row[c] = Some(s);
            for &slot in &by_column[c] {
                let item = &items[alive[slot]];
                let pos = item.columns.iter().position(|&x| x == c).unwrap();
                consistent[slot].retain(|&g| item.images[g as usize][pos] == s);
                free[slot] -= 1;
            }
        }

        let row: Vec<u8> = row.into_iter().map(|c| c.unwrap()).collect();
        let before = alive.len();
        let mut keep = Vec::with_capacity(alive.len());
        for (slot, &i) in alive.iter().enumerate() {
            if consistent[slot].is_empty() {
                keep.push(i);
            }
        }
        let covered = (before - keep.len()) as u128;
        let required = (u * orbit_len).div_ceil(vt);
        if covered < required {
            return Err(Error::GuaranteeViolated { uncovered: before, covered: covered as usize, required: required as usize });
        }
        alive = keep;
        rows.push(row);
    }
    Ok(rows)
}

struct Item {
    columns: Vec<usize>,
    images: Vec<Vec<u8>>,
}
