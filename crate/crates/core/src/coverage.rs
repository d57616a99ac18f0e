//! Streaming coverage checks.
//!
//! Column t-sets are visited in lexicographic order. For each set the rows
//! are projected to tuple ranks (reusing the ranks of the shared prefix),
//! covered orbits are stamped into a mask sized for one column set, and the
//! unstamped orbits are emitted. Live memory is `O(t n + v^t)` plus the
//! output list, whatever `k` is.

use crate::combin::ColumnSetCursor;
use crate::error::Result;
use crate::groups::{GroupKind, OrbitTable, SymbolGroup, SHORT_ORBIT};
use crate::model::{Array, CoverageReport, Interaction, Parameters};

/// Uncovered orbits of `array` under `group`, stopping once more than
/// `cap` have been found.
pub fn uncovered_list(array: &Array, p: &Parameters, group: GroupKind, cap: u64) -> Result<CoverageReport> {
    let table = OrbitTable::new(&SymbolGroup::new(group, p.v)?, p.t)?;
    Ok(uncovered_with(array, &table, cap))
}

/// True iff every interaction of strength `t` is covered.
pub fn verify_covering_array(array: &Array, p: &Parameters) -> Result<bool> {
    Ok(first_uncovered(array, p)?.is_none())
}

/// The first uncovered interaction in scan order, if any.
pub fn first_uncovered(array: &Array, p: &Parameters) -> Result<Option<Interaction>> {
    let report = uncovered_list(array, p, GroupKind::Trivial, 0)?;
    Ok(report.uncovered.into_iter().next())
}

/// Dispatches to the parallel scan when the `parallel` feature is on.
pub fn uncovered_with(array: &Array, table: &OrbitTable, cap: u64) -> CoverageReport {
    #[cfg(feature = "parallel")]
    {
        uncovered_parallel(array, table, cap)
    }
    #[cfg(not(feature = "parallel"))]
    {
        uncovered_sequential(array, table, cap)
    }
}

pub fn uncovered_sequential(array: &Array, table: &OrbitTable, cap: u64) -> CoverageReport {
    let t = table.strength();
    let k = array.cols();
    let mut scan = Scan::new(array, table);
    let mut out = Vec::new();
    let limit = cap.saturating_add(1);
    for first in 0..k.saturating_sub(t - 1) {
        scan.unit(first, limit - out.len() as u64, &mut out);
        if out.len() as u64 >= limit {
            break;
        }
    }
    finish(out, cap)
}

/// Units per parallel batch. Fixed so results do not depend on the pool size.
#[cfg(feature = "parallel")]
const BATCH: usize = 8;

#[cfg(feature = "parallel")]
pub fn uncovered_parallel(array: &Array, table: &OrbitTable, cap: u64) -> CoverageReport {
    use rayon::prelude::*;
    let t = table.strength();
    let units: Vec<usize> = (0..array.cols().saturating_sub(t - 1)).collect();
    let limit = cap.saturating_add(1);
    let mut out = Vec::new();
    for batch in units.chunks(BATCH) {
        let remaining = limit - out.len() as u64;
        let parts: Vec<Vec<Interaction>> = batch
            .par_iter()
            .map(|&first| {
                let mut local = Vec::new();
                Scan::new(array, table).unit(first, remaining, &mut local);
                local
            })
            .collect();
        for part in parts {
            out.extend(part);
            if out.len() as u64 >= limit {
                break;
            }
        }
        if out.len() as u64 >= limit {
            break;
        }
    }
    finish(out, cap)
}

fn finish(mut out: Vec<Interaction>, cap: u64) -> CoverageReport {
    let truncated = out.len() as u64 > cap;
    if truncated {
        out.truncate(cap.saturating_add(1).min(usize::MAX as u64) as usize);
    }
    CoverageReport { uncovered_count: out.len() as u64, uncovered: out, truncated }
}

/// Per-worker scratch for scanning the column sets with a fixed first column.
struct Scan<'a> {
    array: &'a Array,
    table: &'a OrbitTable,
    /// `prefix[d]` holds each row's rank over the first `d + 1` chosen columns.
    prefix: Vec<Vec<u32>>,
    marks: Vec<u32>,
    epoch: u32,
}

impl<'a> Scan<'a> {
    fn new(array: &'a Array, table: &'a OrbitTable) -> Self {
        let t = table.strength();
        Scan {
            array,
            table,
            prefix: vec![vec![0; array.rows()]; t.saturating_sub(1)],
            marks: vec![0; table.len()],
            epoch: 0,
        }
    }

    /// Appends uncovered orbits of every t-set starting with `first`, up to
    /// `limit` items.
    fn unit(&mut self, first: usize, limit: u64, out: &mut Vec<Interaction>) {
        let t = self.table.strength();
        let k = self.array.cols();
        let start = out.len();
        let mut comb: Vec<usize> = (first..first + t).collect();
        // Depth of the first column whose prefix buffer is stale.
        let mut stale = 0;
        loop {
            for (d, &c) in comb.iter().enumerate().take(t - 1).skip(stale) {
                self.fill_prefix(d, c);
            }
            self.scan_set(&comb, out);
            if (out.len() - start) as u64 >= limit {
                return;
            }
            // Advance while keeping comb[0] == first.
            let mut i = t - 1;
            loop {
                if i == 0 {
                    return;
                }
                if comb[i] < k - t + i {
                    break;
                }
                i -= 1;
            }
            comb[i] += 1;
            for j in i + 1..t {
                comb[j] = comb[j - 1] + 1;
            }
            stale = i;
        }
    }

    fn fill_prefix(&mut self, depth: usize, column: usize) {
        let v = self.array.levels() as u32;
        let col = self.array.column(column);
        let (before, rest) = self.prefix.split_at_mut(depth);
        let cur = &mut rest[0];
        match before.last() {
            None => cur.iter_mut().zip(col).for_each(|(c, &s)| *c = s as u32),
            Some(prev) => cur.iter_mut().zip(prev).zip(col).for_each(|((c, &p), &s)| *c = p * v + s as u32),
        }
    }

    fn scan_set(&mut self, comb: &[usize], out: &mut Vec<Interaction>) {
        let v = self.array.levels() as u32;
        let last = self.array.column(*comb.last().unwrap());
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.marks.fill(0);
            self.epoch = 1;
        }
        let epoch = self.epoch;
        let table = self.table;
        let marks = &mut self.marks;
        let mut mark = |rank: usize| {
            let o = table.orbit_of_rank(rank);
            if o != SHORT_ORBIT {
                marks[o as usize] = epoch;
            }
        };
        match self.prefix.last() {
            None => last.iter().for_each(|&s| mark(s as usize)),
            Some(pre) => pre.iter().zip(last).for_each(|(&p, &s)| mark((p * v + s as u32) as usize)),
        }
        for (o, &m) in self.marks.iter().enumerate() {
            if m != epoch {
                out.push(Interaction { columns: comb.to_vec(), symbols: self.table.rep_symbols(o) });
            }
        }
    }
}

/// Orbits covered by `row` and by no row of `array`.
pub fn count_new_coverage(array: &Array, row: &[u8], table: &OrbitTable) -> u64 {
    let t = table.strength();
    let v = array.levels();
    let mut fresh = 0u64;
    let mut cursor = ColumnSetCursor::new(array.cols(), t);
    while let Some(cols) = cursor.next() {
        let rank = |get: &dyn Fn(usize) -> u8| cols.iter().fold(0usize, |acc, &c| acc * v + get(c) as usize);
        let o = table.orbit_of_rank(rank(&|c| row[c]));
        if o == SHORT_ORBIT {
            continue;
        }
        let seen = (0..array.rows()).any(|r| table.orbit_of_rank(rank(&|c| array.get(r, c))) == o);
        fresh += !seen as u64;
    }
    fresh
}
