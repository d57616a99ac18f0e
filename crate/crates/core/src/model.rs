//! Shared vocabulary: parameter triples, arrays, interactions and coverage
//! reports.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest alphabet supported; symbols are stored as bytes.
pub const MAX_LEVELS: usize = 255;

/// Exact binomial coefficient `C(n, r)`; zero when `r > n`.
pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        // acc * (n - i) is always divisible by (i + 1) at this point.
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, r)` as a `u64`, or `None` when it does not fit.
pub fn binomial_u64(n: u64, r: u64) -> Option<u64> {
    binomial(n, r).to_u64()
}

/// Natural logarithm of an arbitrarily large unsigned integer.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Strength `t`, factor count `k` and level count `v` of a covering array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Parameters {
    pub t: usize,
    pub k: usize,
    pub v: usize,
}

impl Parameters {
    pub fn new(t: usize, k: usize, v: usize) -> Result<Self> {
        if t < 2 {
            return Err(Error::InvalidParameters(format!("strength t = {t} must be at least 2")));
        }
        if k < t {
            return Err(Error::InvalidParameters(format!("k = {k} must be at least t = {t}")));
        }
        if v < 2 {
            return Err(Error::InvalidParameters(format!("v = {v} must be at least 2")));
        }
        if v > MAX_LEVELS {
            return Err(Error::InvalidParameters(format!("v = {v} exceeds the supported maximum {MAX_LEVELS}")));
        }
        Ok(Parameters { t, k, v })
    }

    /// `v^t` as a float; exact for every alphabet the tables can index.
    pub fn vt_f64(&self) -> f64 {
        (self.v as f64).powi(self.t as i32)
    }

    /// `v^t` when it fits a `u64`.
    pub fn vt_u64(&self) -> Option<u64> {
        (self.v as u64).checked_pow(self.t as u32)
    }

    /// Number of column t-sets, `C(k, t)`.
    pub fn column_sets(&self) -> BigUint {
        binomial(self.k as u64, self.t as u64)
    }

    pub fn derived(&self) -> DerivedConstants {
        DerivedConstants::new(self)
    }
}

/// Constants every bound formula leans on.
///
/// `rho` is the expected number of interactions left uncovered by the
/// first stage at the two-stage optimum; `dep_degree` is the number of
/// column t-sets that share a column with a fixed one. They are unrelated
/// quantities and kept apart.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedConstants {
    pub vt: BigUint,
    pub rho: f64,
    pub eta: BigUint,
    pub dep_degree: BigUint,
}

impl DerivedConstants {
    pub fn new(p: &Parameters) -> Self {
        let vt = BigUint::from(p.v).pow(p.t as u32);
        let eta = p.column_sets();
        let disjoint = binomial((p.k - p.t) as u64, p.t as u64);
        DerivedConstants {
            rho: 1.0 / miss_log(p.vt_f64()),
            dep_degree: &eta - disjoint,
            vt,
            eta,
        }
    }
}

/// `ln(q / (q - 1))`, evaluated through `ln_1p` so that large `q` keeps
/// full relative precision.
pub fn miss_log(q: f64) -> f64 {
    (1.0 / (q - 1.0)).ln_1p()
}

/// Total number of t-way interactions, `C(k,t) v^t`.
pub fn interaction_count(p: &Parameters) -> BigUint {
    p.column_sets() * BigUint::from(p.v).pow(p.t as u32)
}

/// A t-set of columns together with one symbol per column.
///
/// Under a symbol group the symbols hold the orbit's canonical
/// representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Interaction {
    pub columns: Vec<usize>,
    pub symbols: Vec<u8>,
}

impl Interaction {
    pub fn new(columns: Vec<usize>, symbols: Vec<u8>) -> Result<Self> {
        if columns.len() != symbols.len() {
            return Err(Error::InvalidParameters(format!(
                "{} columns but {} symbols",
                columns.len(),
                symbols.len()
            )));
        }
        if columns.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameters(format!("columns {columns:?} are not strictly increasing")));
        }
        Ok(Interaction { columns, symbols })
    }

    /// True when some row of `array` agrees with this interaction.
    pub fn is_covered_by(&self, array: &Array) -> bool {
        (0..array.rows()).any(|r| self.matches_row(|c| array.get(r, c)))
    }

    pub fn matches_row(&self, row: impl Fn(usize) -> u8) -> bool {
        self.columns.iter().zip(&self.symbols).all(|(&c, &s)| row(c) == s)
    }

    /// True when the two interactions disagree on some shared column.
    pub fn conflicts_with(&self, other: &Interaction) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.columns.len() && j < other.columns.len() {
            match self.columns[i].cmp(&other.columns[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    if self.symbols[i] != other.symbols[j] {
                        return true;
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        false
    }
}

/// A fully specified `n x k` array over `[0, v)`.
///
/// Storage is column-major: coverage scans walk one column at a time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Array {
    n: usize,
    k: usize,
    v: usize,
    cells: Vec<u8>,
}

impl Array {
    pub fn empty(k: usize, v: usize) -> Self {
        Array { n: 0, k, v, cells: Vec::new() }
    }

    pub fn from_rows(k: usize, v: usize, rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        let mut cells = vec![0u8; n * k];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidParameters(format!("row {r} has {} cells, expected {k}", row.len())));
            }
            for (c, &s) in row.iter().enumerate() {
                if s as usize >= v {
                    return Err(Error::InvalidParameters(format!("symbol {s} at row {r}, column {c} is not below v = {v}")));
                }
                cells[c * n + r] = s;
            }
        }
        Ok(Array { n, k, v, cells })
    }

    /// Builds an array from column-major cells without range checks.
    pub(crate) fn from_columns_unchecked(n: usize, k: usize, v: usize, cells: Vec<u8>) -> Self {
        debug_assert_eq!(cells.len(), n * k);
        Array { n, k, v, cells }
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.k
    }

    pub fn levels(&self) -> usize {
        self.v
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.cells[c * self.n + r]
    }

    pub fn column(&self, c: usize) -> &[u8] {
        &self.cells[c * self.n..(c + 1) * self.n]
    }

    pub(crate) fn column_mut(&mut self, c: usize) -> &mut [u8] {
        let n = self.n;
        &mut self.cells[c * n..(c + 1) * n]
    }

    pub fn row(&self, r: usize) -> Vec<u8> {
        (0..self.k).map(|c| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.n).map(|r| self.row(r)).collect()
    }

    /// Appends rows below the existing ones.
    pub fn append_rows(&mut self, rows: &[Vec<u8>]) -> Result<()> {
        if rows.is_empty() {
            return Ok(());
        }
        let extra = Array::from_rows(self.k, self.v, rows)?;
        let n = self.n + extra.n;
        let mut cells = Vec::with_capacity(n * self.k);
        for c in 0..self.k {
            cells.extend_from_slice(self.column(c));
            cells.extend_from_slice(extra.column(c));
        }
        self.n = n;
        self.cells = cells;
        Ok(())
    }
}

/// One cell of a partially specified row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Fixed(u8),
    Flexible,
}

/// Rows whose cells are either fixed to a symbol or still free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialArray {
    k: usize,
    v: usize,
    rows: Vec<Vec<Cell>>,
}

impl PartialArray {
    pub fn new(k: usize, v: usize) -> Self {
        PartialArray { k, v, rows: Vec::new() }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.k {
            return Err(Error::InvalidParameters(format!("row has {} cells, expected {}", row.len(), self.k)));
        }
        if let Some(Cell::Fixed(s)) = row.iter().find(|c| matches!(c, Cell::Fixed(s) if *s as usize >= self.v)) {
            return Err(Error::InvalidParameters(format!("symbol {s} is not below v = {}", self.v)));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn is_fully_fixed(&self) -> bool {
        self.rows.iter().flatten().all(|c| matches!(c, Cell::Fixed(_)))
    }

    /// The ordinary array, when no cell is flexible.
    pub fn to_array(&self) -> Option<Array> {
        let rows: Option<Vec<Vec<u8>>> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| match c {
                        Cell::Fixed(s) => Some(*s),
                        Cell::Flexible => None,
                    })
                    .collect()
            })
            .collect();
        Array::from_rows(self.k, self.v, &rows?).ok()
    }

    /// Fills every flexible cell with `fill()` and returns the array.
    pub fn fill_with(&self, mut fill: impl FnMut() -> u8) -> Array {
        let rows: Vec<Vec<u8>> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| match c {
                        Cell::Fixed(s) => *s,
                        Cell::Flexible => fill(),
                    })
                    .collect()
            })
            .collect();
        Array::from_rows(self.k, self.v, &rows).expect("fixed cells were range checked on insert")
    }
}

/// Interactions (or orbit representatives) an array fails to cover.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct CoverageReport {
    pub uncovered: Vec<Interaction>,
    pub uncovered_count: u64,
    /// True when the scan stopped at its cap; `uncovered` then holds only
    /// the first `cap + 1` items in scan order.
    pub truncated: bool,
}

impl CoverageReport {
    pub fn is_complete(&self) -> bool {
        self.uncovered_count == 0
    }
}
