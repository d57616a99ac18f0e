//! Symbol-group actions: the trivial group, the cyclic group `x -> x + b
//! (mod v)` and the Frobenius group `x -> a x + b` over GF(v).
//!
//! The group acts on every symbol of a tuple at once. Covering one member
//! of each orbit and then developing every row over the group yields a
//! covering array whose size is the base size times the group order (plus
//! `v` constant rows for the Frobenius group, whose constant-tuple orbit is
//! short and is never tracked by the construction stages).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::Serialize;

use crate::combin::{tuple_rank, tuple_unrank};
use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::model::{miss_log, Array, Interaction, Parameters};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    Trivial,
    Cyclic,
    Frobenius,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupKind::Trivial => "trivial",
            GroupKind::Cyclic => "cyclic",
            GroupKind::Frobenius => "frobenius",
        })
    }
}

impl FromStr for GroupKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "trivial" => Ok(GroupKind::Trivial),
            "cyclic" => Ok(GroupKind::Cyclic),
            "frobenius" => Ok(GroupKind::Frobenius),
            other => Err(format!("unknown group '{other}' (expected trivial, cyclic or frobenius)")),
        }
    }
}

/// A concrete permutation group on the symbols `[0, v)`.
#[derive(Debug, Clone)]
pub struct SymbolGroup {
    kind: GroupKind,
    v: usize,
    field: Option<FiniteField>,
    /// `perms[g][x]` is the image of symbol `x` under element `g`.
    perms: Vec<Vec<u8>>,
}

impl SymbolGroup {
    pub fn new(kind: GroupKind, v: usize) -> Result<Self> {
        let (field, perms) = match kind {
            GroupKind::Trivial => (None, vec![(0..v as u8).collect()]),
            GroupKind::Cyclic => {
                let perms = (0..v).map(|b| (0..v).map(|x| ((x + b) % v) as u8).collect()).collect();
                (None, perms)
            }
            GroupKind::Frobenius => {
                let f = FiniteField::new(v)?;
                let mut perms = Vec::with_capacity(v * (v - 1));
                for a in 1..v as u8 {
                    for b in 0..v as u8 {
                        perms.push((0..v as u8).map(|x| f.add(f.mul(a, x), b)).collect());
                    }
                }
                (Some(f), perms)
            }
        };
        Ok(SymbolGroup { kind, v, field, perms })
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn levels(&self) -> usize {
        self.v
    }

    /// Number of group elements, i.e. how many rows each base row develops into.
    pub fn order(&self) -> usize {
        self.perms.len()
    }

    /// Length of a full orbit of t-tuples (t >= 2).
    pub fn full_orbit_len(&self) -> usize {
        self.order()
    }

    /// Constant rows appended after development.
    pub fn constant_rows(&self) -> usize {
        match self.kind {
            GroupKind::Frobenius => self.v,
            _ => 0,
        }
    }

    pub fn field(&self) -> Option<&FiniteField> {
        self.field.as_ref()
    }

    pub fn apply(&self, element: usize, symbols: &[u8]) -> Vec<u8> {
        let perm = &self.perms[element];
        symbols.iter().map(|&s| perm[s as usize]).collect()
    }

    /// Canonical representative of the orbit of `symbols`, and whether the
    /// orbit is short (constant tuples under the Frobenius group).
    ///
    /// Cyclic: shift so the first symbol is 0. Frobenius: map the first
    /// symbol to 0 and the first symbol that differs from it to 1.
    pub fn canonicalize(&self, symbols: &[u8]) -> (Vec<u8>, bool) {
        match self.kind {
            GroupKind::Trivial => (symbols.to_vec(), false),
            GroupKind::Cyclic => {
                let v = self.v as u8;
                let first = symbols.first().copied().unwrap_or(0);
                (symbols.iter().map(|&s| (s + v - first) % v).collect(), false)
            }
            GroupKind::Frobenius => {
                let f = self.field.as_ref().expect("Frobenius group carries its field");
                let first = symbols.first().copied().unwrap_or(0);
                match symbols.iter().find(|&&s| s != first) {
                    None => (vec![0; symbols.len()], true),
                    Some(&other) => {
                        let a = f.inv(f.sub(other, first)).expect("nonzero difference");
                        (symbols.iter().map(|&s| f.mul(a, f.sub(s, first))).collect(), false)
                    }
                }
            }
        }
    }

    /// The distinct images of `symbols`, in group-element order.
    pub fn images(&self, symbols: &[u8]) -> Vec<Vec<u8>> {
        let mut out: Vec<Vec<u8>> = Vec::with_capacity(self.order());
        for g in 0..self.order() {
            let img = self.apply(g, symbols);
            if !out.contains(&img) {
                out.push(img);
            }
        }
        out
    }

    pub fn orbit_of(&self, interaction: &Interaction) -> Orbit {
        let (canonical, is_short) = self.canonicalize(&interaction.symbols);
        let orbit_length = if is_short { self.v } else { self.images(&canonical).len() };
        Orbit { columns: interaction.columns.clone(), canonical_symbols: canonical, orbit_length, is_short }
    }

    /// Every base row expanded by every group element (row-major, elements
    /// in order), followed by the constant rows for the Frobenius group.
    pub fn develop(&self, base: &Array) -> Array {
        let n = base.rows();
        let k = base.cols();
        let order = self.order();
        let extra = self.constant_rows();
        let n_out = n * order + extra;
        let mut cells = vec![0u8; n_out * k];
        for c in 0..k {
            let col = base.column(c);
            let out = &mut cells[c * n_out..(c + 1) * n_out];
            for (r, &s) in col.iter().enumerate() {
                for (g, perm) in self.perms.iter().enumerate() {
                    out[r * order + g] = perm[s as usize];
                }
            }
            for s in 0..extra {
                out[n * order + s] = s as u8;
            }
        }
        Array::from_columns_unchecked(n_out, k, self.v, cells)
    }

    /// Per-column-set orbit bookkeeping for strength `t`.
    pub fn orbit_model(&self, p: &Parameters) -> OrbitModel {
        let vt = p.vt_f64();
        let len = self.full_orbit_len() as f64;
        let per_set = match self.kind {
            GroupKind::Trivial => (p.v as u64).pow(p.t as u32),
            GroupKind::Cyclic => (p.v as u64).pow(p.t as u32 - 1),
            GroupKind::Frobenius => ((p.v as u64).pow(p.t as u32 - 1) - 1) / (p.v as u64 - 1),
        };
        OrbitModel {
            orbits_per_set: per_set,
            orbit_len: self.full_orbit_len(),
            miss_log: miss_log(vt / len),
            multiplicity: self.order(),
            constant_rows: self.constant_rows(),
        }
    }
}

/// A t-set of columns with the canonical tuple of one orbit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Orbit {
    pub columns: Vec<usize>,
    pub canonical_symbols: Vec<u8>,
    pub orbit_length: usize,
    pub is_short: bool,
}

/// How full orbits behave under a random first stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitModel {
    /// Full orbits on each column t-set.
    pub orbits_per_set: u64,
    pub orbit_len: usize,
    /// `ln(1 / (1 - orbit_len / v^t))`, the per-row decay rate of the
    /// probability that a full orbit is still uncovered.
    pub miss_log: f64,
    /// Rows produced per base row on development.
    pub multiplicity: usize,
    pub constant_rows: usize,
}

impl OrbitModel {
    /// Expected number of full orbits a random first stage leaves uncovered
    /// per unit `1/miss_log`.
    pub fn rho(&self) -> f64 {
        1.0 / self.miss_log
    }

    /// Probability that one random row covers a given full orbit.
    pub fn hit_probability(&self, p: &Parameters) -> f64 {
        self.orbit_len as f64 / p.vt_f64()
    }
}

/// Number of `(full, short)` orbits over all column t-sets.
pub fn orbit_count(p: &Parameters, kind: GroupKind) -> Result<(BigUint, BigUint)> {
    let sets = p.column_sets();
    let v = BigUint::from(p.v);
    Ok(match kind {
        GroupKind::Trivial => (sets * v.pow(p.t as u32), BigUint::default()),
        GroupKind::Cyclic => (sets * v.pow(p.t as u32 - 1), BigUint::default()),
        GroupKind::Frobenius => {
            if crate::field::prime_power(p.v).is_none() {
                return Err(Error::NotPrimePower(p.v));
            }
            let per_set = (v.pow(p.t as u32 - 1) - 1u32) / (v - 1u32);
            (&sets * per_set, sets)
        }
    })
}

/// Marker for tuples in the short (constant) orbit.
pub const SHORT_ORBIT: u32 = u32::MAX;

/// Maps every tuple rank of one column t-set to its full-orbit index.
///
/// Full orbits are numbered in increasing order of their canonical tuple's
/// rank; tuples of the short orbit map to [`SHORT_ORBIT`].
#[derive(Debug, Clone)]
pub struct OrbitTable {
    t: usize,
    v: usize,
    orbit_of: Vec<u32>,
    reps: Vec<u32>,
}

/// Largest `v^t` for which rank tables are built.
pub const MAX_TABLE: usize = 1 << 26;

impl OrbitTable {
    pub fn new(group: &SymbolGroup, t: usize) -> Result<Self> {
        let v = group.levels();
        let size = v
            .checked_pow(t as u32)
            .filter(|&s| s <= MAX_TABLE)
            .ok_or_else(|| Error::InvalidParameters(format!("v^t = {v}^{t} is too large to tabulate")))?;
        let mut canon_rank = vec![0u32; size];
        let mut short = vec![false; size];
        for r in 0..size {
            let tup = tuple_unrank(r, t, v);
            let (c, is_short) = group.canonicalize(&tup);
            canon_rank[r] = tuple_rank(&c, v) as u32;
            short[r] = is_short;
        }
        let mut index = vec![SHORT_ORBIT; size];
        let mut reps = Vec::new();
        for r in 0..size {
            if !short[r] && canon_rank[r] as usize == r {
                index[r] = reps.len() as u32;
                reps.push(r as u32);
            }
        }
        let orbit_of = (0..size).map(|r| if short[r] { SHORT_ORBIT } else { index[canon_rank[r] as usize] }).collect();
        Ok(OrbitTable { t, v, orbit_of, reps })
    }

    pub fn strength(&self) -> usize {
        self.t
    }

    pub fn levels(&self) -> usize {
        self.v
    }

    /// Number of full orbits per column t-set.
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Full-orbit index of a tuple rank, or [`SHORT_ORBIT`].
    #[inline]
    pub fn orbit_of_rank(&self, rank: usize) -> u32 {
        self.orbit_of[rank]
    }

    pub fn rep_rank(&self, orbit: usize) -> usize {
        self.reps[orbit] as usize
    }

    pub fn rep_symbols(&self, orbit: usize) -> Vec<u8> {
        tuple_unrank(self.reps[orbit] as usize, self.t, self.v)
    }
}
