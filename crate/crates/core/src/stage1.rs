//! First-stage strategies: a uniformly random array accepted once it leaves
//! few enough orbits uncovered, and Moser-Tardos resampling.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;
use rand::distributions::{Distribution, Uniform};
use rand_chacha::ChaCha8Rng;

use crate::bounds::lll_first_stage_for;
use crate::combin::{advance, tuple_rank, ColumnSetCursor};
use crate::coverage::uncovered_with;
use crate::error::{Error, Result};
use crate::groups::{GroupKind, OrbitModel, OrbitTable, SymbolGroup, SHORT_ORBIT};
use crate::model::{ln_big, Array, CoverageReport, Parameters};
use crate::rng::{random_array, stream, Purpose};

pub const DEFAULT_MAX_RETRIES: u32 = 20;
pub const DEFAULT_ITERATION_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stage1Config {
    pub n: u64,
    /// Largest accepted number of uncovered orbits.
    pub r: f64,
    pub max_retries: u32,
    pub seed: u64,
}

impl Stage1Config {
    pub fn new(n: u64, r: f64, seed: u64) -> Self {
        Stage1Config { n, r, max_retries: DEFAULT_MAX_RETRIES, seed }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stage1Output {
    /// Base rows, before development over the group.
    pub array: Array,
    pub report: CoverageReport,
    /// Attempts drawn (rand) or resamples performed (MT).
    pub attempts: u64,
}

/// Draws uniform `n x k` arrays until one leaves at most `r` orbits
/// uncovered.
pub fn rand_first_stage(p: &Parameters, group: GroupKind, cfg: &Stage1Config) -> Result<Stage1Output> {
    let table = OrbitTable::new(&SymbolGroup::new(group, p.v)?, p.t)?;
    rand_first_stage_with(p, &table, cfg)
}

pub fn rand_first_stage_with(p: &Parameters, table: &OrbitTable, cfg: &Stage1Config) -> Result<Stage1Output> {
    if cfg.r.is_nan() || cfg.r < 0.0 {
        return Err(Error::InvalidParameters(format!("r = {} must be non-negative", cfg.r)));
    }
    let n = usize::try_from(cfg.n).map_err(|_| Error::InvalidParameters(format!("n = {} is too large", cfg.n)))?;
    let cap = if cfg.r >= u64::MAX as f64 { u64::MAX } else { cfg.r.floor() as u64 };
    for attempt in 0..cfg.max_retries.max(1) {
        let mut rng = stream(cfg.seed, Purpose::Stage1, attempt as u64);
        let array = random_array(&mut rng, n, p.k, p.v);
        let report = uncovered_with(&array, table, cap);
        if !report.truncated {
            return Ok(Stage1Output { array, report, attempts: attempt as u64 + 1 });
        }
    }
    Err(Error::RetriesExhausted { attempts: cfg.max_retries.max(1), cap })
}

/// Orbits (by index in an [`OrbitTable`]) that every column t-set must cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleSubset {
    required: Vec<bool>,
    m: usize,
}

impl TupleSubset {
    /// The first `m` orbits in canonical rank order.
    pub fn first(table: &OrbitTable, m: usize) -> Result<Self> {
        if m == 0 || m > table.len() {
            return Err(Error::InvalidParameters(format!("m = {m} must lie in [1, {}]", table.len())));
        }
        Ok(TupleSubset { required: (0..table.len()).map(|o| o < m).collect(), m })
    }

    /// The orbits of the given tuples; duplicates collapse.
    pub fn from_tuples(table: &OrbitTable, tuples: &[Vec<u8>]) -> Result<Self> {
        let mut required = vec![false; table.len()];
        for tup in tuples {
            if tup.len() != table.strength() || tup.iter().any(|&s| s as usize >= table.levels()) {
                return Err(Error::InvalidParameters(format!("{tup:?} is not a t-tuple over [0, v)")));
            }
            let o = table.orbit_of_rank(tuple_rank(tup, table.levels()));
            if o == SHORT_ORBIT {
                return Err(Error::InvalidParameters(format!("{tup:?} lies in the short orbit")));
            }
            required[o as usize] = true;
        }
        let m = required.iter().filter(|&&b| b).count();
        if m == 0 {
            return Err(Error::InvalidParameters("empty tuple subset".into()));
        }
        Ok(TupleSubset { required, m })
    }

    pub fn all(table: &OrbitTable) -> Self {
        TupleSubset { required: vec![true; table.len()], m: table.len() }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn contains(&self, orbit: usize) -> bool {
        self.required[orbit]
    }
}

/// Rows for a Moser-Tardos run that must cover every orbit:
/// `ceil((ln(d T) + 1) / ln(1/(1-h)))`, with `d` the dependency degree, `T`
/// the orbits per column set and `h` the chance a row covers one orbit.
pub fn mt_rows(p: &Parameters, model: &OrbitModel) -> Result<u64> {
    if p.k < 2 * p.t {
        return Err(Error::NeedsKAtLeastTwoT { k: p.k, two_t: 2 * p.t });
    }
    let dep = ln_big(&p.derived().dep_degree);
    let n = (dep + (model.orbits_per_set as f64).ln() + 1.0) / model.miss_log;
    Ok(n.ceil() as u64)
}

/// Covers every orbit by resampling; returns the base array.
pub fn mt_construct(p: &Parameters, group: GroupKind, seed: u64, iteration_cap: u64) -> Result<Stage1Output> {
    let g = SymbolGroup::new(group, p.v)?;
    let table = OrbitTable::new(&g, p.t)?;
    let n = mt_rows(p, &g.orbit_model(p))?;
    let subset = TupleSubset::all(&table);
    mt_run(p, &table, &subset, n, seed, iteration_cap)
}

/// Size of a Moser-Tardos first stage: the local-lemma scan over `m`.
pub fn mt_first_stage_size(p: &Parameters, group: GroupKind) -> Result<(u64, u64)> {
    let model = SymbolGroup::new(group, p.v)?.orbit_model(p);
    let s = lll_first_stage_for(p, &model)?;
    Ok((s.n, s.m_opt))
}

/// Resamples until every column t-set covers every orbit of `subset`, then
/// reports the orbits still uncovered.
pub fn mt_first_stage(
    p: &Parameters,
    table: &OrbitTable,
    subset: &TupleSubset,
    n: u64,
    seed: u64,
    iteration_cap: u64,
) -> Result<Stage1Output> {
    if p.k < 2 * p.t {
        return Err(Error::NeedsKAtLeastTwoT { k: p.k, two_t: 2 * p.t });
    }
    mt_run(p, table, subset, n, seed, iteration_cap)
}

fn mt_run(
    p: &Parameters,
    table: &OrbitTable,
    subset: &TupleSubset,
    n: u64,
    seed: u64,
    iteration_cap: u64,
) -> Result<Stage1Output> {
    let n = n.to_usize().ok_or_else(|| Error::InvalidParameters(format!("n = {n} is too large")))?;
    let mut rng = stream(seed, Purpose::Resample, 0);
    let mut array = random_array(&mut rng, n, p.k, p.v);
    let resamples = resample_until_good(&mut array, table, subset, &mut rng, iteration_cap)?;
    let report = uncovered_with(&array, table, u64::MAX);
    Ok(Stage1Output { array, report, attempts: resamples })
}

/// The Moser-Tardos loop. Column sets are checked in lexicographic order and
/// the first bad one is resampled; the scan then resumes from the smallest
/// set that may have changed, which visits exactly the sets a full restart
/// would find bad.
pub fn resample_until_good(
    array: &mut Array,
    table: &OrbitTable,
    subset: &TupleSubset,
    rng: &mut ChaCha8Rng,
    iteration_cap: u64,
) -> Result<u64> {
    let t = table.strength();
    let k = array.cols();
    let dist = Uniform::new(0, array.levels() as u8);
    let mut checker = SetChecker::new(table, subset);
    let mut pointer: Vec<usize> = (0..t).collect();
    let mut done = t > k;
    let mut dirty: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut resamples = 0u64;
    loop {
        let current = match dirty.iter().next() {
            Some(d) => d.clone(),
            None if done => return Ok(resamples),
            None => pointer.clone(),
        };
        let from_dirty = !dirty.is_empty();
        if checker.is_good(array, &current) {
            if from_dirty {
                dirty.remove(&current);
            } else if !advance(&mut pointer, k) {
                done = true;
            }
            continue;
        }
        if resamples >= iteration_cap {
            return Err(Error::IterationCapExceeded { cap: iteration_cap });
        }
        resamples += 1;
        for &c in &current {
            array.column_mut(c).iter_mut().for_each(|cell| *cell = dist.sample(rng));
        }
        // Sets already passed that share a column may have turned bad.
        let limit = if done { None } else { Some(&pointer) };
        for set in sets_touching(k, t, &current) {
            if limit.is_none_or(|ptr| set < *ptr) {
                dirty.insert(set);
            }
        }
    }
}

/// All t-sets of `[0, k)` that share at least one column with `cols`.
fn sets_touching(k: usize, t: usize, cols: &[usize]) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    for &c in cols {
        let others: Vec<usize> = (0..k).filter(|&x| x != c).collect();
        if t == 1 {
            out.insert(vec![c]);
            continue;
        }
        let mut cursor = ColumnSetCursor::new(others.len(), t - 1);
        while let Some(idx) = cursor.next() {
            let mut set: Vec<usize> = idx.iter().map(|&i| others[i]).collect();
            let pos = set.partition_point(|&x| x < c);
            set.insert(pos, c);
            out.insert(set);
        }
    }
    out
}

struct SetChecker<'a> {
    table: &'a OrbitTable,
    subset: &'a TupleSubset,
    marks: Vec<u32>,
    epoch: u32,
}

impl<'a> SetChecker<'a> {
    fn new(table: &'a OrbitTable, subset: &'a TupleSubset) -> Self {
        SetChecker { table, subset, marks: vec![0; table.len()], epoch: 0 }
    }

    fn is_good(&mut self, array: &Array, cols: &[usize]) -> bool {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.marks.fill(0);
            self.epoch = 1;
        }
        let v = array.levels();
        let columns: Vec<&[u8]> = cols.iter().map(|&c| array.column(c)).collect();
        let mut found = 0;
        for r in 0..array.rows() {
            let rank = columns.iter().fold(0usize, |acc, col| acc * v + col[r] as usize);
            let o = self.table.orbit_of_rank(rank);
            if o == SHORT_ORBIT || !self.subset.contains(o as usize) || self.marks[o as usize] == self.epoch {
                continue;
            }
            self.marks[o as usize] = self.epoch;
            found += 1;
            if found == self.subset.len() {
                return true;
            }
        }
        false
    }
}
