//! The two-stage framework: size and run a first stage, cover what it left
//! with a second stage, develop over the symbol group and verify.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::bounds::{first_stage_n_for, lll_first_stage_for, total_orbits};
use crate::coverage::first_uncovered;
use crate::error::{Error, Result};
use crate::groups::{GroupKind, OrbitTable, SymbolGroup};
use crate::model::{Array, Parameters};
use crate::rng::{stream, Purpose};
use crate::stage1::{
    mt_first_stage, rand_first_stage_with, Stage1Config, Stage1Output, TupleSubset, DEFAULT_ITERATION_CAP,
    DEFAULT_MAX_RETRIES,
};
use crate::stage2::{cover, ColorStats, Stage2Kind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage1Kind {
    Rand,
    Mt,
}

impl fmt::Display for Stage1Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage1Kind::Rand => "rand",
            Stage1Kind::Mt => "mt",
        })
    }
}

impl FromStr for Stage1Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rand" => Ok(Stage1Kind::Rand),
            "mt" => Ok(Stage1Kind::Mt),
            _ => Err(Error::InvalidParameters(format!("unknown first stage {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub p: Parameters,
    pub stage1: Stage1Kind,
    pub stage2: Stage2Kind,
    /// `r = r_mult * rho` for the group; infinity skips the first stage.
    pub r_mult: f64,
    pub group: GroupKind,
    pub seed: u64,
    pub verify: bool,
    pub max_retries: u32,
    pub iteration_cap: u64,
    /// Wall-clock limit in seconds, checked between phases.
    pub time_budget: Option<f64>,
}

impl RunSpec {
    pub fn new(p: Parameters, stage1: Stage1Kind, stage2: Stage2Kind, group: GroupKind, seed: u64) -> Self {
        RunSpec {
            p,
            stage1,
            stage2,
            r_mult: 1.0,
            group,
            seed,
            verify: true,
            max_retries: DEFAULT_MAX_RETRIES,
            iteration_cap: DEFAULT_ITERATION_CAP,
            time_budget: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.r_mult.is_nan() || self.r_mult <= 0.0 {
            return Err(Error::InvalidParameters(format!("r multiplier {} must be positive", self.r_mult)));
        }
        if self.stage1 == Stage1Kind::Mt && self.p.k < 2 * self.p.t {
            return Err(Error::NeedsKAtLeastTwoT { k: self.p.k, two_t: 2 * self.p.t });
        }
        SymbolGroup::new(self.group, self.p.v).map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verified {
    Checked(bool),
    Skipped,
}

impl Serialize for Verified {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Verified::Checked(b) => s.serialize_bool(*b),
            Verified::Skipped => s.serialize_str("skipped"),
        }
    }
}

impl fmt::Display for Verified {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verified::Checked(b) => write!(f, "{b}"),
            Verified::Skipped => f.write_str("skipped"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub n_stage1: u64,
    pub uncovered_after_stage1: u64,
    pub rows_stage2: u64,
    #[serde(rename = "N_final")]
    pub n_final: u64,
    pub bound_predicted: f64,
    /// Extra first-stage draws (rand) or resamples (MT).
    pub retries: u64,
    pub wall_time: f64,
    pub verified: Verified,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coloring: Option<ColorStats>,
}

/// First-stage size, acceptance threshold and predicted final size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plan {
    pub n: u64,
    /// Largest accepted number of uncovered orbits after the first stage.
    pub accept: f64,
    pub predicted: f64,
    /// Orbits every column set must cover (MT only).
    pub m: Option<u64>,
}

/// Sizes a run.
///
/// For the random first stage, `n* = ln(O / r) / ln(1/(1-h))` and the
/// prediction is `|G| (n* + r) + c`, with `O` the number of full orbits and
/// `c` the constant rows. At `r = rho` this is the two-stage bound for the
/// group. The acceptance threshold is capped so that `n` plus one row per
/// uncovered orbit never develops to more than the ceiling of the prediction.
pub fn plan(spec: &RunSpec) -> Result<Plan> {
    spec.validate()?;
    let p = &spec.p;
    let group = SymbolGroup::new(spec.group, p.v)?;
    let model = group.orbit_model(p);
    let order = model.multiplicity as f64;
    let c = model.constant_rows as f64;
    match spec.stage1 {
        Stage1Kind::Rand => {
            let r = spec.r_mult * model.rho();
            let total = total_orbits(p, &model);
            let fs = first_stage_n_for(p, &model, r);
            let (n, predicted) =
                if fs.saturated || r >= total { (0, order * total + c) } else { (fs.n, order * (fs.n_real + r) + c) };
            let budget = (((predicted - 1e-9).ceil() - c) / order).floor().max(0.0);
            let accept = r.min((budget - n as f64).max(0.0));
            Ok(Plan { n, accept, predicted, m: None })
        }
        Stage1Kind::Mt => {
            let lll = lll_first_stage_for(p, &model)?;
            let eta = p.derived().eta.to_f64().unwrap_or(f64::INFINITY);
            let left = std::f64::consts::E * eta * (model.orbits_per_set - lll.m_opt) as f64
                * (-(lll.n as f64) * model.miss_log).exp();
            Ok(Plan { n: lll.n, accept: f64::INFINITY, predicted: order * (lll.n as f64 + left) + c, m: Some(lll.m_opt) })
        }
    }
}

pub fn run(spec: &RunSpec) -> Result<(Array, RunReport)> {
    let start = Instant::now();
    let check_time = || -> Result<()> {
        match spec.time_budget {
            Some(limit) if start.elapsed().as_secs_f64() > limit => Err(Error::TimeBudgetExceeded(limit)),
            _ => Ok(()),
        }
    };
    let plan = plan(spec)?;
    let p = &spec.p;
    let group = SymbolGroup::new(spec.group, p.v)?;
    let table = OrbitTable::new(&group, p.t)?;

    let (first, retries): (Stage1Output, u64) = match spec.stage1 {
        Stage1Kind::Rand => {
            let cfg = Stage1Config { n: plan.n, r: plan.accept, max_retries: spec.max_retries, seed: spec.seed };
            let out = rand_first_stage_with(p, &table, &cfg)?;
            let retries = out.attempts - 1;
            (out, retries)
        }
        Stage1Kind::Mt => {
            let m = plan.m.expect("MT plans carry m") as usize;
            let subset = TupleSubset::first(&table, m)?;
            let out = mt_first_stage(p, &table, &subset, plan.n, spec.seed, spec.iteration_cap)?;
            let retries = out.attempts;
            (out, retries)
        }
    };
    check_time()?;

    let mut rng = stream(spec.seed, Purpose::Fill, 0);
    let second = cover(spec.stage2, &first.report.uncovered, p.k, &group, &mut rng)?;
    check_time()?;

    let mut base = first.array;
    base.append_rows(&second.rows)?;
    let developed = group.develop(&base);
    let verified = if spec.verify {
        if let Some(missing) = first_uncovered(&developed, p)? {
            return Err(Error::VerificationFailed { columns: missing.columns, symbols: missing.symbols });
        }
        Verified::Checked(true)
    } else {
        Verified::Skipped
    };

    let report = RunReport {
        n_stage1: plan.n,
        uncovered_after_stage1: first.report.uncovered_count,
        rows_stage2: second.rows.len() as u64,
        n_final: developed.rows() as u64,
        bound_predicted: plan.predicted,
        retries,
        wall_time: start.elapsed().as_secs_f64(),
        verified,
        coloring: second.coloring,
    };
    Ok((developed, report))
}

/// One line of a benchmark table.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub spec: RunSpec,
    pub outcome: std::result::Result<RunReport, Error>,
}

pub const CSV_HEADER: &str =
    "t,k,v,group,stage1,stage2,r_mult,seed,n_stage1,uncovered,rows_stage2,N_final,bound,verified,seconds";

/// Runs every spec; failures are kept in their row. Rows come back in grid
/// order whatever the degree of parallelism.
pub fn benchmark(grid: &[RunSpec]) -> Result<Vec<BenchRow>> {
    if grid.is_empty() {
        return Err(Error::InvalidParameters("empty benchmark grid".into()));
    }
    let one = |spec: &RunSpec| BenchRow { spec: spec.clone(), outcome: run(spec).map(|(_, r)| r) };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok(grid.par_iter().map(one).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok(grid.iter().map(one).collect())
    }
}

/// CSV text for a benchmark; with `timing` off the seconds column is 0 so
/// equal grids give byte-identical output.
pub fn to_csv(rows: &[BenchRow], timing: bool) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let s = &row.spec;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},",
            s.p.t, s.p.k, s.p.v, s.group, s.stage1, s.stage2, s.r_mult, s.seed
        ));
        match &row.outcome {
            Ok(r) => out.push_str(&format!(
                "{},{},{},{},{:.2},{},{}\n",
                r.n_stage1,
                r.uncovered_after_stage1,
                r.rows_stage2,
                r.n_final,
                r.bound_predicted,
                r.verified,
                if timing { format!("{:.3}", r.wall_time) } else { "0".into() }
            )),
            Err(e) => {
                let bound = plan(s).map(|pl| format!("{:.2}", pl.predicted)).unwrap_or_default();
                let msg = e.to_string().replace([',', '\n'], ";");
                out.push_str(&format!(",,,,{bound},error: {msg},0\n"));
            }
        }
    }
    out
}
