//! Closed-form and recurrence upper bounds on covering array sizes.
//!
//! All logarithms are natural. Binomials are exact; the formulas are then
//! evaluated in `f64` with `ln_1p` for the small-argument logarithms, which
//! keeps every bound well below a thousandth of a row of rounding error at
//! the sizes of interest.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::prime_power;
use crate::groups::{GroupKind, OrbitModel, SymbolGroup};
use crate::model::{binomial, ln_big, miss_log, Parameters};

fn ln_c(p: &Parameters) -> f64 {
    ln_big(&p.column_sets())
}

fn trivial_miss_log(p: &Parameters) -> f64 {
    miss_log(p.vt_f64())
}

/// Random-array bound: `[ln C(k,t) + t ln v] / ln(v^t/(v^t-1))`.
pub fn slj_bound(p: &Parameters) -> f64 {
    (ln_c(p) + p.t as f64 * (p.v as f64).ln()) / trivial_miss_log(p)
}

/// Rows needed when every row covers exactly `ceil(u / v^t)` of the `u`
/// still-uncovered interactions, starting from all of them.
pub fn discrete_slj_bound(p: &Parameters) -> u64 {
    let u0 = crate::model::interaction_count(p);
    let vt = BigUint::from(p.v).pow(p.t as u32);
    match (u0.to_u128(), vt.to_u128()) {
        (Some(u), Some(q)) if u.checked_mul(2).is_some() => discrete_steps_u128(u, q),
        _ => discrete_steps_big(u0, vt),
    }
}

/// Steps of `u <- u - ceil(u/q)` until zero, jumping over runs in which the
/// ceiling stays constant.
fn discrete_steps_u128(mut u: u128, q: u128) -> u64 {
    let mut steps: u128 = 0;
    while u > 0 {
        let c = u.div_ceil(q);
        if c == 1 {
            steps += u;
            break;
        }
        // ceil(u/q) stays c while u > (c-1) q.
        let floor = (c - 1) * q;
        let j = (u - floor).div_ceil(c);
        u -= j * c;
        steps += j;
    }
    steps as u64
}

fn discrete_steps_big(mut u: BigUint, q: BigUint) -> u64 {
    let mut steps = BigUint::zero();
    let one = BigUint::from(1u32);
    while !u.is_zero() {
        let c = (&u + &q - &one) / &q;
        if c == one {
            steps += &u;
            break;
        }
        let floor = (&c - &one) * &q;
        let j = (&u - &floor + &c - &one) / &c;
        u -= &j * &c;
        steps += j;
    }
    steps.to_u64().unwrap_or(u64::MAX)
}

/// `[ln C(k,t) + t ln v + ln ln(v^t/(v^t-1)) + 1] / ln(v^t/(v^t-1))`.
pub fn two_stage_bound(p: &Parameters) -> f64 {
    let l = trivial_miss_log(p);
    (ln_c(p) + p.t as f64 * (p.v as f64).ln() + l.ln() + 1.0) / l
}

/// Size of a random first stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstStageSize {
    pub n: u64,
    /// Real-valued solution of "expected uncovered orbits = target".
    pub n_real: f64,
    /// Set when the target is at least the total orbit count, so no row is
    /// needed at all.
    pub saturated: bool,
}

/// Rows after which a uniformly random array is expected to leave at most
/// `target_uncovered` full orbits uncovered:
/// `ceil(ln(O / target) / ln(1 / (1 - h)))`, with `O` the total number of
/// full orbits and `h` the chance that a random row covers a given one.
pub fn first_stage_n(p: &Parameters, group: GroupKind, target_uncovered: f64) -> Result<FirstStageSize> {
    let model = SymbolGroup::new(group, p.v)?.orbit_model(p);
    Ok(first_stage_n_for(p, &model, target_uncovered))
}

pub(crate) fn total_orbits(p: &Parameters, model: &OrbitModel) -> f64 {
    ln_c(p).exp() * model.orbits_per_set as f64
}

pub(crate) fn first_stage_n_for(p: &Parameters, model: &OrbitModel, target: f64) -> FirstStageSize {
    let ln_total = ln_c(p) + (model.orbits_per_set as f64).ln();
    if target.is_nan() || target <= 0.0 || target.ln() >= ln_total - 1e-12 {
        // target >= total: nothing has to be covered by the first stage.
        let sat = target > 0.0;
        let n_real = if sat { (ln_total - target.ln()) / model.miss_log } else { f64::INFINITY };
        return FirstStageSize { n: if sat { 0 } else { u64::MAX }, n_real, saturated: sat };
    }
    let n_real = (ln_total - target.ln()) / model.miss_log;
    FirstStageSize { n: n_real.ceil() as u64, n_real, saturated: false }
}

/// Local-lemma bound; needs `k >= 2t`.
pub fn gss_bound(p: &Parameters) -> Result<f64> {
    require_k_two_t(p)?;
    let dep = p.derived().dep_degree;
    Ok((ln_big(&dep) + p.t as f64 * (p.v as f64).ln() + 1.0) / trivial_miss_log(p))
}

fn require_k_two_t(p: &Parameters) -> Result<()> {
    if p.k < 2 * p.t {
        return Err(Error::NeedsKAtLeastTwoT { k: p.k, two_t: 2 * p.t });
    }
    Ok(())
}

/// Two-stage bound with a sharply transitive (cyclic) symbol group.
pub fn cyclic_two_stage_bound(p: &Parameters) -> f64 {
    let q = (p.v as f64).powi(p.t as i32 - 1);
    let l = miss_log(q);
    p.v as f64 * (ln_c(p) + (p.t as f64 - 1.0) * (p.v as f64).ln() + l.ln() + 1.0) / l
}

/// Two-stage bound with the Frobenius group; `v` must be a prime power.
pub fn frobenius_two_stage_bound(p: &Parameters) -> Result<f64> {
    if prime_power(p.v).is_none() {
        return Err(Error::NotPrimePower(p.v));
    }
    let v = p.v as f64;
    let q = v.powi(p.t as i32 - 1);
    // ln(q / (q - v + 1))
    let l = ((v - 1.0) / (q - v + 1.0)).ln_1p();
    let orbits = ((q - 1.0) / (v - 1.0)).ln();
    Ok(v * (v - 1.0) * (ln_c(p) + orbits + l.ln() + 1.0) / l + v)
}

/// Expected number of uncovered interactions after `n` random rows.
pub fn expected_uncovered(p: &Parameters, n: u64) -> f64 {
    let l = trivial_miss_log(p);
    (ln_c(p) + p.t as f64 * (p.v as f64).ln() - n as f64 * l).exp()
}

/// The edge-count estimate for the incompatibility graph after `n` random
/// rows:
///
/// `(1/2) C(k,t) v^t sum_i C(t,i) C(k-t,t-i) (v^t - v^(t-i)) (1-1/v^t)^n (1-1/(v^t-v^(t-i)))^n`.
///
/// Two conflicting interactions can never be covered by the same row, so
/// the exact expectation decays like `(1 - 2/v^t)^n` instead; see
/// [`exact_incompat_edges`]. The two agree at `n = 0` and for pairs that
/// share all t columns.
pub fn expected_incompat_edges(p: &Parameters, n: u64) -> f64 {
    incompat_edges_with(p, n, |vt, conflicting| {
        (n as f64) * ((-1.0 / vt).ln_1p() + (-1.0 / conflicting).ln_1p())
    })
}

/// Exact expected edge count of the incompatibility graph of a uniformly
/// random `n x k` array.
pub fn exact_incompat_edges(p: &Parameters, n: u64) -> f64 {
    incompat_edges_with(p, n, |vt, _| n as f64 * (-2.0 / vt).ln_1p())
}

fn incompat_edges_with(p: &Parameters, n: u64, log_decay: impl Fn(f64, f64) -> f64) -> f64 {
    let vt = p.vt_f64();
    let v = p.v as f64;
    let (t, k) = (p.t as u64, p.k as u64);
    let mut sum = 0.0;
    for i in 1..=t {
        let pairs = binomial(t, i).to_f64().unwrap() * binomial(k - t, t - i).to_f64().unwrap();
        if pairs == 0.0 {
            continue;
        }
        let conflicting = vt - v.powi((t - i) as i32);
        let decay = if n == 0 { 1.0 } else { log_decay(vt, conflicting).exp() };
        sum += pairs * conflicting * decay;
    }
    0.5 * ln_c(p).exp() * vt * sum
}

/// Upper bound on the chromatic number of a graph with `m_edges` edges.
pub fn chromatic_estimate(m_edges: f64) -> f64 {
    0.5 + (2.0 * m_edges + 0.25).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimateMode {
    /// Assume the graph has the expected number of edges.
    Optimistic,
    /// Assume twice the expected number of edges.
    Conservative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ColoringEstimate {
    pub value: f64,
    /// First-stage size at which the minimum is reached.
    pub n: u64,
}

/// Minimum over `n` in `[0, ceil(slj)]` of `n + chromatic_estimate(c * gamma(n))`.
pub fn coloring_two_stage_estimate(p: &Parameters, mode: EstimateMode) -> ColoringEstimate {
    let c = match mode {
        EstimateMode::Optimistic => 1.0,
        EstimateMode::Conservative => 2.0,
    };
    let upper = slj_bound(p).ceil() as u64;
    let mut best = ColoringEstimate { value: f64::INFINITY, n: 0 };
    for n in 0..=upper {
        let value = n as f64 + chromatic_estimate(c * expected_incompat_edges(p, n));
        if value < best.value {
            best = ColoringEstimate { value, n };
        }
    }
    best
}

/// First stage sized by the local lemma: every column t-set must cover a
/// fixed set of `m` tuples (orbits), the rest is left to the second stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LllFirstStage {
    pub n: u64,
    pub m_opt: u64,
    pub n_real: f64,
    /// Value of the "all m tuples everywhere" requirement at `m_opt`.
    pub n_resample: f64,
    /// Value of the "expected leftovers below one column's worth" requirement at `m_opt`.
    pub n_leftover: f64,
}

/// Scans `m` over `[1, v^t]` for the value minimising
/// `max(ln(e d m), ln(e eta (1 - m/v^t))) / ln(v^t/(v^t-1))`,
/// with `d` the dependency degree and `eta = C(k,t)`.
pub fn lll_first_stage_n(p: &Parameters) -> Result<LllFirstStage> {
    let model = SymbolGroup::new(GroupKind::Trivial, p.v)?.orbit_model(p);
    lll_first_stage_for(p, &model)
}

/// Same scan with orbits of a symbol group in place of tuples.
pub fn lll_first_stage_for(p: &Parameters, model: &OrbitModel) -> Result<LllFirstStage> {
    require_k_two_t(p)?;
    let d = p.derived();
    let ln_dep = ln_big(&d.dep_degree);
    let ln_eta = ln_big(&d.eta);
    let per_set = model.orbits_per_set;
    let mut best: Option<LllFirstStage> = None;
    for m in 1..=per_set {
        let n1 = (1.0 + ln_dep + (m as f64).ln()) / model.miss_log;
        let n2 = if m == per_set {
            f64::NEG_INFINITY
        } else {
            (ln_eta + 1.0 + (1.0 - m as f64 / per_set as f64).ln()) / model.miss_log
        };
        let n_real = n1.max(n2);
        if best.is_none_or(|b| n_real < b.n_real) {
            best = Some(LllFirstStage { n: n_real.max(0.0).ceil() as u64, m_opt: m, n_real, n_resample: n1, n_leftover: n2 });
        }
    }
    Ok(best.expect("at least one orbit per column set"))
}

/// Two-stage bound built on the local lemma; needs
/// `eta v^t ln(v^t/(v^t-1)) / d <= v^t`.
pub fn lll_two_stage_bound(p: &Parameters) -> Result<f64> {
    require_k_two_t(p)?;
    let d = p.derived();
    let l = trivial_miss_log(p);
    let eta = d.eta.to_f64().unwrap_or(f64::INFINITY);
    let dep = d.dep_degree.to_f64().unwrap_or(f64::INFINITY);
    let lhs = eta * l;
    if lhs > dep {
        return Err(Error::SideCondition { lhs, rhs: dep });
    }
    Ok((ln_c(p) + p.t as f64 * (p.v as f64).ln() + l.ln() + 2.0) / l - eta / dep)
}

/// Every bound for one parameter triple.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub t: usize,
    pub k: usize,
    pub v: usize,
    pub slj: f64,
    pub discrete_slj: u64,
    pub two_stage: f64,
    pub gss: Option<f64>,
    pub cyclic_two_stage: f64,
    pub frobenius_two_stage: Option<f64>,
    pub lll_two_stage: Option<f64>,
    pub optimistic_coloring: f64,
    pub conservative_coloring: f64,
}

impl BoundReport {
    pub fn new(p: &Parameters) -> Self {
        BoundReport {
            t: p.t,
            k: p.k,
            v: p.v,
            slj: slj_bound(p),
            discrete_slj: discrete_slj_bound(p),
            two_stage: two_stage_bound(p),
            gss: gss_bound(p).ok(),
            cyclic_two_stage: cyclic_two_stage_bound(p),
            frobenius_two_stage: frobenius_two_stage_bound(p).ok(),
            lll_two_stage: lll_two_stage_bound(p).ok(),
            optimistic_coloring: coloring_two_stage_estimate(p, EstimateMode::Optimistic).value,
            conservative_coloring: coloring_two_stage_estimate(p, EstimateMode::Conservative).value,
        }
    }
}
