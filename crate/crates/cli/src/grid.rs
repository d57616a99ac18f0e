//! Benchmark grid files.
//!
//! A grid is a list of `[run]` stanzas of `key = value` lines. A value may
//! be a single item, a comma list, or an inclusive integer range `a..b`.
//! Each stanza expands to the cartesian product of its values, in the key
//! order `t, k, v, group, stage1, stage2, r_mult, seed` with `seed`
//! varying fastest. `#` starts a comment.
//!
//! ```text
//! [run]
//! t = 3
//! k = 8..10
//! v = 2
//! stage2 = naive, greedy, col, den
//! seed = 0..4
//! ```

use std::collections::BTreeMap;
use std::str::FromStr;

use ca_forge::pipeline::{RunSpec, Stage1Kind};
use ca_forge::stage2::Stage2Kind;
use ca_forge::{GroupKind, Parameters};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("grid line {line}: {message}")]
pub struct GridError {
    pub line: usize,
    pub message: String,
}

/// Key to (line, raw value) for one stanza.
type Stanza = BTreeMap<String, (usize, String)>;

const KEYS: [&str; 11] =
    ["t", "k", "v", "group", "stage1", "stage2", "r_mult", "seed", "verify", "max_retries", "time_budget"];

pub fn parse_grid(text: &str) -> Result<Vec<RunSpec>, GridError> {
    let mut stanzas: Vec<(usize, Stanza)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        if line == "[run]" {
            stanzas.push((line_no, BTreeMap::new()));
            continue;
        }
        let err = |message: String| GridError { line: line_no, message };
        let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected key = value, found {line:?}")))?;
        let key = key.trim().to_string();
        if !KEYS.contains(&key.as_str()) {
            return Err(err(format!("unknown key {key:?}")));
        }
        let (_, stanza) = stanzas.last_mut().ok_or_else(|| err("key outside a [run] stanza".into()))?;
        if stanza.insert(key.clone(), (line_no, value.trim().to_string())).is_some() {
            return Err(err(format!("duplicate key {key:?}")));
        }
    }
    if stanzas.is_empty() {
        return Err(GridError { line: 0, message: "no [run] stanza".into() });
    }
    let mut specs = Vec::new();
    for (line, stanza) in &stanzas {
        expand(*line, stanza, &mut specs)?;
    }
    Ok(specs)
}

fn values<T: FromStr>(stanza: &Stanza, key: &str, default: Option<&str>, at: usize) -> Result<Vec<T>, GridError>
where
    T::Err: std::fmt::Display,
{
    let (line, text) = match stanza.get(key) {
        Some((l, v)) => (*l, v.as_str()),
        None => match default {
            Some(d) => (at, d),
            None => return Err(GridError { line: at, message: format!("missing key {key:?}") }),
        },
    };
    let err = |message: String| GridError { line, message };
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim) {
        if item.is_empty() {
            return Err(err(format!("empty value for {key:?}")));
        }
        if let Some((a, b)) = item.split_once("..") {
            let a: u64 = a.trim().parse().map_err(|_| err(format!("bad range start in {item:?}")))?;
            let b: u64 = b.trim().parse().map_err(|_| err(format!("bad range end in {item:?}")))?;
            if a > b {
                return Err(err(format!("empty range {item:?}")));
            }
            for x in a..=b {
                out.push(x.to_string().parse().map_err(|e| err(format!("{key}: {e}")))?);
            }
        } else {
            out.push(item.parse().map_err(|e| err(format!("{key}: {e}")))?);
        }
    }
    Ok(out)
}

fn expand(at: usize, s: &Stanza, out: &mut Vec<RunSpec>) -> Result<(), GridError> {
    let ts: Vec<usize> = values(s, "t", None, at)?;
    let ks: Vec<usize> = values(s, "k", None, at)?;
    let vs: Vec<usize> = values(s, "v", None, at)?;
    let groups: Vec<GroupKind> = values(s, "group", Some("trivial"), at)?;
    let stage1s: Vec<Stage1Kind> = values(s, "stage1", Some("rand"), at)?;
    let stage2s: Vec<Stage2Kind> = values(s, "stage2", Some("naive"), at)?;
    let mults: Vec<f64> = values(s, "r_mult", Some("1"), at)?;
    let seeds: Vec<u64> = values(s, "seed", Some("0"), at)?;
    let verify: Vec<bool> = values(s, "verify", Some("true"), at)?;
    let retries: Vec<u32> = values(s, "max_retries", Some("20"), at)?;
    let budget: Vec<f64> = values(s, "time_budget", Some("inf"), at)?;
    let single = |n: usize, key: &str| {
        if n == 1 {
            Ok(())
        } else {
            Err(GridError { line: at, message: format!("{key} takes a single value") })
        }
    };
    single(verify.len(), "verify")?;
    single(retries.len(), "max_retries")?;
    single(budget.len(), "time_budget")?;
    for &m in &mults {
        if m.is_nan() || m <= 0.0 {
            return Err(GridError { line: at, message: format!("r_mult {m} must be positive") });
        }
    }
    for &t in &ts {
        for &k in &ks {
            for &v in &vs {
                let p = Parameters::new(t, k, v).map_err(|e| GridError { line: at, message: e.to_string() })?;
                for &g in &groups {
                    for &s1 in &stage1s {
                        for &s2 in &stage2s {
                            for &m in &mults {
                                for &seed in &seeds {
                                    let mut spec = RunSpec::new(p, s1, s2, g, seed);
                                    spec.r_mult = m;
                                    spec.verify = verify[0];
                                    spec.max_retries = retries[0];
                                    spec.time_budget = budget[0].is_finite().then_some(budget[0]);
                                    out.push(spec);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}
