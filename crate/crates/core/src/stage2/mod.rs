//! Second-stage strategies. Each takes the orbit representatives left
//! uncovered by the first stage and returns base rows that cover one image
//! of every item, so the developed array covers every orbit.

mod density;
mod graph;
mod greedy;
mod naive;

use std::fmt;
use std::str::FromStr;

use rand::distributions::{Distribution, Uniform};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::SymbolGroup;
use crate::model::{Cell, Interaction};

pub use density::density_cover;
pub use graph::{build_incompat_graph, color_cover, color_vertices, smallest_last_order, ColorStats, IncompatibilityGraph};
pub use greedy::greedy_cover;
pub use naive::naive_cover;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage2Kind {
    Naive,
    Greedy,
    Col,
    Den,
}

impl fmt::Display for Stage2Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage2Kind::Naive => "naive",
            Stage2Kind::Greedy => "greedy",
            Stage2Kind::Col => "col",
            Stage2Kind::Den => "den",
        })
    }
}

impl FromStr for Stage2Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "naive" => Ok(Stage2Kind::Naive),
            "greedy" => Ok(Stage2Kind::Greedy),
            "col" | "color" | "coloring" => Ok(Stage2Kind::Col),
            "den" | "density" => Ok(Stage2Kind::Den),
            _ => Err(Error::InvalidParameters(format!("unknown second stage {s:?}"))),
        }
    }
}

/// Rows from one strategy, plus the coloring statistics when a graph was built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage2Output {
    pub rows: Vec<Vec<u8>>,
    pub coloring: Option<ColorStats>,
}

pub fn cover(
    kind: Stage2Kind,
    uncovered: &[Interaction],
    k: usize,
    group: &SymbolGroup,
    rng: &mut ChaCha8Rng,
) -> Result<Stage2Output> {
    let rows = match kind {
        Stage2Kind::Naive => naive_cover(uncovered, k, group.levels(), rng),
        Stage2Kind::Greedy => greedy_cover(uncovered, k, group, rng),
        Stage2Kind::Col => {
            let g = build_incompat_graph(uncovered, group);
            let (rows, stats) = color_cover(&g, k, group.levels(), rng)?;
            return Ok(Stage2Output { rows, coloring: Some(stats) });
        }
        Stage2Kind::Den => density_cover(uncovered, k, group)?,
    };
    Ok(Stage2Output { rows, coloring: None })
}

/// True when every fixed cell of `row` on the interaction's columns agrees
/// with `symbols`.
pub(crate) fn compatible(row: &[Cell], columns: &[usize], symbols: &[u8]) -> bool {
    columns.iter().zip(symbols).all(|(&c, &s)| match row[c] {
        Cell::Flexible => true,
        Cell::Fixed(x) => x == s,
    })
}

pub(crate) fn fill(rows: Vec<Vec<Cell>>, v: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<u8>> {
    let dist = Uniform::new(0, v as u8);
    rows.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|c| match c {
                    Cell::Fixed(s) => s,
                    Cell::Flexible => dist.sample(rng),
                })
                .collect()
        })
        .collect()
}
