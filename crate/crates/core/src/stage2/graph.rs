use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::fill;
use crate::combin::tuple_rank;
use crate::error::{Error, Result};
use crate::groups::SymbolGroup;
use crate::model::{Cell, Interaction};

/// Committed interactions with an edge wherever two of them disagree on a
/// shared column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncompatibilityGraph {
    pub vertices: Vec<Interaction>,
    /// Sorted neighbour lists.
    pub adjacency: Vec<Vec<usize>>,
    pub m_edges: u64,
}

impl IncompatibilityGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Adds the items in order. Under a symbol group each item is committed to
/// the image with the fewest conflicts against already committed vertices
/// that share a column, ties to the lowest tuple rank.
pub fn build_incompat_graph(uncovered: &[Interaction], group: &SymbolGroup) -> IncompatibilityGraph {
    let k = uncovered.iter().filter_map(|i| i.columns.last()).max().map_or(0, |&c| c + 1);
    let v = group.levels();
    let mut by_column: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut vertices: Vec<Interaction> = Vec::with_capacity(uncovered.len());
    let mut adjacency: Vec<Vec<usize>> = Vec::with_capacity(uncovered.len());
    let mut stamp = vec![usize::MAX; uncovered.len()];
    let mut m_edges = 0u64;
    for (id, item) in uncovered.iter().enumerate() {
        let mut near = Vec::new();
        for &c in &item.columns {
            for &w in &by_column[c] {
                if stamp[w] != id {
                    stamp[w] = id;
                    near.push(w);
                }
            }
        }
        let mut images = group.images(&item.symbols);
        images.sort_by_key(|img| tuple_rank(img, v));
        let conflicts = |symbols: &[u8]| {
            let cand = Interaction { columns: item.columns.clone(), symbols: symbols.to_vec() };
            near.iter().filter(|&&w| cand.conflicts_with(&vertices[w])).count()
        };
        let chosen = if images.len() == 1 {
            images.swap_remove(0)
        } else {
            let best = images.iter().map(|img| conflicts(img)).enumerate().min_by_key(|&(i, n)| (n, i)).unwrap().0;
            images.swap_remove(best)
        };
        let vertex = Interaction { columns: item.columns.clone(), symbols: chosen };
        let mut nbrs: Vec<usize> = near.into_iter().filter(|&w| vertex.conflicts_with(&vertices[w])).collect();
        for &w in &nbrs {
            adjacency[w].push(id);
        }
        m_edges += nbrs.len() as u64;
        nbrs.sort_unstable();
        adjacency.push(nbrs);
        for &c in &vertex.columns {
            by_column[c].push(id);
        }
        vertices.push(vertex);
    }
    IncompatibilityGraph { vertices, adjacency, m_edges }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ColorStats {
    pub colors: usize,
    /// Largest minimum degree met while peeling vertices off.
    pub degeneracy: usize,
    pub m_edges: u64,
}

/// Smallest-last order: repeatedly remove a vertex of minimum remaining
/// degree (lowest index first) and reverse the removal sequence.
pub fn smallest_last_order(g: &IncompatibilityGraph) -> (Vec<usize>, usize) {
    let n = g.len();
    let mut degree: Vec<usize> = g.adjacency.iter().map(Vec::len).collect();
    let max_deg = degree.iter().copied().max().unwrap_or(0);
    // Buckets hold vertices by current degree; stale entries are skipped.
    let mut buckets: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); max_deg + 1];
    for (u, &d) in degree.iter().enumerate() {
        buckets[d].insert(u);
    }
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut degeneracy = 0;
    let mut low = 0;
    for _ in 0..n {
        low = low.min(max_deg);
        while buckets[low].is_empty() {
            low += 1;
        }
        let u = buckets[low].pop_first().unwrap();
        degeneracy = degeneracy.max(low);
        removed[u] = true;
        order.push(u);
        for &w in &g.adjacency[u] {
            if !removed[w] {
                buckets[degree[w]].remove(&w);
                degree[w] -= 1;
                buckets[degree[w]].insert(w);
            }
        }
        low = low.saturating_sub(1);
    }
    order.reverse();
    (order, degeneracy)
}

/// Colors in smallest-last order with the first free color; returns the
/// color of every vertex.
pub fn color_vertices(g: &IncompatibilityGraph) -> (Vec<usize>, usize) {
    let (order, degeneracy) = smallest_last_order(g);
    let mut color = vec![usize::MAX; g.len()];
    let mut used = Vec::new();
    for &u in &order {
        used.clear();
        used.extend(g.adjacency[u].iter().map(|&w| color[w]).filter(|&c| c != usize::MAX));
        used.sort_unstable();
        used.dedup();
        color[u] = used.iter().enumerate().find(|&(i, &c)| i != c).map_or(used.len(), |(i, _)| i);
    }
    (color, degeneracy)
}

/// One row per color class, flexible cells filled at random.
pub fn color_cover(g: &IncompatibilityGraph, k: usize, v: usize, rng: &mut ChaCha8Rng) -> Result<(Vec<Vec<u8>>, ColorStats)> {
    let (color, degeneracy) = color_vertices(g);
    let colors = color.iter().map(|&c| c + 1).max().unwrap_or(0);
    let mut rows = vec![vec![Cell::Flexible; k]; colors];
    for (u, vertex) in g.vertices.iter().enumerate() {
        let row = &mut rows[color[u]];
        for (&c, &s) in vertex.columns.iter().zip(&vertex.symbols) {
            match row[c] {
                Cell::Fixed(x) if x != s => return Err(Error::InconsistentClass { color: color[u], column: c }),
                _ => row[c] = Cell::Fixed(s),
            }
        }
    }
    Ok((fill(rows, v, rng), ColorStats { colors, degeneracy, m_edges: g.m_edges }))
}
