//! Streaming enumeration of column t-sets and mixed-radix tuple ranks.

/// Walks the t-subsets of `[0, k)` in lexicographic order without
/// materialising them.
#[derive(Debug, Clone)]
pub struct ColumnSetCursor {
    k: usize,
    current: Vec<usize>,
    started: bool,
    done: bool,
}

impl ColumnSetCursor {
    pub fn new(k: usize, t: usize) -> Self {
        ColumnSetCursor { k, current: (0..t).collect(), started: false, done: t > k }
    }

    /// Starts at `first` instead of `{0, .., t-1}`.
    pub fn starting_at(k: usize, first: Vec<usize>) -> Self {
        let done = first.last().is_some_and(|&c| c >= k);
        ColumnSetCursor { k, current: first, started: false, done }
    }

    /// Moves to the next t-set and returns it.
    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.current);
        }
        if !advance(&mut self.current, self.k) {
            self.done = true;
            return None;
        }
        Some(&self.current)
    }
}

impl IntoIterator for ColumnSetCursor {
    type Item = Vec<usize>;
    type IntoIter = ColumnSets;

    fn into_iter(self) -> ColumnSets {
        ColumnSets(self)
    }
}

/// Owning iterator over column t-sets.
pub struct ColumnSets(ColumnSetCursor);

impl Iterator for ColumnSets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        self.0.next().map(<[usize]>::to_vec)
    }
}

/// Steps `comb` to its lexicographic successor among t-subsets of `[0, k)`.
pub fn advance(comb: &mut [usize], k: usize) -> bool {
    let t = comb.len();
    let mut i = t;
    while i > 0 {
        i -= 1;
        if comb[i] < k - t + i {
            comb[i] += 1;
            for j in i + 1..t {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Big-endian mixed-radix rank: the first symbol is most significant.
pub fn tuple_rank(symbols: &[u8], v: usize) -> usize {
    symbols.iter().fold(0, |acc, &s| acc * v + s as usize)
}

pub fn tuple_unrank(mut rank: usize, t: usize, v: usize) -> Vec<u8> {
    let mut out = vec![0u8; t];
    for slot in out.iter_mut().rev() {
        *slot = (rank % v) as u8;
        rank /= v;
    }
    out
}
