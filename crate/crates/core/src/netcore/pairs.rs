//! Indexing of unordered node pairs `(i, j)`, `i < j`, in row-major
//! upper-triangular order.

use crate::error::{domain, Result};

pub fn n_pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Position of the pair `(i, j)`, `i < j < n`, in upper-triangular order.
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Same as [`pair_index`] but accepts the endpoints in either order.
#[inline]
pub fn pair_index_unordered(n: usize, i: usize, j: usize) -> usize {
    if i < j {
        pair_index(n, i, j)
    } else {
        pair_index(n, j, i)
    }
}

/// Iterates `(i, j)` with `i < j < n` in index order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Set of node pairs treated as unobserved (held out). Held-out pairs are
/// excluded from every likelihood sum.
#[derive(Debug, Clone)]
pub struct PairMask {
    n: usize,
    held_out: Vec<bool>,
    partners: Vec<Vec<usize>>,
    n_held_out: usize,
}

impl PairMask {
    pub fn new(n: usize, held_out_pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut held_out = vec![false; n_pairs(n)];
        let mut partners = vec![Vec::new(); n];
        let mut n_held_out = 0;
        for (i, j) in held_out_pairs {
            if i == j || i >= n || j >= n {
                return domain(format!("invalid held-out pair ({i}, {j}) for {n} nodes"));
            }
            let idx = pair_index_unordered(n, i, j);
            if !held_out[idx] {
                held_out[idx] = true;
                partners[i].push(j);
                partners[j].push(i);
                n_held_out += 1;
            }
        }
        for p in &mut partners {
            p.sort_unstable();
        }
        Ok(Self { n, held_out, partners, n_held_out })
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn n_held_out(&self) -> usize {
        self.n_held_out
    }

    #[inline]
    pub fn is_held_out(&self, i: usize, j: usize) -> bool {
        self.held_out[pair_index_unordered(self.n, i, j)]
    }

    #[inline]
    pub fn is_held_out_index(&self, idx: usize) -> bool {
        self.held_out[idx]
    }

    /// Nodes `j` such that `(i, j)` is held out, sorted.
    pub fn partners(&self, i: usize) -> &[usize] {
        &self.partners[i]
    }
}
