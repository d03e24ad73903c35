use super::assignment::ClassAssignment;
use super::graph::Graph;
use super::kl::block_term;
use super::pairs::PairMask;
use crate::error::{domain, Result, SbmError};

/// Symmetric `K x K` matrix over class pairs. Entries may be undefined
/// (`None`) when the corresponding block contains no node pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    k: usize,
    vals: Vec<Option<f64>>,
}

impl BlockMatrix {
    /// Calls `f(a, b)` for `a <= b` and mirrors the result.
    pub fn from_fn(k: usize, mut f: impl FnMut(usize, usize) -> Option<f64>) -> Self {
        let mut vals = vec![None; k * k];
        for a in 0..k {
            for b in a..k {
                let v = f(a, b);
                vals[a * k + b] = v;
                vals[b * k + a] = v;
            }
        }
        Self { k, vals }
    }

    pub fn constant(k: usize, v: f64) -> Self {
        Self::from_fn(k, |_, _| Some(v))
    }

    /// `diag` on the diagonal, `off` elsewhere.
    pub fn planted(k: usize, diag: f64, off: f64) -> Self {
        Self::from_fn(k, |a, b| Some(if a == b { diag } else { off }))
    }

    /// From full rows; rejects non-square or asymmetric input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return Err(SbmError::DimensionMismatch("block matrix rows must form a square".into()));
        }
        for a in 0..k {
            for b in 0..a {
                if rows[a][b] != rows[b][a] {
                    return domain(format!("block matrix not symmetric at ({a}, {b})"));
                }
            }
        }
        Ok(Self::from_fn(k, |a, b| Some(rows[a][b])))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, a: usize, b: usize) -> Option<f64> {
        self.vals[a * self.k + b]
    }

    /// Value with undefined entries read as `fill`.
    pub fn get_or(&self, a: usize, b: usize, fill: f64) -> f64 {
        self.get(a, b).unwrap_or(fill)
    }

    pub fn is_probability(&self) -> bool {
        self.vals.iter().flatten().all(|v| (0.0..=1.0).contains(v))
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        Self { k: self.k, vals: self.vals.iter().map(|v| v.map(&mut f)).collect() }
    }

    /// Rows with undefined entries rendered as NaN.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.k)
            .map(|a| (0..self.k).map(|b| self.get_or(a, b, f64::NAN)).collect())
            .collect()
    }
}

/// Block sufficient statistics for a graph under a class assignment: pair
/// counts `n_ab`, edge counts `e_ab` and class sizes `N_a`.
///
/// When built against a [`PairMask`], held-out pairs are excluded from both
/// counts, so `n_ab` is the number of *observed* pairs in the block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockStats {
    k: usize,
    pair_counts: Vec<u64>,
    edge_counts: Vec<u64>,
    class_sizes: Vec<usize>,
}

impl BlockStats {
    pub fn compute(g: &Graph, z: &ClassAssignment) -> Result<Self> {
        Self::compute_observed(g, None, z)
    }

    pub fn compute_observed(g: &Graph, mask: Option<&PairMask>, z: &ClassAssignment) -> Result<Self> {
        if z.n_nodes() != g.n_nodes() {
            return Err(SbmError::DimensionMismatch(format!(
                "assignment covers {} nodes, graph has {}",
                z.n_nodes(),
                g.n_nodes()
            )));
        }
        if let Some(m) = mask {
            if m.n_nodes() != g.n_nodes() {
                return Err(SbmError::DimensionMismatch("mask and graph sizes differ".into()));
            }
        }
        let k = z.k();
        let labels = z.labels();
        let class_sizes = z.class_sizes();
        let mut pair_counts = vec![0u64; k * k];
        for a in 0..k {
            let na = class_sizes[a] as u64;
            pair_counts[a * k + a] = na * na.saturating_sub(1) / 2;
            for b in a + 1..k {
                let v = na * class_sizes[b] as u64;
                pair_counts[a * k + b] = v;
                pair_counts[b * k + a] = v;
            }
        }
        let mut edge_counts = vec![0u64; k * k];
        for (i, j) in g.edges() {
            if mask.is_some_and(|m| m.is_held_out(i, j)) {
                continue;
            }
            let (a, b) = (labels[i], labels[j]);
            edge_counts[a * k + b] += 1;
            if a != b {
                edge_counts[b * k + a] += 1;
            }
        }
        if let Some(m) = mask {
            for i in 0..g.n_nodes() {
                for &j in m.partners(i).iter().filter(|&&j| j > i) {
                    let (a, b) = (labels[i], labels[j]);
                    pair_counts[a * k + b] -= 1;
                    if a != b {
                        pair_counts[b * k + a] -= 1;
                    }
                }
            }
        }
        Ok(Self { k, pair_counts, edge_counts, class_sizes })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn pair_count(&self, a: usize, b: usize) -> u64 {
        self.pair_counts[a * self.k + b]
    }

    pub fn edge_count(&self, a: usize, b: usize) -> u64 {
        self.edge_counts[a * self.k + b]
    }

    pub fn class_sizes(&self) -> &[usize] {
        &self.class_sizes
    }

    /// `sum_{a<=b} n_ab`.
    pub fn total_pairs(&self) -> u64 {
        self.upper().map(|(a, b)| self.pair_count(a, b)).sum()
    }

    /// `sum_{a<=b} e_ab`.
    pub fn total_edges(&self) -> u64 {
        self.upper().map(|(a, b)| self.edge_count(a, b)).sum()
    }

    /// Class pairs `(a, b)` with `a <= b`.
    pub fn upper(&self) -> impl Iterator<Item = (usize, usize)> {
        let k = self.k;
        (0..k).flat_map(move |a| (a..k).map(move |b| (a, b)))
    }

    /// Profile log-likelihood `sum_{a<=b} n_ab H(e_ab / n_ab)` (negative entropy form).
    pub fn profile_log_likelihood(&self) -> f64 {
        self.upper()
            .map(|(a, b)| block_term(self.pair_count(a, b), self.edge_count(a, b)))
            .sum()
    }

    /// Removes a node from class `r`. `nbr[c]` counts its (observed) neighbors
    /// in class `c`; `avail[c]` counts its observed pairs to other members of
    /// class `c`.
    pub(crate) fn detach(&mut self, r: usize, nbr: &[u64], avail: &[u64]) {
        let k = self.k;
        for c in 0..k {
            self.edge_counts[r * k + c] -= nbr[c];
            self.pair_counts[r * k + c] -= avail[c];
            if c != r {
                self.edge_counts[c * k + r] -= nbr[c];
                self.pair_counts[c * k + r] -= avail[c];
            }
        }
        self.class_sizes[r] -= 1;
    }

    pub(crate) fn attach(&mut self, s: usize, nbr: &[u64], avail: &[u64]) {
        let k = self.k;
        for c in 0..k {
            self.edge_counts[s * k + c] += nbr[c];
            self.pair_counts[s * k + c] += avail[c];
            if c != s {
                self.edge_counts[c * k + s] += nbr[c];
                self.pair_counts[c * k + s] += avail[c];
            }
        }
        self.class_sizes[s] += 1;
    }

    /// Change in profile log-likelihood from attaching a detached node to
    /// class `s`. Only row `s` of the block structure changes.
    #[inline]
    pub(crate) fn attach_gain(
        &self,
        s: usize,
        nbr: &[u64],
        avail: &[u64],
        term: impl Fn(u64, u64) -> f64,
    ) -> f64 {
        let k = self.k;
        let row_p = &self.pair_counts[s * k..(s + 1) * k];
        let row_e = &self.edge_counts[s * k..(s + 1) * k];
        let mut gain = 0.0;
        for c in 0..k {
            let (n0, e0) = (row_p[c], row_e[c]);
            let (n1, e1) = (n0 + avail[c], e0 + nbr[c]);
            if n1 != n0 {
                gain += term(n1, e1) - term(n0, e0);
            }
        }
        gain
    }
}

/// Counts, for node `i`, its neighbors per class (`nbr`) and its observed pairs
/// to other members of each class (`avail`). Node `i` itself carries label
/// `labels[i]` and is excluded from its own class count.
pub(crate) fn node_class_counts(
    g: &Graph,
    mask: Option<&PairMask>,
    labels: &[usize],
    class_sizes: &[usize],
    i: usize,
    nbr: &mut [u64],
    avail: &mut [u64],
) {
    nbr.iter_mut().for_each(|v| *v = 0);
    for &j in g.neighbors(i) {
        nbr[labels[j]] += 1;
    }
    for (c, a) in avail.iter_mut().enumerate() {
        *a = class_sizes[c] as u64;
    }
    avail[labels[i]] -= 1;
    if let Some(m) = mask {
        for &j in m.partners(i) {
            avail[labels[j]] -= 1;
        }
        // Held-out edges are not part of the observed data.
        for &j in g.neighbors(i) {
            if m.is_held_out(i, j) {
                nbr[labels[j]] -= 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_counts_formula() {
        let z = ClassAssignment::new(vec![0, 0, 0, 1, 1], 2).unwrap();
        let s = BlockStats::compute(&Graph::empty(5), &z).unwrap();
        assert_eq!(s.pair_count(0, 0), 3);
        assert_eq!(s.pair_count(1, 1), 1);
        assert_eq!(s.pair_count(0, 1), 6);
        assert_eq!(s.total_pairs(), 10);
        assert_eq!(s.total_edges(), 0);
    }

    #[test]
    fn four_cycle_edge_counts() {
        // nodes 1-2-3-4 (0-based 0-1-2-3) in a cycle
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let z = ClassAssignment::new(vec![0, 0, 1, 1], 2).unwrap();
        let s = BlockStats::compute(&g, &z).unwrap();
        assert_eq!(s.edge_count(0, 0), 1);
        assert_eq!(s.edge_count(1, 1), 1);
        assert_eq!(s.edge_count(0, 1), 2);
        assert_eq!(s.edge_count(1, 0), 2);
    }

    #[test]
    fn masked_counts_exclude_held_out_pairs() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let z = ClassAssignment::new(vec![0, 0, 1, 1], 2).unwrap();
        let mask = PairMask::new(4, [(0, 1), (0, 2)]).unwrap();
        let s = BlockStats::compute_observed(&g, Some(&mask), &z).unwrap();
        assert_eq!(s.pair_count(0, 0), 0);
        assert_eq!(s.edge_count(0, 0), 0);
        assert_eq!(s.pair_count(0, 1), 3);
        assert_eq!(s.edge_count(0, 1), 2);
        assert_eq!(s.total_pairs(), 4);
    }

    #[test]
    fn dimension_mismatch() {
        let z = ClassAssignment::new(vec![0, 0], 1).unwrap();
        assert!(BlockStats::compute(&Graph::empty(3), &z).is_err());
    }

    #[test]
    fn from_rows_checks_symmetry() {
        assert!(BlockMatrix::from_rows(&[vec![0.1, 0.2], vec![0.3, 0.1]]).is_err());
        let m = BlockMatrix::from_rows(&[vec![0.1, 0.2], vec![0.2, 0.1]]).unwrap();
        assert_eq!(m.get(1, 0), Some(0.2));
    }
}
