//! Arbitrary partitions of the node-pair set and their expected likelihood.

use super::assignment::ClassAssignment;
use super::kl::neg_entropy;
use super::pairs::{n_pairs, pairs};
use super::prob::ProbabilityMatrix;
use crate::error::{domain, Result, SbmError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    cell_of: Vec<usize>,
    n_cells: usize,
}

impl Partition {
    /// `cell_of` lists a cell index for every pair in upper-triangular order.
    pub fn new(n: usize, cell_of: Vec<usize>, n_cells: usize) -> Result<Self> {
        if cell_of.len() != n_pairs(n) {
            return domain(format!(
                "partition covers {} of {} pairs",
                cell_of.len(),
                n_pairs(n)
            ));
        }
        if let Some(bad) = cell_of.iter().find(|&&c| c >= n_cells) {
            return domain(format!("cell index {bad} outside 0..{n_cells}"));
        }
        Ok(Self { n, cell_of, n_cells })
    }

    /// Partition induced by a class assignment: the pair `(i, j)` goes to the
    /// cell of the unordered class pair `{z_i, z_j}`.
    pub fn from_assignment(z: &ClassAssignment) -> Self {
        let k = z.k();
        let labels = z.labels();
        let cell_of = pairs(z.n_nodes())
            .map(|(i, j)| {
                let (a, b) = (labels[i].min(labels[j]), labels[i].max(labels[j]));
                a * k + b
            })
            .collect();
        Self { n: z.n_nodes(), cell_of, n_cells: k * k }
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn cells(&self) -> &[usize] {
        &self.cell_of
    }

    pub fn cell_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_cells];
        for &c in &self.cell_of {
            sizes[c] += 1;
        }
        sizes
    }

    /// Number of non-empty cells.
    pub fn n_used_cells(&self) -> usize {
        self.cell_sizes().iter().filter(|&&s| s > 0).count()
    }

    /// Whether every cell of `self` lies inside a single cell of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        if self.n != coarser.n {
            return false;
        }
        let mut parent = vec![usize::MAX; self.n_cells];
        for (&fine, &coarse) in self.cell_of.iter().zip(&coarser.cell_of) {
            match parent[fine] {
                usize::MAX => parent[fine] = coarse,
                p if p != coarse => return false,
                _ => {}
            }
        }
        true
    }
}

/// Replaces `pi` by the finer partition `finer_cells` (one new cell index per
/// pair). Fails if a new cell straddles two cells of `pi`.
pub fn refine_partition(pi: &Partition, finer_cells: Vec<usize>) -> Result<Partition> {
    let n_cells = finer_cells.iter().max().map_or(0, |m| m + 1);
    let finer = Partition::new(pi.n, finer_cells, n_cells)?;
    if !finer.refines(pi) {
        return domain("split crosses a parent-cell boundary");
    }
    Ok(finer)
}

/// `Lbar*_P(Pi) = sum_l |S_l| H(mean of P over S_l)` (negative entropy form).
pub fn partition_expected_log_likelihood(p: &ProbabilityMatrix, pi: &Partition) -> Result<f64> {
    if p.n_nodes() != pi.n {
        return Err(SbmError::DimensionMismatch("partition and probability matrix sizes differ".into()));
    }
    let mut sums = vec![0.0; pi.n_cells];
    let mut counts = vec![0u64; pi.n_cells];
    for (&c, &pij) in pi.cell_of.iter().zip(p.values()) {
        sums[c] += pij;
        counts[c] += 1;
    }
    Ok(sums
        .iter()
        .zip(&counts)
        .filter(|(_, &n)| n > 0)
        .map(|(&s, &n)| n as f64 * neg_entropy((s / n as f64).clamp(0.0, 1.0)))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::likelihood::expected_profile_log_likelihood;
    use approx::assert_relative_eq;

    #[test]
    fn single_cell_constant() {
        let p = ProbabilityMatrix::constant(6, 0.4).unwrap();
        let pi = Partition::new(6, vec![0; 15], 1).unwrap();
        let v = partition_expected_log_likelihood(&p, &pi).unwrap();
        assert_relative_eq!(v, 15.0 * neg_entropy(0.4), epsilon = 1e-12);
    }

    #[test]
    fn induced_partition_coincides() {
        let p = ProbabilityMatrix::from_fn(7, |i, j| ((i * 7 + j) % 10) as f64 / 10.0).unwrap();
        let z = ClassAssignment::new(vec![0, 2, 1, 0, 2, 2, 1], 3).unwrap();
        let a = partition_expected_log_likelihood(&p, &Partition::from_assignment(&z)).unwrap();
        let b = expected_profile_log_likelihood(&p, &z).unwrap();
        assert_relative_eq!(a, b, epsilon = 1e-12);
    }

    #[test]
    fn refine_checks() {
        let pi = Partition::new(3, vec![0, 0, 1], 2).unwrap();
        assert_eq!(refine_partition(&pi, vec![0, 0, 1]).unwrap(), pi);
        let split = refine_partition(&pi, vec![0, 2, 1]).unwrap();
        assert_eq!(split.n_used_cells(), pi.n_used_cells() + 1);
        assert!(refine_partition(&pi, vec![0, 1, 1]).is_err());
        assert!(Partition::new(3, vec![0, 0], 1).is_err());
        assert!(Partition::new(3, vec![0, 0, 2], 2).is_err());
    }
}
