//! Pair features `x(i, j)` built from shared categorical membership.
//!
//! For a covariate with `L` levels, a pair whose endpoints share level `l`
//! gets the effects-coded row for `l` on that covariate's `L - 1` free
//! coefficients: the unit vector `e_l` for `l < L - 1`, and `-1` on every
//! coordinate for the last level. Pairs that do not share a level get zeros.
//! The implied full-level coefficients `(beta_0, ..., beta_{L-2}, -sum beta)`
//! therefore sum to zero.

use super::covariates::CovariateTable;
use crate::netcore::pairs;

#[derive(Debug, Clone, PartialEq)]
pub struct PairDesign {
    n_nodes: usize,
    levels: Vec<Vec<usize>>,
    n_levels: Vec<usize>,
    block_start: Vec<usize>,
    dim_beta: usize,
    names: Vec<String>,
}

pub fn build_pair_design(cov: &CovariateTable) -> PairDesign {
    let mut block_start = Vec::new();
    let mut dim_beta = 0;
    for c in cov.covariates() {
        block_start.push(dim_beta);
        dim_beta += c.n_levels() - 1;
    }
    PairDesign {
        n_nodes: cov.n_nodes(),
        levels: cov.covariates().iter().map(|c| c.levels.clone()).collect(),
        n_levels: cov.covariates().iter().map(|c| c.n_levels()).collect(),
        block_start,
        dim_beta,
        names: cov.covariates().iter().map(|c| c.name.clone()).collect(),
    }
}

impl PairDesign {
    /// Design with no covariates.
    pub fn none(n_nodes: usize) -> Self {
        build_pair_design(&CovariateTable::empty(n_nodes))
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn dim_beta(&self) -> usize {
        self.dim_beta
    }

    pub fn n_covariates(&self) -> usize {
        self.levels.len()
    }

    pub fn covariate_names(&self) -> &[String] {
        &self.names
    }

    /// `(covariate, level)` for every covariate on which `i` and `j` agree.
    pub fn shared_levels(&self, i: usize, j: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.levels
            .iter()
            .enumerate()
            .filter(move |(_, l)| l[i] == l[j])
            .map(move |(c, l)| (c, l[i]))
    }

    /// Appends the non-zero coordinates of the row for `(covariate, level)`.
    pub(crate) fn push_row(&self, c: usize, level: usize, out: &mut Vec<(usize, f64)>) {
        let start = self.block_start[c];
        let free = self.n_levels[c] - 1;
        if level < free {
            out.push((start + level, 1.0));
        } else {
            out.extend((0..free).map(|l| (start + l, -1.0)));
        }
    }

    /// Dense `x(i, j)`.
    pub fn features(&self, i: usize, j: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim_beta];
        let mut nz = Vec::new();
        for (c, level) in self.shared_levels(i, j) {
            self.push_row(c, level, &mut nz);
        }
        for (idx, v) in nz {
            x[idx] += v;
        }
        x
    }

    /// Per covariate, the coefficient of every level; each vector sums to zero.
    pub fn full_level_coefficients(&self, beta: &[f64]) -> Vec<Vec<f64>> {
        (0..self.n_covariates())
            .map(|c| {
                let start = self.block_start[c];
                let free = &beta[start..start + self.n_levels[c] - 1];
                let mut full = free.to_vec();
                full.push(-free.iter().sum::<f64>());
                full
            })
            .collect()
    }

    /// `x(i, j)^T beta` for every pair, in upper-triangular order.
    pub fn offsets(&self, beta: &[f64]) -> Vec<f64> {
        let full = self.full_level_coefficients(beta);
        pairs(self.n_nodes)
            .map(|(i, j)| self.shared_levels(i, j).map(|(c, l)| full[c][l]).sum())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logit::covariates::Covariate;

    fn table(covs: Vec<(Vec<usize>, usize)>) -> CovariateTable {
        let n = covs[0].0.len();
        CovariateTable::new(
            n,
            covs.into_iter()
                .enumerate()
                .map(|(i, (l, nl))| Covariate::from_indices(format!("c{i}"), l, nl).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn binary_covariate_effects_coding() {
        let d = build_pair_design(&table(vec![(vec![0, 0, 1, 1, 0], 2)]));
        assert_eq!(d.dim_beta(), 1);
        assert_eq!(d.features(0, 1), vec![1.0]);
        assert_eq!(d.features(2, 3), vec![-1.0]);
        assert_eq!(d.features(0, 2), vec![0.0]);
    }

    #[test]
    fn no_shared_level_is_zero() {
        let d = build_pair_design(&table(vec![(vec![0, 1, 2], 3), (vec![1, 0, 0], 2)]));
        assert_eq!(d.features(0, 1), vec![0.0; 3]);
        assert_eq!(d.features(1, 2), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn dimension_of_mixed_levels() {
        let n = 9;
        let d = build_pair_design(&table(vec![
            ((0..n).map(|i| i % 9).collect(), 9),
            ((0..n).map(|i| i % 4).collect(), 4),
            ((0..n).map(|i| i % 2).collect(), 2),
            ((0..n).map(|i| i % 8).collect(), 8),
        ]));
        assert_eq!(d.dim_beta(), 19);
    }

    #[test]
    fn offsets_agree_with_features() {
        let d = build_pair_design(&table(vec![(vec![0, 1, 2, 2, 1, 0], 3), (vec![0, 0, 1, 1, 1, 0], 2)]));
        let beta = [0.3, -0.7, 1.1];
        let full = d.full_level_coefficients(&beta);
        for f in &full {
            assert_eq!(f.iter().sum::<f64>(), 0.0);
        }
        for ((i, j), o) in pairs(6).zip(d.offsets(&beta)) {
            let direct: f64 = d.features(i, j).iter().zip(&beta).map(|(x, b)| x * b).sum();
            assert!((direct - o).abs() < 1e-14);
        }
    }
}
