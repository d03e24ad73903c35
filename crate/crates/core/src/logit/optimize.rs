//! Newton's method for the logit blockmodel parameters at a fixed assignment.
//!
//! Pairs are aggregated into cells sharing a block and a shared-level
//! pattern; every pair in a cell has the same linear predictor, so the
//! objective only needs per-cell pair and edge counts.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::design::PairDesign;
use super::model::{sigmoid, softplus};
use crate::error::{Result, SbmError};
use crate::netcore::{pairs, BlockMatrix, ClassAssignment, Graph, PairMask};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    pub max_iter: usize,
    /// Stop once the gradient max-norm falls below this.
    pub grad_tol: f64,
    /// Ridge added when the problem is rank deficient or a block is separated.
    pub ridge: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self { max_iter: 100, grad_tol: 1e-8, ridge: 1e-8 }
    }
}

/// Diagnostics about the conditioning of the fit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct OptimizerCondition {
    pub rank_deficient: bool,
    /// Some non-empty block has all or none of its pairs linked.
    pub separated_blocks: bool,
    /// Ridge strength actually applied (0 when none).
    pub ridge: f64,
}

impl OptimizerCondition {
    pub fn merge(self, other: Self) -> Self {
        Self {
            rank_deficient: self.rank_deficient || other.rank_deficient,
            separated_blocks: self.separated_blocks || other.separated_blocks,
            ridge: self.ridge.max(other.ridge),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOutcome {
    pub theta_tilde: BlockMatrix,
    pub beta: Vec<f64>,
    /// Unpenalized log-likelihood at the returned parameters.
    pub loglik: f64,
    pub iterations: usize,
    pub converged: bool,
    pub grad_max_norm: f64,
    pub condition: OptimizerCondition,
}

struct Cell {
    x: Vec<(usize, f64)>,
    n: f64,
    e: f64,
}

struct Problem {
    cells: Vec<Cell>,
    dim: usize,
}

impl Problem {
    fn eta(&self, cell: &Cell, p: &[f64]) -> f64 {
        cell.x.iter().map(|&(i, v)| v * p[i]).sum()
    }

    fn loglik(&self, p: &[f64]) -> f64 {
        self.cells
            .iter()
            .map(|c| {
                let eta = self.eta(c, p);
                c.e * eta - c.n * softplus(eta)
            })
            .sum()
    }

    fn objective(&self, p: &[f64], ridge: f64) -> f64 {
        -self.loglik(p) + 0.5 * ridge * p.iter().map(|v| v * v).sum::<f64>()
    }

    /// Gradient and Hessian of the penalized negative log-likelihood.
    fn derivatives(&self, p: &[f64], ridge: f64) -> (DVector<f64>, DMatrix<f64>) {
        let mut g = DVector::from_iterator(self.dim, p.iter().map(|v| ridge * v));
        let mut h = DMatrix::from_diagonal_element(self.dim, self.dim, ridge);
        for c in &self.cells {
            let mu = sigmoid(self.eta(c, p));
            let r = c.n * mu - c.e;
            let w = c.n * mu * (1.0 - mu);
            for &(i, vi) in &c.x {
                g[i] += r * vi;
                for &(j, vj) in &c.x {
                    h[(i, j)] += w * vi * vj;
                }
            }
        }
        (g, h)
    }

    fn gram(&self) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(self.dim, self.dim);
        for c in &self.cells {
            for &(i, vi) in &c.x {
                for &(j, vj) in &c.x {
                    h[(i, j)] += c.n * vi * vj;
                }
            }
        }
        h
    }
}

/// Maximizes the logit blockmodel likelihood over `theta_tilde` and `beta`
/// for fixed `z`, skipping held-out pairs. Blocks with no observed pairs are
/// not identified and are fixed at 0.
pub fn fit_parameters(
    g: &Graph,
    mask: Option<&PairMask>,
    z: &ClassAssignment,
    design: &PairDesign,
    warm: Option<(&BlockMatrix, &[f64])>,
    opts: &OptimizeOptions,
) -> Result<OptimizeOutcome> {
    let n = g.n_nodes();
    if z.n_nodes() != n || design.n_nodes() != n {
        return Err(SbmError::DimensionMismatch("graph, design and assignment sizes differ".into()));
    }
    if let Some(m) = mask {
        if m.n_nodes() != n {
            return Err(SbmError::DimensionMismatch("mask size differs from graph".into()));
        }
    }
    let k = z.k();
    let labels = z.labels();
    let n_cov = design.n_covariates();

    // Aggregate by (block, shared-level pattern).
    let mut agg: HashMap<(usize, Vec<u32>), (u64, u64)> = HashMap::new();
    let mut pattern = vec![0u32; n_cov];
    for (idx, (i, j)) in pairs(n).enumerate() {
        if mask.is_some_and(|m| m.is_held_out_index(idx)) {
            continue;
        }
        pattern.iter_mut().for_each(|v| *v = 0);
        for (c, l) in design.shared_levels(i, j) {
            pattern[c] = l as u32 + 1;
        }
        let (a, b) = (labels[i].min(labels[j]), labels[i].max(labels[j]));
        let entry = agg.entry((a * k + b, pattern.clone())).or_default();
        entry.0 += 1;
        entry.1 += g.has_edge(i, j) as u64;
    }

    let mut block_totals = vec![(0u64, 0u64); k * k];
    for ((blk, _), (cnt, e)) in &agg {
        block_totals[*blk].0 += cnt;
        block_totals[*blk].1 += e;
    }
    let mut block_param = vec![usize::MAX; k * k];
    let mut n_active = 0;
    for (blk, &(cnt, _)) in block_totals.iter().enumerate() {
        if cnt > 0 {
            block_param[blk] = n_active;
            n_active += 1;
        }
    }
    let dim = n_active + design.dim_beta();
    let separated_blocks = block_totals.iter().any(|&(cnt, e)| cnt > 0 && (e == 0 || e == cnt));

    let mut keys: Vec<_> = agg.into_iter().collect();
    keys.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let mut cells = Vec::with_capacity(keys.len());
    let mut row = Vec::new();
    for ((blk, pat), (cnt, e)) in keys {
        row.clear();
        for (c, &l) in pat.iter().enumerate() {
            if l > 0 {
                design.push_row(c, l as usize - 1, &mut row);
            }
        }
        let mut x: Vec<(usize, f64)> = vec![(block_param[blk], 1.0)];
        for &(i, v) in &row {
            let i = n_active + i;
            match x.iter_mut().find(|(j, _)| *j == i) {
                Some(slot) => slot.1 += v,
                None => x.push((i, v)),
            }
        }
        cells.push(Cell { x, n: cnt as f64, e: e as f64 });
    }
    let problem = Problem { cells, dim };

    let rank_deficient = dim > 0 && {
        let eig = SymmetricEigen::new(problem.gram());
        let max = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        eig.eigenvalues.iter().any(|&v| v <= 1e-10 * max.max(1.0))
    };
    let mut condition = OptimizerCondition { rank_deficient, separated_blocks, ridge: 0.0 };
    if rank_deficient || separated_blocks {
        condition.ridge = opts.ridge;
    }

    let mut p = vec![0.0; dim];
    for a in 0..k {
        for b in a..k {
            let slot = block_param[a * k + b];
            if slot == usize::MAX {
                continue;
            }
            p[slot] = match warm {
                Some((tt, _)) => tt.get_or(a, b, 0.0),
                None => {
                    let (cnt, e) = block_totals[a * k + b];
                    let rate = (e as f64 + 0.5) / (cnt as f64 + 1.0);
                    (rate / (1.0 - rate)).ln()
                }
            };
        }
    }
    if let Some((_, beta)) = warm {
        if beta.len() != design.dim_beta() {
            return Err(SbmError::DimensionMismatch("warm-start beta has the wrong length".into()));
        }
        p[n_active..].copy_from_slice(beta);
    }

    let mut f = problem.objective(&p, condition.ridge);
    if !f.is_finite() {
        return Err(SbmError::Optimizer { message: "non-finite objective at start".into(), iterate: p });
    }
    let mut iterations = 0;
    let mut converged = false;
    let mut grad_norm = f64::INFINITY;
    while iterations < opts.max_iter {
        let (grad, mut hess) = problem.derivatives(&p, condition.ridge);
        grad_norm = grad.amax();
        if grad_norm < opts.grad_tol {
            converged = true;
            break;
        }
        iterations += 1;
        let chol = match hess.clone().cholesky() {
            Some(c) => c,
            None => {
                condition.rank_deficient = true;
                condition.ridge = condition.ridge.max(opts.ridge);
                hess += DMatrix::from_diagonal_element(dim, dim, opts.ridge.max(1e-12));
                match hess.cholesky() {
                    Some(c) => c,
                    None => {
                        return Err(SbmError::Optimizer {
                            message: "Hessian is not positive definite".into(),
                            iterate: p,
                        })
                    }
                }
            }
        };
        let step = chol.solve(&grad);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(v, s)| v - t * s).collect();
            let ft = problem.objective(&trial, condition.ridge);
            if ft.is_nan() {
                return Err(SbmError::Optimizer { message: "objective became NaN".into(), iterate: trial });
            }
            if ft <= f {
                p = trial;
                f = ft;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if !converged {
        let (grad, _) = problem.derivatives(&p, condition.ridge);
        grad_norm = grad.amax();
        converged = grad_norm < opts.grad_tol;
    }

    let theta_tilde = BlockMatrix::from_fn(k, |a, b| {
        let slot = block_param[a.min(b) * k + a.max(b)];
        Some(if slot == usize::MAX { 0.0 } else { p[slot] })
    });
    let loglik = problem.loglik(&p);
    if !loglik.is_finite() {
        return Err(SbmError::Optimizer { message: "non-finite log-likelihood".into(), iterate: p });
    }
    Ok(OptimizeOutcome {
        theta_tilde,
        beta: p[n_active..].to_vec(),
        loglik,
        iterations,
        converged,
        grad_max_norm: grad_norm,
        condition,
    })
}

/// [`fit_parameters`] on all pairs with default options.
pub fn optimize_theta_beta(
    g: &Graph,
    z: &ClassAssignment,
    design: &PairDesign,
    init: Option<(&BlockMatrix, &[f64])>,
) -> Result<OptimizeOutcome> {
    fit_parameters(g, None, z, design, init, &OptimizeOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logit::covariates::{Covariate, CovariateTable};
    use crate::logit::design::build_pair_design;
    use crate::logit::model::{logit_gradient, logit_log_likelihood, LogitModel};
    use crate::netcore::{profile_log_likelihood, theta_hat, block_stats};
    use approx::assert_relative_eq;

    fn two_block_graph() -> (Graph, ClassAssignment) {
        let mut edges = Vec::new();
        for i in 0..12 {
            for j in i + 1..12 {
                let same = (i < 6) == (j < 6);
                if (same && (i + j) % 3 != 0) || (!same && (i * j) % 7 == 1) {
                    edges.push((i, j));
                }
            }
        }
        let z = ClassAssignment::new((0..12).map(|i| (i >= 6) as usize).collect(), 2).unwrap();
        (Graph::from_edges(12, edges).unwrap(), z)
    }

    #[test]
    fn without_covariates_recovers_block_logits() {
        let (g, z) = two_block_graph();
        let d = PairDesign::none(12);
        let out = fit_parameters(&g, None, &z, &d, None, &OptimizeOptions::default()).unwrap();
        assert!(out.converged);
        let th = theta_hat(&block_stats(&g, &z).unwrap());
        for a in 0..2 {
            for b in 0..2 {
                let t = th.get(a, b).unwrap();
                assert_relative_eq!(out.theta_tilde.get(a, b).unwrap(), (t / (1.0 - t)).ln(), epsilon = 1e-8);
            }
        }
        assert_relative_eq!(out.loglik, profile_log_likelihood(&g, &z).unwrap(), epsilon = 1e-8);
    }

    #[test]
    fn stationary_point_with_covariates() {
        let (g, z) = two_block_graph();
        let cov = CovariateTable::new(
            12,
            vec![Covariate::from_indices("c", (0..12).map(|i| i % 3).collect(), 3).unwrap()],
        )
        .unwrap();
        let d = build_pair_design(&cov);
        let out = fit_parameters(&g, None, &z, &d, None, &OptimizeOptions::default()).unwrap();
        assert!(out.converged);
        let m = LogitModel::new(out.theta_tilde.clone(), out.beta.clone(), z).unwrap();
        assert!(logit_gradient(&g, &m, &d).unwrap().max_norm() < 1e-6);
        assert_relative_eq!(logit_log_likelihood(&g, &m, &d).unwrap(), out.loglik, epsilon = 1e-9);
    }

    #[test]
    fn separated_block_is_flagged_and_finite() {
        let g = Graph::from_edges(6, [(0, 1), (0, 2), (1, 2), (3, 4)]).unwrap();
        let z = ClassAssignment::new(vec![0, 0, 0, 1, 1, 1], 2).unwrap();
        let out = fit_parameters(&g, None, &z, &PairDesign::none(6), None, &OptimizeOptions::default()).unwrap();
        assert!(out.condition.separated_blocks);
        assert_eq!(out.condition.ridge, 1e-8);
        assert!(out.theta_tilde.get(0, 1).unwrap() < -10.0);
        assert!(out.theta_tilde.get(0, 0).unwrap() > 10.0);
        assert!(out.loglik.is_finite());
    }

    #[test]
    fn covariate_aliased_with_classes_is_rank_deficient() {
        let (g, z) = two_block_graph();
        let cov = CovariateTable::new(12, vec![Covariate::from_indices("c", z.labels().to_vec(), 2).unwrap()]).unwrap();
        let d = build_pair_design(&cov);
        let out = fit_parameters(&g, None, &z, &d, None, &OptimizeOptions::default()).unwrap();
        assert!(out.condition.rank_deficient);
        assert!(out.beta.iter().all(|v| v.is_finite()));
    }
}
