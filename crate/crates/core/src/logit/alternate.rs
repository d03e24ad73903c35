//! Alternating maximization over the assignment and the logit parameters.

use rand::Rng;

use super::design::PairDesign;
use super::model::{softplus, LogitModel};
use super::optimize::{fit_parameters, OptimizeOptions, OptimizerCondition};
use crate::error::{Result, SbmError};
use crate::fit::{gibbs_fit_observed, SamplerConfig};
use crate::netcore::{pair_index_unordered, ClassAssignment, Graph, PairMask};
use crate::seed::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, PartialEq)]
pub struct AlternatingConfig {
    /// Blockmodel sampler used for the starting assignment; its `k` and
    /// `seed` are the ones used throughout.
    pub sampler: SamplerConfig,
    pub max_rounds: usize,
    /// Metropolis sweeps over `z` between parameter updates.
    pub mcmc_sweeps: usize,
    /// Stop when a round improves the best log-likelihood by less than this,
    /// relative to its magnitude.
    pub tol: f64,
    pub optimizer: OptimizeOptions,
}

impl AlternatingConfig {
    pub fn new(sampler: SamplerConfig) -> Self {
        Self { sampler, max_rounds: 20, mcmc_sweeps: 5, tol: 1e-6, optimizer: OptimizeOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogitFit {
    pub model: LogitModel,
    pub loglik: f64,
    /// Best log-likelihood after each parameter update.
    pub trace: Vec<f64>,
    pub rounds: usize,
    pub converged: bool,
    /// Conditions seen over all parameter updates.
    pub condition: OptimizerCondition,
}

pub fn alternating_fit(g: &Graph, design: &PairDesign, cfg: &AlternatingConfig) -> Result<LogitFit> {
    alternating_fit_observed(g, None, design, cfg)
}

/// As [`alternating_fit`], with held-out pairs excluded.
pub fn alternating_fit_observed(
    g: &Graph,
    mask: Option<&PairMask>,
    design: &PairDesign,
    cfg: &AlternatingConfig,
) -> Result<LogitFit> {
    let n = g.n_nodes();
    if design.n_nodes() != n {
        return Err(SbmError::DimensionMismatch("design and graph sizes differ".into()));
    }
    let k = cfg.sampler.k;
    let start = gibbs_fit_observed(g, mask, &cfg.sampler)?;
    let mut z = start.best_z.into_labels();
    let zc = ClassAssignment::new(z.clone(), k)?;
    let first = fit_parameters(g, mask, &zc, design, None, &cfg.optimizer)?;
    let mut condition = first.condition;
    let mut trace = vec![first.loglik];
    let mut converged = first.converged;
    let mut best = LogitModel::new(first.theta_tilde.clone(), first.beta.clone(), zc)?;
    let mut best_ll = first.loglik;
    let mut current = (first.theta_tilde, first.beta);
    let mut rounds = 0;

    if k > 1 {
        let mut adj = vec![false; n];
        while rounds < cfg.max_rounds {
            rounds += 1;
            let mut rng = rng_from_seed(derive_seed(cfg.sampler.seed, &[0xa17e, rounds as u64]));
            let offsets = design.offsets(&current.1);
            let theta = |a: usize, b: usize| current.0.get_or(a, b, 0.0);
            for _ in 0..cfg.mcmc_sweeps {
                for i in 0..n {
                    let r = z[i];
                    let mut s = rng.gen_range(0..k - 1);
                    if s >= r {
                        s += 1;
                    }
                    for &j in g.neighbors(i) {
                        adj[j] = true;
                    }
                    let mut delta = 0.0;
                    for (j, &zj) in z.iter().enumerate() {
                        if j == i {
                            continue;
                        }
                        let idx = pair_index_unordered(n, i, j);
                        if mask.is_some_and(|m| m.is_held_out_index(idx)) {
                            continue;
                        }
                        let (eo, en) = (theta(r, zj) + offsets[idx], theta(s, zj) + offsets[idx]);
                        let a = if adj[j] { 1.0 } else { 0.0 };
                        delta += a * (en - eo) - softplus(en) + softplus(eo);
                    }
                    for &j in g.neighbors(i) {
                        adj[j] = false;
                    }
                    if delta >= 0.0 || rng.gen::<f64>() < delta.exp() {
                        z[i] = s;
                    }
                }
            }
            let zc = ClassAssignment::new(z.clone(), k)?;
            let out = fit_parameters(g, mask, &zc, design, Some((&current.0, &current.1)), &cfg.optimizer)?;
            condition = condition.merge(out.condition);
            let improved = out.loglik - best_ll > cfg.tol * best_ll.abs().max(1.0);
            if out.loglik > best_ll {
                best_ll = out.loglik;
                best = LogitModel::new(out.theta_tilde.clone(), out.beta.clone(), zc)?;
                converged = out.converged;
            }
            trace.push(best_ll);
            current = (out.theta_tilde, out.beta);
            if !improved {
                break;
            }
        }
    }
    Ok(LogitFit { model: best, loglik: best_ll, trace, rounds, converged, condition })
}
