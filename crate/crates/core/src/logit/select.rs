//! Model-order selection by BIC and pair-holdout cross-validation.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::alternate::{alternating_fit, alternating_fit_observed, AlternatingConfig};
use super::design::PairDesign;
use super::model::{logit_log_likelihood, sigmoid, softplus, LogitModel};
use rayon::prelude::*;
use crate::error::{domain, Result};
use crate::netcore::{n_pairs, pairs, Graph, PairMask};
use crate::seed::{derive_seed, rng_from_seed};

/// `-2 LL + (K(K+1)/2 + dim_beta) ln C(N, 2)` at the model's parameters.
pub fn bic_score(g: &Graph, m: &LogitModel, design: &PairDesign) -> Result<f64> {
    let ll = logit_log_likelihood(g, m, design)?;
    Ok(bic_from_loglik(ll, m.k, design.dim_beta(), g.n_nodes()))
}

pub fn bic_from_loglik(loglik: f64, k: usize, dim_beta: usize, n_nodes: usize) -> f64 {
    let params = (k * (k + 1) / 2 + dim_beta) as f64;
    -2.0 * loglik + params * (n_pairs(n_nodes) as f64).ln()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    /// Mean over folds of the per-pair held-out negative log-likelihood.
    pub mean_nll: f64,
    pub fold_nll: Vec<f64>,
    /// Fraction of held-out pairs misclassified by thresholding the
    /// predicted probability at 0.5, pooled over folds.
    pub misclassification_rate: f64,
}

/// Splits the pairs uniformly at random into `folds` groups; each group is
/// held out in turn, the model is fitted to the remaining pairs and scored on
/// the held-out ones.
pub fn cross_validate(
    g: &Graph,
    design: &PairDesign,
    cfg: &AlternatingConfig,
    folds: usize,
    seed: u64,
) -> Result<CrossValidation> {
    let n = g.n_nodes();
    let total = n_pairs(n);
    if folds < 2 || folds > total {
        return domain(format!("need 2 <= folds <= {total}, got {folds}"));
    }
    let mut all: Vec<(usize, usize)> = pairs(n).collect();
    all.shuffle(&mut rng_from_seed(derive_seed(seed, &[0xcf])));
    let scored: Vec<(f64, usize, usize)> = (0..folds)
        .into_par_iter()
        .map(|f| {
            let held: Vec<(usize, usize)> = all.iter().skip(f).step_by(folds).copied().collect();
            let mask = PairMask::new(n, held.iter().copied())?;
            let mut fold_cfg = cfg.clone();
            fold_cfg.sampler.seed = derive_seed(cfg.sampler.seed, &[f as u64]);
            let fit = alternating_fit_observed(g, Some(&mask), design, &fold_cfg)?;
            let mut nll = 0.0;
            let mut wrong = 0;
            for &(i, j) in &held {
                let eta = fit.model.linear_predictor(design, i, j);
                let a = g.has_edge(i, j);
                nll -= if a { eta } else { 0.0 } - softplus(eta);
                if (sigmoid(eta) > 0.5) != a {
                    wrong += 1;
                }
            }
            Ok((nll / held.len() as f64, wrong, held.len()))
        })
        .collect::<Result<_>>()?;
    let fold_nll: Vec<f64> = scored.iter().map(|s| s.0).collect();
    let wrong: usize = scored.iter().map(|s| s.1).sum();
    let scored: usize = scored.iter().map(|s| s.2).sum();
    Ok(CrossValidation {
        mean_nll: fold_nll.iter().sum::<f64>() / folds as f64,
        fold_nll,
        misclassification_rate: wrong as f64 / scored as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelOrderRow {
    pub k: usize,
    pub loglik: f64,
    pub n_params: usize,
    pub bic: f64,
    pub cv: Option<CrossValidation>,
    pub rank_deficient: bool,
    pub separated_blocks: bool,
}

/// Fits every `K` in `ks` and scores it by BIC and, when `folds` is given,
/// by cross-validation.
pub fn model_order_scan(
    g: &Graph,
    design: &PairDesign,
    ks: &[usize],
    base: &AlternatingConfig,
    folds: Option<usize>,
    seed: u64,
) -> Result<Vec<ModelOrderRow>> {
    ks.iter()
        .map(|&k| {
            let mut cfg = base.clone();
            cfg.sampler.k = k;
            cfg.sampler.seed = derive_seed(seed, &[k as u64]);
            let fit = alternating_fit(g, design, &cfg)?;
            let cv = folds.map(|f| cross_validate(g, design, &cfg, f, derive_seed(seed, &[k as u64, 1]))).transpose()?;
            Ok(ModelOrderRow {
                k,
                loglik: fit.loglik,
                n_params: k * (k + 1) / 2 + design.dim_beta(),
                bic: bic_from_loglik(fit.loglik, k, design.dim_beta(), g.n_nodes()),
                cv,
                rank_deficient: fit.condition.rank_deficient,
                separated_blocks: fit.condition.separated_blocks,
            })
        })
        .collect()
}
