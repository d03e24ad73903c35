//! Experiment drivers. Each configuration point and trial is an independent
//! job with its own derived seed, so rows can be run in parallel, in any
//! order, and individually re-run.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{
    BoundTightnessParams, ExperimentConfig, ExperimentKind, FitRealParams, LogitSettings, ModelOrderParams, SamplerSettings,
    SyntheticLogitParams,
};
use super::io::{read_covariates, read_edge_list, read_labels};
use super::metrics::{likelihood_error_stat, medians_by_x, misclassification_count, theil_sen_slope};
use super::results::{sort_rows, ResultRow};
use crate::bounds::{kl_confidence_bound, observed_kl_error, observed_rms_error, rms_bound_from_kl, BoundReport};
use crate::error::{Result, SbmError};
use crate::fit::gibbs_fit;
use crate::logit::{
    alternating_fit, bic_from_loglik, build_pair_design, cross_validate, degree_bin_covariate, Covariate,
    CovariateTable, PairDesign,
};
use crate::netcore::{block_stats, n_pairs, theta_hat, BlockMatrix, ClassAssignment, Graph};
use crate::seed::{derive_seed, real_tag, rng_from_seed};
use crate::synth::{balanced_assignment, calibrate_planted, expand_schedule, gen_blockmodel, gen_er, gen_logit_blockmodel, Schedule};

const GRAPH_STREAM: u64 = 1;
const SAMPLER_STREAM: u64 = 2;
const CV_STREAM: u64 = 3;

fn row_seed(base: u64, kind: ExperimentKind, parts: &[u64]) -> u64 {
    let mut all = vec![kind.tag()];
    all.extend_from_slice(parts);
    derive_seed(base, &all)
}

/// Everything a run produces: the rows plus kind-specific summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    pub bound_summaries: Vec<BoundSummary>,
    pub trends: Vec<TrendSummary>,
    pub block_summaries: Vec<BlockSummary>,
    pub model_order: Vec<ModelOrderSummary>,
    pub fit: Option<FitReport>,
}

impl ExperimentOutput {
    fn from_rows(rows: Vec<ResultRow>) -> Self {
        Self {
            rows,
            bound_summaries: Vec::new(),
            trends: Vec::new(),
            block_summaries: Vec::new(),
            model_order: Vec::new(),
            fit: None,
        }
    }
}

/// Runs the experiment named by `cfg.kind`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    match cfg.kind {
        ExperimentKind::BoundTightness => {
            let rows = run_bound_tightness(cfg)?;
            let mut out = ExperimentOutput::from_rows(rows);
            out.bound_summaries = summarize_bounds(&out.rows);
            Ok(out)
        }
        ExperimentKind::LikelihoodError => {
            let rows = run_likelihood_error(cfg)?;
            let mut out = ExperimentOutput::from_rows(rows);
            out.trends = trend_summaries(&out.rows, |r| r.lik_error, cfg.trend_threshold);
            Ok(out)
        }
        ExperimentKind::Misclassification => {
            let rows = run_misclassification(cfg)?;
            let mut out = ExperimentOutput::from_rows(rows);
            out.trends = trend_summaries(&out.rows, |r| r.misclass_rate, cfg.trend_threshold);
            Ok(out)
        }
        ExperimentKind::ModelOrder => {
            let (rows, block_summaries) = run_model_order(cfg)?;
            let mut out = ExperimentOutput::from_rows(rows);
            out.model_order = summarize_model_order(&out.rows);
            out.block_summaries = block_summaries;
            Ok(out)
        }
        ExperimentKind::FitReal => {
            let params = cfg.fit_real.as_ref().ok_or_else(|| SbmError::Config("missing fit_real section".into()))?;
            let report = run_fit_files(params, &cfg.sampler, &cfg.logit, cfg.base_seed)?;
            let mut out = ExperimentOutput::from_rows(Vec::new());
            out.fit = Some(report);
            Ok(out)
        }
    }
}

fn run_jobs<J: Sync>(jobs: &[J], f: impl Fn(&J) -> Result<Vec<ResultRow>> + Sync + Send) -> Result<Vec<ResultRow>> {
    let chunks: Vec<Vec<ResultRow>> = jobs.par_iter().map(f).collect::<Result<_>>()?;
    let mut rows: Vec<ResultRow> = chunks.into_iter().flatten().collect();
    sort_rows(&mut rows);
    Ok(rows)
}

// ---------------------------------------------------------------- bound tightness

pub fn run_bound_tightness(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let params = cfg.bound_tightness.clone().unwrap_or_default();
    let jobs: Vec<(usize, usize)> =
        params.ks.iter().flat_map(|&k| (0..cfg.trials).map(move |t| (k, t))).collect();
    run_jobs(&jobs, |&(k, trial)| bound_tightness_trial(&params, &cfg.sampler, cfg.base_seed, k, trial))
}

/// One ER graph, one K-class fit, and a row per confidence level.
pub fn bound_tightness_trial(
    params: &BoundTightnessParams,
    sampler: &SamplerSettings,
    base_seed: u64,
    k: usize,
    trial: usize,
) -> Result<Vec<ResultRow>> {
    let kind = ExperimentKind::BoundTightness;
    let seed = row_seed(base_seed, kind, &[params.n as u64, k as u64, real_tag(params.p), trial as u64]);
    let (g, p) = gen_er(params.n, params.p, derive_seed(seed, &[GRAPH_STREAM]))?;
    let fit = gibbs_fit(&g, &sampler.to_config(k, params.n, derive_seed(seed, &[SAMPLER_STREAM])))?;
    let kl = observed_kl_error(&g, &p, &fit.best_z)?;
    let rms = observed_rms_error(&g, &p, &fit.best_z)?;
    params
        .deltas
        .iter()
        .map(|&delta| {
            let bound = kl_confidence_bound(params.n, k, delta)?;
            let mut row = ResultRow::new(kind.as_str(), format!("p={}", params.p), params.n, k, trial, seed);
            row.m = Some(p.expected_edges());
            row.delta = Some(delta);
            row.kl_error = Some(kl);
            row.kl_bound = Some(bound);
            row.rms_error = Some(rms);
            row.rms_bound = Some(rms_bound_from_kl(bound, params.n)?.raw);
            row.norm_kl_bound = Some(bound / n_pairs(params.n) as f64);
            row.loglik = Some(fit.best_profile_loglik);
            Ok(row)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSummary {
    pub k: usize,
    pub delta: f64,
    pub trials: usize,
    pub kl_violations: usize,
    pub rms_violations: usize,
    /// Mean over trials of bound / observed error.
    pub mean_kl_ratio: f64,
    pub mean_rms_ratio: f64,
}

pub fn summarize_bounds(rows: &[ResultRow]) -> Vec<BoundSummary> {
    let mut keys: Vec<(usize, f64)> = rows.iter().filter_map(|r| Some((r.k, r.delta?))).collect();
    keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    keys.dedup();
    keys.into_iter()
        .map(|(k, delta)| {
            let group: Vec<&ResultRow> = rows.iter().filter(|r| r.k == k && r.delta == Some(delta)).collect();
            let count = |f: &dyn Fn(&ResultRow) -> bool| group.iter().filter(|r| f(r)).count();
            let mean = |f: &dyn Fn(&ResultRow) -> f64| group.iter().map(|r| f(r)).sum::<f64>() / group.len() as f64;
            let get = |v: Option<f64>| v.unwrap_or(f64::NAN);
            BoundSummary {
                k,
                delta,
                trials: group.len(),
                kl_violations: count(&|r| !(get(r.kl_error) <= get(r.kl_bound))),
                rms_violations: count(&|r| !(get(r.rms_error) <= get(r.rms_bound))),
                mean_kl_ratio: mean(&|r| get(r.kl_bound) / get(r.kl_error)),
                mean_rms_ratio: mean(&|r| get(r.rms_bound) / get(r.rms_error)),
            }
        })
        .collect()
}

// ---------------------------------------------------------------- trends

pub fn schedule_label(s: &Schedule) -> String {
    let base = if s.log_base == std::f64::consts::E { "e".to_owned() } else { s.log_base.to_string() };
    format!("c={},a={},log={base}", s.m_exponent, s.k_exponent)
}

pub fn run_likelihood_error(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let params = cfg.likelihood_error.clone().unwrap_or_default();
    let mut jobs = Vec::new();
    for s in &params.schedules {
        for point in expand_schedule(s)? {
            for trial in 0..cfg.trials {
                jobs.push((s.clone(), point, trial));
            }
        }
    }
    run_jobs(&jobs, |(s, point, trial)| {
        likelihood_error_trial(s, point.n, &cfg.sampler, cfg.base_seed, *trial).map(|r| vec![r])
    })
}

/// ER graph with `p = M / C(N, 2)` at the schedule's `N`, fitted with `K(N)` classes.
pub fn likelihood_error_trial(
    s: &Schedule,
    n: usize,
    sampler: &SamplerSettings,
    base_seed: u64,
    trial: usize,
) -> Result<ResultRow> {
    let single = Schedule { n_values: vec![n], ..s.clone() };
    let point = expand_schedule(&single)?[0];
    let kind = ExperimentKind::LikelihoodError;
    let seed = row_seed(
        base_seed,
        kind,
        &[n as u64, point.k as u64, real_tag(s.m_exponent), real_tag(s.k_exponent), real_tag(s.log_base), trial as u64],
    );
    let p_edge = point.m / n_pairs(n) as f64;
    let (g, p) = gen_er(n, p_edge, derive_seed(seed, &[GRAPH_STREAM]))?;
    let fit = gibbs_fit(&g, &sampler.to_config(point.k, n, derive_seed(seed, &[SAMPLER_STREAM])))?;
    let mut row = ResultRow::new(kind.as_str(), schedule_label(s), n, point.k, trial, seed);
    row.m = Some(point.m);
    row.lik_error = Some(likelihood_error_stat(&g, &p, &fit.best_z)?);
    row.loglik = Some(fit.best_profile_loglik);
    Ok(row)
}

pub fn run_misclassification(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let params = cfg.misclassification.clone().unwrap_or_default();
    let mut jobs = Vec::new();
    for &gamma in &params.gammas {
        for point in expand_schedule(&params.schedule(gamma))? {
            for trial in 0..cfg.trials {
                jobs.push((gamma, point, trial));
            }
        }
    }
    run_jobs(&jobs, |&(gamma, point, trial)| {
        misclassification_trial(point.n, point.k, point.m, gamma, &cfg.sampler, cfg.base_seed, trial).map(|r| vec![r])
    })
}

/// Calibrated planted model at `(N, K, M, gamma)`, fitted with the true `K`.
pub fn misclassification_trial(
    n: usize,
    k: usize,
    m: f64,
    gamma: f64,
    sampler: &SamplerSettings,
    base_seed: u64,
    trial: usize,
) -> Result<ResultRow> {
    let kind = ExperimentKind::Misclassification;
    let seed = row_seed(base_seed, kind, &[n as u64, k as u64, real_tag(gamma), real_tag(m), trial as u64]);
    let model = calibrate_planted(n, k, m, gamma)?;
    let (g, _) = gen_blockmodel(&model, derive_seed(seed, &[GRAPH_STREAM]))?;
    let fit = gibbs_fit(&g, &sampler.to_config(k, n, derive_seed(seed, &[SAMPLER_STREAM])))?;
    let mut row = ResultRow::new(kind.as_str(), format!("gamma={gamma}"), n, k, trial, seed);
    row.m = Some(m);
    row.gamma = Some(gamma);
    row.misclass_rate = Some(misclassification_count(&model.z_bar, &fit.best_z)? as f64 / n as f64);
    row.loglik = Some(fit.best_profile_loglik);
    Ok(row)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrendDirection {
    Increasing,
    Decreasing,
    Flat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendSummary {
    pub label: String,
    /// `(N, median metric over trials)`.
    pub medians: Vec<(f64, f64)>,
    pub slope: Option<f64>,
    pub direction: TrendDirection,
}

/// Theil-Sen slope of per-N medians of `metric`, for each row label.
pub fn trend_summaries(rows: &[ResultRow], metric: impl Fn(&ResultRow) -> Option<f64>, threshold: f64) -> Vec<TrendSummary> {
    let mut labels: Vec<&str> = rows.iter().map(|r| r.label.as_str()).collect();
    labels.sort_unstable();
    labels.dedup();
    labels
        .into_iter()
        .map(|label| {
            let obs: Vec<(f64, f64)> =
                rows.iter().filter(|r| r.label == label).filter_map(|r| Some((r.n as f64, metric(r)?))).collect();
            let medians = medians_by_x(&obs);
            let slope = theil_sen_slope(&medians);
            let direction = match slope {
                Some(s) if s > threshold => TrendDirection::Increasing,
                Some(s) if s < -threshold => TrendDirection::Decreasing,
                _ => TrendDirection::Flat,
            };
            TrendSummary { label: label.to_owned(), medians, slope, direction }
        })
        .collect()
}

// ---------------------------------------------------------------- model order

/// Synthetic data drawn from the logit blockmodel, with its true classes.
pub fn synthetic_logit_data(params: &SyntheticLogitParams, seed: u64) -> Result<(Graph, CovariateTable, ClassAssignment)> {
    let z = balanced_assignment(params.n, params.k)?;
    let mut rng = rng_from_seed(derive_seed(seed, &[0xc0]));
    let covs = params
        .covariate_levels
        .iter()
        .enumerate()
        .map(|(c, &l)| Covariate::from_indices(format!("x{c}"), (0..params.n).map(|_| rng.gen_range(0..l)).collect(), l))
        .collect::<Result<Vec<_>>>()?;
    let cov = CovariateTable::new(params.n, covs)?;
    let design = build_pair_design(&cov);
    let theta = BlockMatrix::planted(params.k, params.theta_within, params.theta_between);
    let (g, _) = gen_logit_blockmodel(&z, &theta, &design, &params.beta, derive_seed(seed, &[GRAPH_STREAM]))?;
    Ok((g, cov, z))
}

/// Class sizes and fitted block probabilities for one `K`, with the node
/// order that groups nodes by class (for permuted-adjacency plots).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub k: usize,
    pub trial: usize,
    pub class_sizes: Vec<usize>,
    /// `sigmoid(theta_tilde)`.
    pub block_probabilities: Vec<Vec<f64>>,
    pub beta: Vec<f64>,
    pub node_order: Vec<usize>,
    pub labels: Vec<usize>,
}

fn model_order_data(params: &ModelOrderParams, base_seed: u64, trial: usize) -> Result<(Graph, CovariateTable)> {
    match (&params.edges, &params.synthetic) {
        (Some(edges), _) => match &params.covariates {
            Some(path) => {
                let cov = read_covariates(path)?;
                let g = read_edge_list(edges, Some(cov.n_nodes()))?;
                Ok((g, cov))
            }
            None => {
                let g = read_edge_list(edges, None)?;
                let n = g.n_nodes();
                Ok((g, CovariateTable::empty(n)))
            }
        },
        (None, Some(syn)) => {
            let seed = row_seed(base_seed, ExperimentKind::ModelOrder, &[0xda7a, trial as u64]);
            let (g, cov, _) = synthetic_logit_data(syn, seed)?;
            Ok((g, cov))
        }
        (None, None) => Err(SbmError::Config("model_order needs `edges` or `synthetic`".into())),
    }
}

pub fn run_model_order(cfg: &ExperimentConfig) -> Result<(Vec<ResultRow>, Vec<BlockSummary>)> {
    let params = cfg.model_order.clone().ok_or_else(|| SbmError::Config("missing model_order section".into()))?;
    let data: Vec<(Graph, CovariateTable)> =
        (0..cfg.trials).map(|t| model_order_data(&params, cfg.base_seed, t)).collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> =
        (0..cfg.trials).flat_map(|t| params.ks.iter().map(move |&k| (t, k))).collect();
    let results: Vec<(ResultRow, Option<BlockSummary>)> = jobs
        .par_iter()
        .map(|&(trial, k)| {
            let (g, cov) = &data[trial];
            model_order_trial(g, cov, &params, cfg, k, trial)
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(results.len());
    let mut summaries = Vec::new();
    for (row, summary) in results {
        rows.push(row);
        summaries.extend(summary);
    }
    sort_rows(&mut rows);
    summaries.sort_by_key(|s| (s.trial, s.k));
    Ok((rows, summaries))
}

/// Adds the degree-bin covariate when requested and builds the design.
pub fn model_design(g: &Graph, cov: &CovariateTable, degree_bins: Option<usize>) -> Result<PairDesign> {
    let mut cov = cov.clone();
    if let Some(b) = degree_bins {
        cov.push(degree_bin_covariate(g, b)?)?;
    }
    Ok(build_pair_design(&cov))
}

/// Fits one `K` to one data set: BIC, cross-validation and the normalized
/// KL bound for that `K`.
pub fn model_order_trial(
    g: &Graph,
    cov: &CovariateTable,
    params: &ModelOrderParams,
    cfg: &ExperimentConfig,
    k: usize,
    trial: usize,
) -> Result<(ResultRow, Option<BlockSummary>)> {
    let kind = ExperimentKind::ModelOrder;
    let n = g.n_nodes();
    let seed = row_seed(cfg.base_seed, kind, &[n as u64, k as u64, 0, trial as u64]);
    let design = model_design(g, cov, params.degree_bins)?;
    let alt = cfg.logit.to_config(cfg.sampler.to_config(k, n, derive_seed(seed, &[SAMPLER_STREAM])));
    let fit = alternating_fit(g, &design, &alt)?;
    let label = if params.edges.is_some() { "data" } else { "synthetic" };
    let mut row = ResultRow::new(kind.as_str(), label, n, k, trial, seed);
    row.m = Some(g.edge_count() as f64);
    row.delta = Some(params.delta);
    row.loglik = Some(fit.loglik);
    row.bic = Some(bic_from_loglik(fit.loglik, k, design.dim_beta(), n));
    row.norm_kl_bound = Some(kl_confidence_bound(n, k, params.delta)? / n_pairs(n) as f64);
    if let Some(folds) = params.folds {
        let cv = cross_validate(g, &design, &alt, folds, derive_seed(seed, &[CV_STREAM]))?;
        row.cv_nll = Some(cv.mean_nll);
        row.cv_misclass = Some(cv.misclassification_rate);
    }
    let summary = params.summary_ks.contains(&k).then(|| block_summary(&fit.model.z, &fit.model.theta_tilde, &fit.model.beta, trial));
    Ok((row, summary))
}

fn block_summary(z: &ClassAssignment, theta_tilde: &BlockMatrix, beta: &[f64], trial: usize) -> BlockSummary {
    let mut node_order: Vec<usize> = (0..z.n_nodes()).collect();
    node_order.sort_by_key(|&i| (z.label(i), i));
    BlockSummary {
        k: z.k(),
        trial,
        class_sizes: z.class_sizes(),
        block_probabilities: theta_tilde.map(|t| 1.0 / (1.0 + (-t).exp())).to_rows(),
        beta: beta.to_vec(),
        node_order,
        labels: z.labels().to_vec(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelOrderSummary {
    pub trial: usize,
    pub bic_argmin: usize,
    pub cv_argmin: Option<usize>,
}

pub fn summarize_model_order(rows: &[ResultRow]) -> Vec<ModelOrderSummary> {
    let mut trials: Vec<usize> = rows.iter().map(|r| r.trial).collect();
    trials.sort_unstable();
    trials.dedup();
    let argmin = |group: &[&ResultRow], f: &dyn Fn(&ResultRow) -> Option<f64>| {
        group
            .iter()
            .filter_map(|r| Some((r.k, f(r)?)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .map(|(k, _)| k)
    };
    trials
        .into_iter()
        .filter_map(|t| {
            let group: Vec<&ResultRow> = rows.iter().filter(|r| r.trial == t).collect();
            Some(ModelOrderSummary { trial: t, bic_argmin: argmin(&group, &|r| r.bic)?, cv_argmin: argmin(&group, &|r| r.cv_nll) })
        })
        .collect()
}

// ---------------------------------------------------------------- single fit

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogitSummary {
    pub loglik: f64,
    pub bic: f64,
    pub block_probabilities: Vec<Vec<f64>>,
    pub beta: Vec<f64>,
    pub covariates: Vec<String>,
    pub rank_deficient: bool,
    pub separated_blocks: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub k: usize,
    pub profile_loglik: f64,
    /// Sample block proportions; NaN marks empty blocks.
    pub theta_hat: Vec<Vec<f64>>,
    pub class_sizes: Vec<usize>,
    pub labels: Vec<usize>,
    pub bounds: BoundReport,
    pub misclassified: Option<usize>,
    pub logit: Option<LogitSummary>,
}

/// Plain blockmodel fit with its bounds; with covariates, also the logit
/// blockmodel.
pub fn run_fit(
    g: &Graph,
    k: usize,
    cov: Option<&CovariateTable>,
    truth: Option<&ClassAssignment>,
    delta: f64,
    degree_bins: Option<usize>,
    sampler: &SamplerSettings,
    logit: &LogitSettings,
    seed: u64,
) -> Result<FitReport> {
    let n = g.n_nodes();
    let fit = gibbs_fit(g, &sampler.to_config(k, n, derive_seed(seed, &[SAMPLER_STREAM])))?;
    let stats = block_stats(g, &fit.best_z)?;
    let misclassified = truth.map(|t| misclassification_count(t, &fit.best_z)).transpose()?;
    let logit = match (cov, degree_bins) {
        (None, None) => None,
        _ => {
            let empty = CovariateTable::empty(n);
            let design = model_design(g, cov.unwrap_or(&empty), degree_bins)?;
            let alt = logit.to_config(sampler.to_config(k, n, derive_seed(seed, &[SAMPLER_STREAM, 1])));
            let lf = alternating_fit(g, &design, &alt)?;
            Some(LogitSummary {
                loglik: lf.loglik,
                bic: bic_from_loglik(lf.loglik, k, design.dim_beta(), n),
                block_probabilities: lf.model.theta_tilde.map(|t| 1.0 / (1.0 + (-t).exp())).to_rows(),
                beta: lf.model.beta.clone(),
                covariates: design.covariate_names().to_vec(),
                rank_deficient: lf.condition.rank_deficient,
                separated_blocks: lf.condition.separated_blocks,
            })
        }
    };
    Ok(FitReport {
        n_nodes: n,
        n_edges: g.edge_count(),
        k,
        profile_loglik: fit.best_profile_loglik,
        theta_hat: theta_hat(&stats).to_rows(),
        class_sizes: fit.best_z.class_sizes(),
        labels: fit.best_z.labels().to_vec(),
        bounds: BoundReport::new(n, k, delta)?,
        misclassified,
        logit,
    })
}

pub fn run_fit_files(
    params: &FitRealParams,
    sampler: &SamplerSettings,
    logit: &LogitSettings,
    seed: u64,
) -> Result<FitReport> {
    let cov = params.covariates.as_ref().map(read_covariates).transpose()?;
    let truth = params.truth.as_ref().map(read_labels).transpose()?;
    let n = cov.as_ref().map(|c| c.n_nodes()).or(truth.as_ref().map(|t| t.n_nodes()));
    let g = read_edge_list(&params.edges, n)?;
    run_fit(&g, params.k, cov.as_ref(), truth.as_ref(), params.delta, params.degree_bins, sampler, logit, seed)
}
