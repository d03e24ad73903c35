//! Experiment configuration, read from JSON with unknown keys rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SbmError};
use crate::fit::{default_sweeps, SamplerConfig, TemperatureSchedule};
use crate::logit::{AlternatingConfig, OptimizeOptions};
use crate::synth::Schedule;

/// Network sizes used by the trend experiments unless overridden.
pub const DESK_GRID: [usize; 6] = [50, 100, 200, 400, 700, 1050];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    BoundTightness,
    LikelihoodError,
    Misclassification,
    ModelOrder,
    FitReal,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::BoundTightness => "bound-tightness",
            Self::LikelihoodError => "likelihood-error",
            Self::Misclassification => "misclassification",
            Self::ModelOrder => "model-order",
            Self::FitReal => "fit-real",
        }
    }

    pub(crate) fn tag(self) -> u64 {
        self as u64 + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSettings {
    /// Sweeps per chain; `ceil(50 ln N)` when absent.
    #[serde(default)]
    pub sweeps: Option<usize>,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub schedule: TemperatureSchedule,
}

fn default_restarts() -> usize {
    5
}

impl Default for SamplerSettings {
    fn default() -> Self {
        Self { sweeps: None, restarts: default_restarts(), schedule: TemperatureSchedule::default() }
    }
}

impl SamplerSettings {
    pub fn to_config(&self, k: usize, n_nodes: usize, seed: u64) -> SamplerConfig {
        SamplerConfig::new(k, n_nodes)
            .with_sweeps(self.sweeps.unwrap_or_else(|| default_sweeps(n_nodes)))
            .with_restarts(self.restarts)
            .with_schedule(self.schedule.clone())
            .with_seed(seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LogitSettings {
    pub max_rounds: usize,
    pub mcmc_sweeps: usize,
    pub tol: f64,
    pub max_newton_iter: usize,
    pub ridge: f64,
}

impl Default for LogitSettings {
    fn default() -> Self {
        Self { max_rounds: 20, mcmc_sweeps: 5, tol: 1e-6, max_newton_iter: 100, ridge: 1e-8 }
    }
}

impl LogitSettings {
    pub fn to_config(&self, sampler: SamplerConfig) -> AlternatingConfig {
        let mut cfg = AlternatingConfig::new(sampler);
        cfg.max_rounds = self.max_rounds;
        cfg.mcmc_sweeps = self.mcmc_sweeps;
        cfg.tol = self.tol;
        cfg.optimizer = OptimizeOptions { max_iter: self.max_newton_iter, ridge: self.ridge, ..Default::default() };
        cfg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundTightnessParams {
    pub n: usize,
    pub p: f64,
    pub ks: Vec<usize>,
    pub deltas: Vec<f64>,
}

impl Default for BoundTightnessParams {
    fn default() -> Self {
        Self { n: 500, p: 0.075, ks: vec![5, 10, 20, 30, 40, 50], deltas: vec![0.05] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LikelihoodErrorParams {
    pub schedules: Vec<Schedule>,
}

impl Default for LikelihoodErrorParams {
    fn default() -> Self {
        let grid = DESK_GRID.to_vec();
        Self {
            schedules: vec![
                Schedule::new(grid.clone(), 4.0, 0.5).with_log_base(10.0),
                Schedule::new(grid.clone(), 2.0, 0.5),
                Schedule::new(grid, 2.0, 0.6),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MisclassificationParams {
    pub n_values: Vec<usize>,
    pub m_exponent: f64,
    pub k_exponent: f64,
    pub log_base: f64,
    pub gammas: Vec<f64>,
}

impl Default for MisclassificationParams {
    fn default() -> Self {
        Self {
            n_values: DESK_GRID.to_vec(),
            m_exponent: 2.0,
            k_exponent: 0.5,
            log_base: std::f64::consts::E,
            gammas: vec![0.8, 0.9, 1.0],
        }
    }
}

impl MisclassificationParams {
    pub fn schedule(&self, gamma: f64) -> Schedule {
        Schedule::new(self.n_values.clone(), self.m_exponent, self.k_exponent)
            .with_log_base(self.log_base)
            .with_gamma(gamma)
    }
}

/// Synthetic logit-blockmodel data: balanced planted classes, block
/// log-odds `theta_within` on the diagonal and `theta_between` elsewhere, and
/// independent uniformly drawn categorical covariates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticLogitParams {
    pub n: usize,
    pub k: usize,
    pub theta_within: f64,
    pub theta_between: f64,
    pub covariate_levels: Vec<usize>,
    /// Effects-coded coefficients, `sum (levels - 1)` entries.
    pub beta: Vec<f64>,
}

impl Default for SyntheticLogitParams {
    fn default() -> Self {
        Self {
            n: 60,
            k: 4,
            theta_within: 0.0,
            theta_between: -2.5,
            covariate_levels: vec![3],
            beta: vec![0.6, -0.3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelOrderParams {
    pub edges: Option<PathBuf>,
    pub covariates: Option<PathBuf>,
    /// Used when `edges` is absent.
    pub synthetic: Option<SyntheticLogitParams>,
    pub ks: Vec<usize>,
    /// Cross-validation folds; `None` skips cross-validation.
    pub folds: Option<usize>,
    /// Degree-bin covariate size; `None` leaves it out.
    pub degree_bins: Option<usize>,
    pub delta: f64,
    /// K values whose block summaries are written.
    pub summary_ks: Vec<usize>,
}

impl Default for ModelOrderParams {
    fn default() -> Self {
        Self {
            edges: None,
            covariates: None,
            synthetic: None,
            ks: (1..=8).collect(),
            folds: Some(5),
            degree_bins: Some(8),
            delta: 0.05,
            summary_ks: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitRealParams {
    pub edges: PathBuf,
    pub k: usize,
    #[serde(default)]
    pub covariates: Option<PathBuf>,
    #[serde(default)]
    pub truth: Option<PathBuf>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub degree_bins: Option<usize>,
}

fn default_delta() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub sampler: SamplerSettings,
    #[serde(default)]
    pub logit: LogitSettings,
    /// A trend counts as increasing when the Theil-Sen slope exceeds this,
    /// and as decreasing when it is below its negative.
    #[serde(default)]
    pub trend_threshold: f64,
    #[serde(default)]
    pub bound_tightness: Option<BoundTightnessParams>,
    #[serde(default)]
    pub likelihood_error: Option<LikelihoodErrorParams>,
    #[serde(default)]
    pub misclassification: Option<MisclassificationParams>,
    #[serde(default)]
    pub model_order: Option<ModelOrderParams>,
    #[serde(default)]
    pub fit_real: Option<FitRealParams>,
}

fn default_trials() -> usize {
    10
}

impl ExperimentConfig {
    /// Configuration with every default for `kind` filled in.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let mut cfg = Self {
            kind,
            trials: default_trials(),
            base_seed: 0,
            output: None,
            sampler: SamplerSettings::default(),
            logit: LogitSettings::default(),
            trend_threshold: 0.0,
            bound_tightness: None,
            likelihood_error: None,
            misclassification: None,
            model_order: None,
            fit_real: None,
        };
        cfg.fill_defaults();
        cfg
    }

    /// Inserts the default parameter section for the configured kind if it
    /// is missing.
    pub fn fill_defaults(&mut self) {
        match self.kind {
            ExperimentKind::BoundTightness => {
                self.bound_tightness.get_or_insert_with(Default::default);
            }
            ExperimentKind::LikelihoodError => {
                self.likelihood_error.get_or_insert_with(Default::default);
            }
            ExperimentKind::Misclassification => {
                self.misclassification.get_or_insert_with(Default::default);
            }
            ExperimentKind::ModelOrder => {
                let mo = self.model_order.get_or_insert_with(Default::default);
                if mo.edges.is_none() && mo.synthetic.is_none() {
                    mo.synthetic = Some(SyntheticLogitParams::default());
                }
            }
            ExperimentKind::FitReal => {}
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SbmError::Config(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.sampler.restarts == 0 || self.sampler.sweeps == Some(0) {
            return bad("sampler sweeps and restarts must be at least 1".into());
        }
        self.sampler.schedule.validate()?;
        if !(self.trend_threshold >= 0.0) {
            return bad("trend_threshold must be non-negative".into());
        }
        match self.kind {
            ExperimentKind::BoundTightness => {
                let Some(b) = &self.bound_tightness else { return bad("missing bound_tightness section".into()) };
                if b.ks.is_empty() || b.deltas.is_empty() {
                    return bad("bound_tightness needs at least one K and one delta".into());
                }
                if !(0.0..=1.0).contains(&b.p) {
                    return bad(format!("edge probability {} outside [0, 1]", b.p));
                }
                if let Some(k) = b.ks.iter().find(|&&k| k == 0 || k > b.n) {
                    return bad(format!("K = {k} must lie in 1..=N"));
                }
                if let Some(d) = b.deltas.iter().find(|&&d| !(d > 0.0 && d < 1.0)) {
                    return bad(format!("delta = {d} outside (0, 1)"));
                }
            }
            ExperimentKind::LikelihoodError => {
                let Some(l) = &self.likelihood_error else { return bad("missing likelihood_error section".into()) };
                if l.schedules.is_empty() {
                    return bad("likelihood_error needs at least one schedule".into());
                }
            }
            ExperimentKind::Misclassification => {
                let Some(m) = &self.misclassification else {
                    return bad("missing misclassification section".into());
                };
                if m.gammas.is_empty() || m.n_values.is_empty() {
                    return bad("misclassification needs gammas and n_values".into());
                }
            }
            ExperimentKind::ModelOrder => {
                let Some(m) = &self.model_order else { return bad("missing model_order section".into()) };
                if m.edges.is_none() && m.synthetic.is_none() {
                    return bad("model_order needs `edges` or `synthetic`".into());
                }
                if m.covariates.is_some() && m.edges.is_none() {
                    return bad("model_order `covariates` requires `edges`".into());
                }
                if m.ks.is_empty() || m.ks.contains(&0) {
                    return bad("model_order ks must be non-empty and positive".into());
                }
                if m.folds.is_some_and(|f| f < 2) {
                    return bad("model_order folds must be at least 2".into());
                }
                if m.degree_bins.is_some_and(|b| b < 2) {
                    return bad("degree_bins must be at least 2".into());
                }
            }
            ExperimentKind::FitReal => {
                let Some(f) = &self.fit_real else { return bad("missing fit_real section".into()) };
                if f.k == 0 {
                    return bad("fit_real k must be positive".into());
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut cfg: Self = serde_json::from_str(text).map_err(|e| SbmError::Config(e.to_string()))?;
        cfg.fill_defaults();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"kind": "bound-tightness"}"#).unwrap();
        assert_eq!(cfg.trials, 10);
        assert_eq!(cfg.bound_tightness.unwrap().ks, vec![5, 10, 20, 30, 40, 50]);
        let cfg = ExperimentConfig::from_json(r#"{"kind": "misclassification", "trials": 3}"#).unwrap();
        assert_eq!(cfg.misclassification.unwrap().n_values, DESK_GRID.to_vec());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"kind": "bound-tightness", "trails": 3}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"kind": "bound-tightness", "bound_tightness": {"k": [5]}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"kind": "fly"}"#).is_err());
    }

    #[test]
    fn kind_specific_requirements() {
        assert!(ExperimentConfig::from_json(r#"{"kind": "fit-real"}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"kind": "bound-tightness", "trials": 0}"#).is_err());
        assert!(ExperimentConfig::from_json(
            r#"{"kind": "model-order", "model_order": {"covariates": "c.csv"}}"#
        )
        .is_err());
        let cfg = ExperimentConfig::from_json(r#"{"kind": "fit-real", "fit_real": {"edges": "e.txt", "k": 3}}"#).unwrap();
        assert_eq!(cfg.fit_real.unwrap().delta, 0.05);
    }

    #[test]
    fn json_round_trip() {
        for kind in [ExperimentKind::LikelihoodError, ExperimentKind::ModelOrder] {
            let cfg = ExperimentConfig::defaults(kind);
            let text = serde_json::to_string(&cfg).unwrap();
            assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
        }
    }
}
