//! Blockmodel with a logistic link and pair covariates.

mod alternate;
mod covariates;
mod design;
mod model;
mod optimize;
mod select;

pub use alternate::{alternating_fit, alternating_fit_observed, AlternatingConfig, LogitFit};
pub use covariates::{degree_bin_covariate, Covariate, CovariateTable};
pub use design::{build_pair_design, PairDesign};
pub use model::{
    logit_gradient, logit_gradient_observed, logit_log_likelihood, logit_log_likelihood_observed, LogitGradient,
    LogitModel,
};
pub use optimize::{fit_parameters, optimize_theta_beta, OptimizeOptions, OptimizeOutcome, OptimizerCondition};
pub use select::{bic_from_loglik, bic_score, cross_validate, model_order_scan, CrossValidation, ModelOrderRow};
