//! Simulation studies, file formats and evaluation metrics.

mod config;
mod experiments;
mod io;
mod metrics;
mod results;

pub use config::{
    BoundTightnessParams, ExperimentConfig, ExperimentKind, FitRealParams, LikelihoodErrorParams, LogitSettings,
    MisclassificationParams, ModelOrderParams, SamplerSettings, SyntheticLogitParams, DESK_GRID,
};
pub use experiments::{
    bound_tightness_trial, likelihood_error_trial, misclassification_trial, model_design, model_order_trial,
    run_bound_tightness, run_experiment, run_fit, run_fit_files, run_likelihood_error, run_misclassification,
    run_model_order, schedule_label, summarize_bounds, summarize_model_order, synthetic_logit_data,
    trend_summaries, BlockSummary, BoundSummary, ExperimentOutput, FitReport, LogitSummary, ModelOrderSummary,
    TrendDirection, TrendSummary,
};
pub use io::{
    parse_covariates, parse_edge_list, parse_labels, read_covariates, read_edge_list, read_labels, write_edge_list,
    write_labels,
};
pub use metrics::{likelihood_error_stat, median, medians_by_x, misclassification_count, theil_sen_slope};
pub use results::{read_rows, read_rows_file, sort_rows, write_rows, write_rows_file, ResultRow, RunManifest};
