//! Result tables (CSV) and run manifests (JSON).

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::Result;

/// One row per (configuration point, trial). Metrics that do not apply to
/// the experiment are left empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    /// Human-readable configuration point, such as `c=2,a=0.5`.
    pub label: String,
    pub n: usize,
    pub k: usize,
    pub m: Option<f64>,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub trial: usize,
    pub seed: u64,
    pub kl_error: Option<f64>,
    pub kl_bound: Option<f64>,
    pub rms_error: Option<f64>,
    pub rms_bound: Option<f64>,
    pub lik_error: Option<f64>,
    pub misclass_rate: Option<f64>,
    pub loglik: Option<f64>,
    pub bic: Option<f64>,
    pub cv_nll: Option<f64>,
    pub cv_misclass: Option<f64>,
    pub norm_kl_bound: Option<f64>,
}

impl ResultRow {
    pub fn new(experiment: &str, label: impl Into<String>, n: usize, k: usize, trial: usize, seed: u64) -> Self {
        Self {
            experiment: experiment.to_owned(),
            label: label.into(),
            n,
            k,
            m: None,
            gamma: None,
            delta: None,
            trial,
            seed,
            kl_error: None,
            kl_bound: None,
            rms_error: None,
            rms_bound: None,
            lik_error: None,
            misclass_rate: None,
            loglik: None,
            bic: None,
            cv_nll: None,
            cv_misclass: None,
            norm_kl_bound: None,
        }
    }
}

/// Canonical row order: label, N, K, delta, trial.
pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        (&a.experiment, &a.label, a.n, a.k)
            .cmp(&(&b.experiment, &b.label, b.n, b.k))
            .then(a.delta.unwrap_or(0.0).total_cmp(&b.delta.unwrap_or(0.0)))
            .then(a.trial.cmp(&b.trial))
    });
}

pub fn write_rows(rows: &[ResultRow], w: impl Write) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_rows(r: impl Read) -> Result<Vec<ResultRow>> {
    csv::Reader::from_reader(r).deserialize().map(|r| r.map_err(Into::into)).collect()
}

pub fn write_rows_file(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    write_rows(rows, std::fs::File::create(path)?)
}

pub fn read_rows_file(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    read_rows(std::fs::File::open(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub base_seed: u64,
    pub rows: usize,
    /// Per-row seeds, in output order.
    pub seeds: Vec<u64>,
    pub results: Option<String>,
    pub threads: usize,
}

impl RunManifest {
    pub fn new(config: &ExperimentConfig, rows: &[ResultRow], results: Option<String>, threads: usize) -> Self {
        Self {
            tool: "sbm".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: config.clone(),
            base_seed: config.base_seed,
            rows: rows.len(),
            seeds: rows.iter().map(|r| r.seed).collect(),
            results,
            threads,
        }
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}
