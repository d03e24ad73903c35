//! Finite-sample confidence bounds on the divergence between block estimates
//! `theta_hat` and their expectations `theta_bar`, uniform over class
//! assignments, plus the observed error functionals they control.
//!
//! With probability at least `1 - delta`, for every assignment `z`,
//!
//! ```text
//! sum_{a<=b} n_ab D(theta_hat_ab || theta_bar_ab) < N ln K + (K^2 + K) ln(N/K + 1) + ln(1/delta)
//! ```
//!
//! Since `D(p || q) >= 2 (p - q)^2`, the same event gives
//! `{sum n_ab (theta_hat - theta_bar)^2}^{1/2} <= sqrt(eps / 2)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result, SbmError};
use crate::netcore::{
    bernoulli_kl_unchecked, block_stats, n_pairs, theta_bar, theta_hat, BlockMatrix, ClassAssignment, Graph,
    ProbabilityMatrix,
};

/// Right-hand side of the uniform KL bound, in nats.
pub fn kl_confidence_bound(n: usize, k: usize, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return domain(format!("delta = {delta} outside (0, 1)"));
    }
    if n == 0 || k == 0 {
        return domain("N and K must be positive");
    }
    if k > n {
        return domain(format!("K = {k} exceeds N = {n}"));
    }
    let (nf, kf) = (n as f64, k as f64);
    Ok(nf * kf.ln() + (kf * kf + kf) * (nf / kf + 1.0).ln() + (1.0 / delta).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmsBound {
    /// Bound on `{sum n_ab (theta_hat - theta_bar)^2}^{1/2}`.
    pub raw: f64,
    /// `raw / sqrt(C(N, 2))`.
    pub normalized: f64,
}

pub fn rms_bound_from_kl(epsilon_kl: f64, n: usize) -> Result<RmsBound> {
    if epsilon_kl.is_nan() || epsilon_kl < 0.0 {
        return domain(format!("KL bound {epsilon_kl} must be non-negative"));
    }
    let raw = (epsilon_kl / 2.0).sqrt();
    let pairs = n_pairs(n) as f64;
    Ok(RmsBound { raw, normalized: if pairs > 0.0 { raw / pairs.sqrt() } else { 0.0 } })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n_nodes: usize,
    pub k: usize,
    pub delta: f64,
    pub epsilon_kl: f64,
    pub epsilon_kl_normalized: f64,
    pub epsilon_rms: f64,
    pub epsilon_rms_normalized: f64,
}

impl BoundReport {
    pub fn new(n: usize, k: usize, delta: f64) -> Result<Self> {
        let eps = kl_confidence_bound(n, k, delta)?;
        let rms = rms_bound_from_kl(eps, n)?;
        Ok(Self {
            n_nodes: n,
            k,
            delta,
            epsilon_kl: eps,
            epsilon_kl_normalized: eps / n_pairs(n) as f64,
            epsilon_rms: rms.raw,
            epsilon_rms_normalized: rms.normalized,
        })
    }
}

/// Pair counts with `theta_hat` and `theta_bar` for every occupied block.
fn occupied_blocks(
    g: &Graph,
    p: &ProbabilityMatrix,
    z: &ClassAssignment,
) -> Result<Vec<(u64, f64, f64)>> {
    if g.n_nodes() != p.n_nodes() {
        return Err(SbmError::DimensionMismatch("graph and probability matrix sizes differ".into()));
    }
    let stats = block_stats(g, z)?;
    let hat: BlockMatrix = theta_hat(&stats);
    let bar = theta_bar(p, z)?;
    Ok(stats
        .upper()
        .filter(|&(a, b)| stats.pair_count(a, b) > 0)
        .map(|(a, b)| {
            (
                stats.pair_count(a, b),
                hat.get(a, b).expect("occupied"),
                bar.get(a, b).expect("occupied"),
            )
        })
        .collect())
}

/// `sum_{a<=b} n_ab D(theta_hat_ab || theta_bar_ab)`; `+inf` if some
/// `theta_bar` sits on the boundary while `theta_hat` differs.
pub fn observed_kl_error(g: &Graph, p: &ProbabilityMatrix, z: &ClassAssignment) -> Result<f64> {
    Ok(occupied_blocks(g, p, z)?
        .into_iter()
        .map(|(n, h, b)| n as f64 * bernoulli_kl_unchecked(h, b))
        .sum())
}

/// `{sum_{a<=b} n_ab (theta_hat_ab - theta_bar_ab)^2}^{1/2}`.
pub fn observed_rms_error(g: &Graph, p: &ProbabilityMatrix, z: &ClassAssignment) -> Result<f64> {
    Ok(occupied_blocks(g, p, z)?
        .into_iter()
        .map(|(n, h, b)| n as f64 * (h - b) * (h - b))
        .sum::<f64>()
        .sqrt())
}
