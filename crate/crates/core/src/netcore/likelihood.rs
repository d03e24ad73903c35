//! Blockmodel log-likelihoods `L(A; z, theta)`, their expectations under an
//! independent-Bernoulli probability matrix, and the profile versions with
//! `theta` maximized out.

use super::assignment::ClassAssignment;
use super::block::{BlockMatrix, BlockStats};
use super::graph::Graph;
use super::kl::{bernoulli_kl_unchecked, neg_entropy};
use super::pairs::pairs;
use super::prob::ProbabilityMatrix;
use crate::error::{domain, Result, SbmError};

pub fn block_stats(g: &Graph, z: &ClassAssignment) -> Result<BlockStats> {
    BlockStats::compute(g, z)
}

/// Sample block proportions `e_ab / n_ab`; undefined for empty blocks.
pub fn theta_hat(stats: &BlockStats) -> BlockMatrix {
    BlockMatrix::from_fn(stats.k(), |a, b| {
        let n = stats.pair_count(a, b);
        (n > 0).then(|| stats.edge_count(a, b) as f64 / n as f64)
    })
}

/// Per-block sums of `P_ij` and pair counts.
fn block_probability_sums(p: &ProbabilityMatrix, z: &ClassAssignment) -> Result<(Vec<f64>, Vec<u64>)> {
    if p.n_nodes() != z.n_nodes() {
        return Err(SbmError::DimensionMismatch(format!(
            "probability matrix covers {} nodes, assignment {}",
            p.n_nodes(),
            z.n_nodes()
        )));
    }
    let k = z.k();
    let labels = z.labels();
    let mut sums = vec![0.0; k * k];
    let mut counts = vec![0u64; k * k];
    for ((i, j), &pij) in pairs(p.n_nodes()).zip(p.values()) {
        let (a, b) = ordered(labels[i], labels[j]);
        sums[a * k + b] += pij;
        counts[a * k + b] += 1;
    }
    Ok((sums, counts))
}

#[inline]
fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Block averages of `P`, the expectation of [`theta_hat`].
pub fn theta_bar(p: &ProbabilityMatrix, z: &ClassAssignment) -> Result<BlockMatrix> {
    let (sums, counts) = block_probability_sums(p, z)?;
    let k = z.k();
    Ok(BlockMatrix::from_fn(k, |a, b| {
        let n = counts[a * k + b];
        (n > 0).then(|| (sums[a * k + b] / n as f64).clamp(0.0, 1.0))
    }))
}

fn check_theta(theta: &BlockMatrix, z: &ClassAssignment) -> Result<()> {
    if theta.k() != z.k() {
        return Err(SbmError::DimensionMismatch(format!(
            "theta is {}x{} but K = {}",
            theta.k(),
            theta.k(),
            z.k()
        )));
    }
    if !theta.is_probability() {
        return domain("theta entries must lie in [0, 1]");
    }
    Ok(())
}

/// `sum_{a<=b} { s ln theta + (n - s) ln(1 - theta) }` with the convention that
/// a zero weight contributes nothing even when the log is infinite.
fn block_loglik(n: f64, s: f64, theta: f64) -> f64 {
    let mut v = 0.0;
    if s > 0.0 {
        v += s * theta.ln();
    }
    if n - s > 0.0 {
        v += (n - s) * (-theta).ln_1p();
    }
    v
}

/// `L(A; z, theta)`. Returns `-inf` when `theta` rules out an observed value.
pub fn log_likelihood(g: &Graph, z: &ClassAssignment, theta: &BlockMatrix) -> Result<f64> {
    check_theta(theta, z)?;
    let stats = BlockStats::compute(g, z)?;
    let mut total = 0.0;
    for (a, b) in stats.upper() {
        let n = stats.pair_count(a, b);
        if n == 0 {
            continue;
        }
        let t = match theta.get(a, b) {
            Some(t) => t,
            None => return domain(format!("theta undefined on occupied block ({a}, {b})")),
        };
        total += block_loglik(n as f64, stats.edge_count(a, b) as f64, t);
    }
    Ok(total)
}

/// `L(A; z) = sup_theta L(A; z, theta)`, attained at `theta_hat`.
pub fn profile_log_likelihood(g: &Graph, z: &ClassAssignment) -> Result<f64> {
    Ok(BlockStats::compute(g, z)?.profile_log_likelihood())
}

/// Expected log-likelihood `Lbar_P(z, theta)`.
pub fn expected_log_likelihood(p: &ProbabilityMatrix, z: &ClassAssignment, theta: &BlockMatrix) -> Result<f64> {
    check_theta(theta, z)?;
    let (sums, counts) = block_probability_sums(p, z)?;
    let k = z.k();
    let mut total = 0.0;
    for a in 0..k {
        for b in a..k {
            let n = counts[a * k + b];
            if n == 0 {
                continue;
            }
            let t = match theta.get(a, b) {
                Some(t) => t,
                None => return domain(format!("theta undefined on occupied block ({a}, {b})")),
            };
            total += block_loglik(n as f64, sums[a * k + b], t);
        }
    }
    Ok(total)
}

/// `Lbar_P(z) = sup_theta Lbar_P(z, theta)`, attained at `theta_bar`.
pub fn expected_profile_log_likelihood(p: &ProbabilityMatrix, z: &ClassAssignment) -> Result<f64> {
    let (sums, counts) = block_probability_sums(p, z)?;
    let k = z.k();
    let mut total = 0.0;
    for a in 0..k {
        for b in a..k {
            let n = counts[a * k + b];
            if n > 0 {
                let nf = n as f64;
                total += nf * neg_entropy((sums[a * k + b] / nf).clamp(0.0, 1.0));
            }
        }
    }
    Ok(total)
}

/// The two parts of `L(A; z) - Lbar_P(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LikelihoodGap {
    /// `sum_{a<=b} n_ab D(theta_hat_ab || theta_bar_ab)`.
    pub kl_term: f64,
    /// `X - E(X)` with `X = sum_{i<j} A_ij ln(theta_bar / (1 - theta_bar))`.
    pub x_term: f64,
}

impl LikelihoodGap {
    pub fn total(&self) -> f64 {
        self.kl_term + self.x_term
    }
}

pub fn likelihood_gap_decomposition(
    g: &Graph,
    p: &ProbabilityMatrix,
    z: &ClassAssignment,
) -> Result<LikelihoodGap> {
    if g.n_nodes() != p.n_nodes() {
        return Err(SbmError::DimensionMismatch("graph and probability matrix sizes differ".into()));
    }
    let stats = BlockStats::compute(g, z)?;
    let tbar = theta_bar(p, z)?;
    let hat = theta_hat(&stats);
    let k = z.k();
    let mut log_odds = vec![0.0; k * k];
    let mut kl_term = 0.0;
    for (a, b) in stats.upper() {
        let n = stats.pair_count(a, b);
        if n == 0 {
            continue;
        }
        let tb = tbar.get(a, b).expect("occupied block has theta_bar");
        if !(tb > 0.0 && tb < 1.0) {
            return domain(format!("theta_bar of block ({a}, {b}) is {tb}; log-odds weight undefined"));
        }
        let w = (tb / (1.0 - tb)).ln();
        log_odds[a * k + b] = w;
        log_odds[b * k + a] = w;
        let th = hat.get(a, b).expect("occupied block has theta_hat");
        kl_term += n as f64 * bernoulli_kl_unchecked(th, tb);
    }
    let labels = z.labels();
    let x: f64 = g.edges().map(|(i, j)| log_odds[labels[i] * k + labels[j]]).sum();
    let ex: f64 = pairs(p.n_nodes())
        .zip(p.values())
        .map(|((i, j), &pij)| pij * log_odds[labels[i] * k + labels[j]])
        .sum();
    Ok(LikelihoodGap { kl_term, x_term: x - ex })
}
