//! Seeded generators for the simulation designs: Erdős–Rényi graphs, planted
//! blockmodels with `theta = alpha I + beta 11^T`, logit blockmodels with
//! covariates, and the growth schedules `M(N)`, `K(N)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result, SbmError};
use crate::logit::PairDesign;
use crate::netcore::{bernoulli_kl, n_pairs, pairs, BlockMatrix, ClassAssignment, Graph, ProbabilityMatrix};
use crate::seed::rng_from_seed;

/// Samples one graph from independent Bernoulli(`P_ij`) trials.
pub fn sample_graph(p: &ProbabilityMatrix, seed: u64) -> Graph {
    let mut rng = rng_from_seed(seed);
    let n = p.n_nodes();
    let edges: Vec<_> = pairs(n)
        .zip(p.values())
        .filter(|&(_, &pij)| rng.gen::<f64>() < pij)
        .map(|(ij, _)| ij)
        .collect();
    Graph::from_sorted_pairs(n, &edges)
}

pub fn gen_er(n: usize, p: f64, seed: u64) -> Result<(Graph, ProbabilityMatrix)> {
    let probs = ProbabilityMatrix::constant(n, p)?;
    Ok((sample_graph(&probs, seed), probs))
}

/// `N mod K` classes of size `ceil(N/K)`, the rest `floor(N/K)`; node `i` goes
/// to class `i mod K`.
pub fn balanced_assignment(n: usize, k: usize) -> Result<ClassAssignment> {
    ClassAssignment::new((0..n).map(|i| i % k.max(1)).collect(), k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedModel {
    pub n_nodes: usize,
    pub k: usize,
    pub z_bar: ClassAssignment,
    pub theta_bar: BlockMatrix,
    pub alpha: f64,
    pub beta: f64,
}

impl PlantedModel {
    /// Balanced classes, `alpha + beta` within classes and `beta` between.
    pub fn new(n: usize, k: usize, alpha: f64, beta: f64) -> Result<Self> {
        if k == 0 || k > n {
            return domain(format!("need 1 <= K <= N, got K = {k}, N = {n}"));
        }
        if !(alpha >= 0.0 && beta > 0.0 && alpha + beta < 1.0) {
            return domain(format!("need alpha >= 0, beta > 0, alpha + beta < 1; got ({alpha}, {beta})"));
        }
        Ok(Self {
            n_nodes: n,
            k,
            z_bar: balanced_assignment(n, k)?,
            theta_bar: BlockMatrix::planted(k, alpha + beta, beta),
            alpha,
            beta,
        })
    }

    pub fn probabilities(&self) -> Result<ProbabilityMatrix> {
        ProbabilityMatrix::from_blockmodel(&self.z_bar, &self.theta_bar)
    }

    /// `sum_{a<=b} n_ab theta_ab`.
    pub fn expected_edges(&self) -> f64 {
        let within = within_class_pairs(&self.z_bar) as f64;
        n_pairs(self.n_nodes) as f64 * self.beta + within * self.alpha
    }

    /// `D(theta_aa || (theta_aa + theta_ab) / 2)`.
    pub fn divergence(&self) -> f64 {
        planted_divergence(self.alpha, self.beta)
    }
}

fn within_class_pairs(z: &ClassAssignment) -> u64 {
    z.class_sizes().iter().map(|&s| (s as u64) * (s as u64).saturating_sub(1) / 2).sum()
}

fn planted_divergence(alpha: f64, beta: f64) -> f64 {
    bernoulli_kl(alpha + beta, (alpha + 2.0 * beta) / 2.0).unwrap_or(f64::INFINITY)
}

pub fn gen_blockmodel(model: &PlantedModel, seed: u64) -> Result<(Graph, ProbabilityMatrix)> {
    let p = model.probabilities()?;
    Ok((sample_graph(&p, seed), p))
}

/// Log-odds `theta_tilde[z_i, z_j] + x(i, j)^T beta` turned into probabilities.
pub fn logit_probabilities(
    z: &ClassAssignment,
    theta_tilde: &BlockMatrix,
    design: &PairDesign,
    beta: &[f64],
) -> Result<ProbabilityMatrix> {
    if design.n_nodes() != z.n_nodes() || beta.len() != design.dim_beta() || theta_tilde.k() != z.k() {
        return Err(SbmError::DimensionMismatch("logit model components disagree in size".into()));
    }
    let offsets = design.offsets(beta);
    let labels = z.labels();
    ProbabilityMatrix::new(
        z.n_nodes(),
        pairs(z.n_nodes())
            .zip(offsets)
            .map(|((i, j), o)| {
                let eta = theta_tilde.get_or(labels[i], labels[j], 0.0) + o;
                1.0 / (1.0 + (-eta).exp())
            })
            .collect(),
    )
}

pub fn gen_logit_blockmodel(
    z: &ClassAssignment,
    theta_tilde: &BlockMatrix,
    design: &PairDesign,
    beta: &[f64],
    seed: u64,
) -> Result<(Graph, ProbabilityMatrix)> {
    let p = logit_probabilities(z, theta_tilde, design, beta)?;
    Ok((sample_graph(&p, seed), p))
}

/// Solves for `(alpha, beta)` such that, with balanced classes,
///
/// 1. `sum_{a<=b} n_ab theta_ab = target_m`, and
/// 2. `D(alpha + beta || (alpha + 2 beta) / 2) = target_m K^gamma / (20 N^2)`.
///
/// Equation 1 is linear, giving `beta(alpha) = (target_m - alpha W) / C(N,2)`
/// with `W` the number of within-class pairs; equation 2 is then solved in
/// `alpha` by bracketing and bisection. Both equations are re-checked on the
/// result.
pub fn calibrate_planted(n: usize, k: usize, target_m: f64, gamma: f64) -> Result<PlantedModel> {
    let target_div = target_m * (k as f64).powf(gamma) / (20.0 * (n as f64).powi(2));
    calibrate_to_divergence(n, k, target_m, target_div)
}

pub fn calibrate_to_divergence(n: usize, k: usize, target_m: f64, target_div: f64) -> Result<PlantedModel> {
    if k == 0 || k > n || n < 2 {
        return Err(SbmError::Calibration(format!("need 1 <= K <= N and N >= 2, got K = {k}, N = {n}")));
    }
    let c = n_pairs(n) as f64;
    if !(target_m > 0.0 && target_m < c) {
        return Err(SbmError::Calibration(format!(
            "expected edge count {target_m} must lie in (0, C(N,2) = {c})"
        )));
    }
    if !(target_div >= 0.0) {
        return Err(SbmError::Calibration(format!("divergence target {target_div} must be non-negative")));
    }
    let w = within_class_pairs(&balanced_assignment(n, k)?) as f64;
    let beta_of = |alpha: f64| (target_m - alpha * w) / c;
    // alpha must keep beta > 0 and alpha + beta < 1.
    let mut alpha_max = (1.0 - target_m / c) / (1.0 - w / c);
    if w > 0.0 {
        alpha_max = alpha_max.min(target_m / w);
    }
    let f = |alpha: f64| planted_divergence(alpha, beta_of(alpha)) - target_div;

    let alpha = if target_div == 0.0 {
        0.0
    } else {
        // Locate the first sign change on a grid, then bisect inside it.
        const GRID: usize = 2000;
        let hi_limit = alpha_max * (1.0 - 1e-12);
        let mut lo = 0.0;
        let mut hi = None;
        for step in 1..=GRID {
            let a = hi_limit * step as f64 / GRID as f64;
            if f(a) >= 0.0 {
                hi = Some(a);
                break;
            }
            lo = a;
        }
        let mut hi = hi.ok_or_else(|| {
            SbmError::Calibration(format!(
                "divergence target {target_div} exceeds the largest attainable value {} \
                 (constraint beta > 0 or alpha + beta < 1 binds)",
                planted_divergence(hi_limit, beta_of(hi_limit))
            ))
        })?;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if f(lo).abs() < f(hi).abs() {
            lo
        } else {
            hi
        }
    };
    let beta = beta_of(alpha);
    let model = PlantedModel::new(n, k, alpha, beta)
        .map_err(|e| SbmError::Calibration(format!("solution violates model constraints: {e}")))?;
    let m_residual = (model.expected_edges() - target_m).abs();
    let d_residual = (model.divergence() - target_div).abs();
    if m_residual > 1e-9 * target_m.max(1.0) || d_residual > 1e-9 {
        return Err(SbmError::Calibration(format!(
            "forward check failed: edge residual {m_residual}, divergence residual {d_residual}"
        )));
    }
    Ok(model)
}

fn default_log_base() -> f64 {
    std::f64::consts::E
}

/// Growth schedule `M = N (log N)^c`, `K = ceil(N^a)`, with an optional
/// identifiability exponent `gamma` for the divergence target
/// `M K^gamma / (20 N^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub n_values: Vec<usize>,
    pub m_exponent: f64,
    pub k_exponent: f64,
    #[serde(default)]
    pub gamma: Option<f64>,
    /// Base of the logarithm in `M(N)`; natural by default.
    #[serde(default = "default_log_base")]
    pub log_base: f64,
}

impl Schedule {
    pub fn new(n_values: Vec<usize>, m_exponent: f64, k_exponent: f64) -> Self {
        Self { n_values, m_exponent, k_exponent, gamma: None, log_base: default_log_base() }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn with_log_base(mut self, base: f64) -> Self {
        self.log_base = base;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchedulePoint {
    pub n: usize,
    pub m: f64,
    pub k: usize,
    pub divergence_target: Option<f64>,
}

pub fn expand_schedule(s: &Schedule) -> Result<Vec<SchedulePoint>> {
    if !(s.log_base > 1.0) {
        return Err(SbmError::Schedule(format!("log base {} must exceed 1", s.log_base)));
    }
    s.n_values
        .iter()
        .map(|&n| {
            if n < 2 {
                return Err(SbmError::Schedule(format!("N = {n} too small")));
            }
            let nf = n as f64;
            let m = nf * (nf.ln() / s.log_base.ln()).powf(s.m_exponent);
            let pairs = n_pairs(n) as f64;
            if m >= pairs {
                return Err(SbmError::Schedule(format!(
                    "N = {n}: M = {m:.1} is not below C(N,2) = {pairs}"
                )));
            }
            // Guard against powf landing a hair above an integer.
            let k = ((nf.powf(s.k_exponent) - 1e-9).ceil() as usize).max(1);
            if k > n {
                return Err(SbmError::Schedule(format!("N = {n}: K = {k} exceeds N")));
            }
            let divergence_target = s.gamma.map(|g| m * (k as f64).powf(g) / (20.0 * nf * nf));
            Ok(SchedulePoint { n, m, k, divergence_target })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn er_extremes() {
        assert_eq!(gen_er(20, 0.0, 1).unwrap().0.edge_count(), 0);
        assert_eq!(gen_er(20, 1.0, 1).unwrap().0.edge_count(), 190);
        assert_eq!(gen_er(30, 0.3, 5).unwrap().0, gen_er(30, 0.3, 5).unwrap().0);
    }

    #[test]
    fn blockmodel_reductions() {
        let m = PlantedModel::new(40, 4, 0.0, 0.2).unwrap();
        let p = m.probabilities().unwrap();
        assert!(p.values().iter().all(|&v| v == 0.2));
        let singletons = PlantedModel::new(10, 10, 0.5, 0.1).unwrap();
        assert!(singletons.probabilities().unwrap().values().iter().all(|&v| v == 0.1));
        assert!(PlantedModel::new(10, 2, 0.9, 0.2).is_err());
    }

    #[test]
    fn balanced_sizes() {
        let z = balanced_assignment(11, 3).unwrap();
        assert_eq!(z.class_sizes(), vec![4, 4, 3]);
    }

    #[test]
    fn schedule_examples() {
        let pts = expand_schedule(&Schedule::new(vec![100], 2.0, 0.5)).unwrap();
        assert_relative_eq!(pts[0].m, 100.0 * 100f64.ln().powi(2), epsilon = 1e-9);
        assert_eq!(pts[0].m.round(), 2121.0);
        assert_eq!(pts[0].k, 10);
        assert_eq!(pts[0].divergence_target, None);
        let err = expand_schedule(&Schedule::new(vec![50], 4.0, 0.5)).unwrap_err();
        assert!(matches!(err, SbmError::Schedule(_)));
    }

    #[test]
    fn zero_divergence_target() {
        let m = calibrate_to_divergence(100, 5, 600.0, 0.0).unwrap();
        assert_eq!(m.alpha, 0.0);
        assert_relative_eq!(m.beta, 600.0 / 4950.0, epsilon = 1e-15);
    }

    #[test]
    fn calibration_residuals() {
        let n = 400;
        let mm = n as f64 * (n as f64).ln().powi(2);
        let m = calibrate_planted(n, 20, mm, 1.0).unwrap();
        let target = mm * 20.0 / (20.0 * (n * n) as f64);
        assert!((m.divergence() - target).abs() < 1e-9);
        assert!((m.expected_edges() - mm).abs() < 1e-9 * mm);
        assert_relative_eq!(m.probabilities().unwrap().expected_edges(), mm, max_relative = 1e-9);
    }

    #[test]
    fn calibration_infeasible() {
        let err = calibrate_to_divergence(50, 5, 100.0, 5.0).unwrap_err();
        assert!(matches!(err, SbmError::Calibration(_)), "{err}");
        assert!(calibrate_planted(50, 5, 2000.0, 1.0).is_err());
    }

    #[test]
    fn larger_gamma_larger_alpha() {
        let n = 300;
        let mm = n as f64 * (n as f64).ln().powi(2);
        let alphas: Vec<f64> = [0.8, 0.9, 1.0]
            .iter()
            .map(|&g| calibrate_planted(n, 18, mm, g).unwrap().alpha)
            .collect();
        assert!(alphas[0] < alphas[1] && alphas[1] < alphas[2], "{alphas:?}");
    }
}
