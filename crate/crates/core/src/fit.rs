//! Search over class assignments by single-site Gibbs sampling of the profile
//! likelihood.
//!
//! Each chain keeps a private [`BlockStats`] and updates it in place. For a
//! node `i` currently in class `r`, the node is detached from `r`; every
//! candidate class `s` then only changes row `s` of the block structure, so
//! the profile log-likelihood of each candidate is available in `O(K)` after an
//! `O(deg(i))` pass over neighbors. The new class is drawn with probability
//! proportional to `exp(beta_t * gain_s)`.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result, SbmError};
use crate::netcore::{
    block_term, n_pairs, node_class_counts, BlockStats, ClassAssignment, Graph, PairMask, XlnxTable,
};
use crate::seed::{derive_seed, rng_from_seed, SbmRng};

/// Inverse temperature per sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum TemperatureSchedule {
    Constant { beta: f64 },
    /// Geometric interpolation from `start` (first sweep) to `end` (last sweep).
    Geometric { start: f64, end: f64 },
    PerSweep { betas: Vec<f64> },
}

impl TemperatureSchedule {
    pub fn at(&self, sweep: usize, n_sweeps: usize) -> f64 {
        match self {
            Self::Constant { beta } => *beta,
            Self::Geometric { start, end } => {
                if n_sweeps <= 1 {
                    *end
                } else {
                    let t = sweep as f64 / (n_sweeps - 1) as f64;
                    start * (end / start).powf(t)
                }
            }
            Self::PerSweep { betas } => betas[sweep.min(betas.len() - 1)],
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let ok = match self {
            Self::Constant { beta } => *beta > 0.0,
            Self::Geometric { start, end } => *start > 0.0 && *end > 0.0,
            Self::PerSweep { betas } => !betas.is_empty() && betas.iter().all(|&b| b > 0.0),
        };
        if ok {
            Ok(())
        } else {
            domain("inverse temperatures must be positive")
        }
    }
}

impl Default for TemperatureSchedule {
    fn default() -> Self {
        Self::Geometric { start: 1.0, end: 3.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum Init {
    #[default]
    UniformRandom,
    Provided(ClassAssignment),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub k: usize,
    pub n_sweeps: usize,
    pub schedule: TemperatureSchedule,
    pub restarts: usize,
    pub seed: u64,
    pub init: Init,
}

impl SamplerConfig {
    /// Defaults: `ceil(50 ln N)` sweeps, 5 restarts, inverse temperature
    /// annealed geometrically from 1 to 3.
    pub fn new(k: usize, n_nodes: usize) -> Self {
        Self {
            k,
            n_sweeps: default_sweeps(n_nodes),
            schedule: TemperatureSchedule::default(),
            restarts: 5,
            seed: 0,
            init: Init::UniformRandom,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_sweeps(mut self, n_sweeps: usize) -> Self {
        self.n_sweeps = n_sweeps;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_schedule(mut self, schedule: TemperatureSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }
}

pub fn default_sweeps(n_nodes: usize) -> usize {
    ((50.0 * (n_nodes.max(2) as f64).ln()).ceil() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub best_z: ClassAssignment,
    pub best_profile_loglik: f64,
    /// Best profile log-likelihood seen up to the end of each sweep, maximized
    /// over chains.
    pub trace: Vec<f64>,
    /// Sweeps run, summed over chains.
    pub sweeps_run: usize,
}

pub fn gibbs_fit(g: &Graph, cfg: &SamplerConfig) -> Result<FitResult> {
    gibbs_fit_observed(g, None, cfg)
}

/// As [`gibbs_fit`], with held-out pairs excluded from the likelihood.
pub fn gibbs_fit_observed(g: &Graph, mask: Option<&PairMask>, cfg: &SamplerConfig) -> Result<FitResult> {
    let n = g.n_nodes();
    if cfg.k == 0 {
        return domain("K must be at least 1");
    }
    if cfg.k > n {
        return domain(format!("K = {} exceeds N = {n}", cfg.k));
    }
    if cfg.n_sweeps == 0 || cfg.restarts == 0 {
        return domain("n_sweeps and restarts must be at least 1");
    }
    cfg.schedule.validate()?;
    if let Init::Provided(z) = &cfg.init {
        if z.k() != cfg.k || z.n_nodes() != n {
            return Err(SbmError::DimensionMismatch(
                "initial assignment does not match K or N".into(),
            ));
        }
    }
    if let Some(m) = mask {
        if m.n_nodes() != n {
            return Err(SbmError::DimensionMismatch("mask and graph sizes differ".into()));
        }
    }

    let table = XlnxTable::new(n_pairs(n) as u64);
    let chains: Vec<Result<ChainOutcome>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_chain(g, mask, cfg, &table, derive_seed(cfg.seed, &[r as u64])))
        .collect();

    let mut trace = vec![f64::NEG_INFINITY; cfg.n_sweeps];
    let mut best: Option<(f64, Vec<usize>)> = None;
    for chain in chains {
        let chain = chain?;
        for (t, v) in trace.iter_mut().zip(&chain.trace) {
            *t = t.max(*v);
        }
        // Strict comparison keeps the lowest restart index on ties.
        if best.as_ref().is_none_or(|(b, _)| chain.exact_best > *b) {
            best = Some((chain.exact_best, chain.best_labels));
        }
    }
    let (best_profile_loglik, labels) = best.expect("at least one restart");
    Ok(FitResult {
        best_z: ClassAssignment::new(labels, cfg.k)?,
        best_profile_loglik,
        trace,
        sweeps_run: cfg.n_sweeps * cfg.restarts,
    })
}

struct ChainOutcome {
    best_labels: Vec<usize>,
    exact_best: f64,
    trace: Vec<f64>,
}

fn initial_labels(n: usize, cfg: &SamplerConfig, rng: &mut SbmRng) -> Vec<usize> {
    match &cfg.init {
        Init::UniformRandom => (0..n).map(|_| rng.gen_range(0..cfg.k)).collect(),
        Init::Provided(z) => z.labels().to_vec(),
    }
}

fn run_chain(
    g: &Graph,
    mask: Option<&PairMask>,
    cfg: &SamplerConfig,
    table: &XlnxTable,
    seed: u64,
) -> Result<ChainOutcome> {
    let n = g.n_nodes();
    let k = cfg.k;
    let mut rng = rng_from_seed(seed);
    let mut labels = initial_labels(n, cfg, &mut rng);
    let mut stats = BlockStats::compute_observed(g, mask, &ClassAssignment::new(labels.clone(), k)?)?;

    let mut current = stats.profile_log_likelihood();
    let mut best = current;
    let mut best_labels = labels.clone();
    let mut trace = Vec::with_capacity(cfg.n_sweeps);

    let mut order: Vec<usize> = (0..n).collect();
    let mut nbr = vec![0u64; k];
    let mut avail = vec![0u64; k];
    let mut gains = vec![0.0f64; k];
    let term = |n: u64, e: u64| table.block_term(n, e);

    for sweep in 0..cfg.n_sweeps {
        let beta = cfg.schedule.at(sweep, cfg.n_sweeps);
        order.shuffle(&mut rng);
        if k > 1 {
            for &i in &order {
                let r = labels[i];
                node_class_counts(g, mask, &labels, stats.class_sizes(), i, &mut nbr, &mut avail);
                stats.detach(r, &nbr, &avail);
                let mut max_gain = f64::NEG_INFINITY;
                for (s, gain) in gains.iter_mut().enumerate() {
                    *gain = stats.attach_gain(s, &nbr, &avail, term);
                    max_gain = max_gain.max(*gain);
                }
                let s = sample_class(&gains, max_gain, beta, &mut rng);
                stats.attach(s, &nbr, &avail);
                labels[i] = s;
                current += gains[s] - gains[r];
                if current > best {
                    best = current;
                    best_labels.copy_from_slice(&labels);
                }
            }
        }
        // Resynchronize to stop drift in the running sum.
        current = stats.profile_log_likelihood();
        debug_assert!(
            {
                let fresh = BlockStats::compute_observed(g, mask, &ClassAssignment::new(labels.clone(), k)?)?;
                fresh == stats
            },
            "incremental block statistics diverged from recomputation"
        );
        if current > best {
            best = current;
            best_labels.copy_from_slice(&labels);
        }
        trace.push(best);
    }

    let exact_best = BlockStats::compute_observed(g, mask, &ClassAssignment::new(best_labels.clone(), k)?)?
        .profile_log_likelihood();
    Ok(ChainOutcome { best_labels, exact_best, trace })
}

/// Draws `s` with probability proportional to `exp(beta * (gains[s] - max))`.
fn sample_class(gains: &[f64], max_gain: f64, beta: f64, rng: &mut SbmRng) -> usize {
    let mut total = 0.0;
    for &g in gains {
        total += (beta * (g - max_gain)).exp();
    }
    let mut u = rng.gen::<f64>() * total;
    for (s, &g) in gains.iter().enumerate() {
        u -= (beta * (g - max_gain)).exp();
        if u < 0.0 {
            return s;
        }
    }
    // Rounding left `u` marginally positive: fall back to the first maximizer.
    gains.iter().position(|&g| g == max_gain).unwrap_or(0)
}

/// Profile log-likelihood change from moving `node` to `new_class`, computed
/// from the block statistics without mutating anything.
pub fn incremental_move_delta(
    stats: &BlockStats,
    g: &Graph,
    z: &ClassAssignment,
    node: usize,
    new_class: usize,
) -> Result<f64> {
    if node >= g.n_nodes() || z.n_nodes() != g.n_nodes() {
        return domain(format!("node {node} out of range for {} nodes", g.n_nodes()));
    }
    if new_class >= z.k() || stats.k() != z.k() {
        return domain(format!("class {new_class} out of range for K = {}", z.k()));
    }
    let r = z.label(node);
    if r == new_class {
        return Ok(0.0);
    }
    let k = z.k();
    let mut nbr = vec![0u64; k];
    let mut avail = vec![0u64; k];
    node_class_counts(g, None, z.labels(), stats.class_sizes(), node, &mut nbr, &mut avail);
    let mut scratch = stats.clone();
    scratch.detach(r, &nbr, &avail);
    Ok(scratch.attach_gain(new_class, &nbr, &avail, block_term) - scratch.attach_gain(r, &nbr, &avail, block_term))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::profile_log_likelihood;
    use approx::assert_relative_eq;

    fn ring_of_cliques() -> Graph {
        // Two 4-cliques joined by one edge.
        let mut e = vec![];
        for base in [0, 4] {
            for i in 0..4 {
                for j in i + 1..4 {
                    e.push((base + i, base + j));
                }
            }
        }
        e.push((3, 4));
        Graph::from_edges(8, e).unwrap()
    }

    #[test]
    fn delta_matches_recomputation() {
        let g = ring_of_cliques();
        let z = ClassAssignment::new(vec![0, 1, 0, 2, 1, 1, 0, 2], 3).unwrap();
        let stats = BlockStats::compute(&g, &z).unwrap();
        let base = profile_log_likelihood(&g, &z).unwrap();
        for node in 0..8 {
            for c in 0..3 {
                let mut labels = z.labels().to_vec();
                labels[node] = c;
                let moved = ClassAssignment::new(labels, 3).unwrap();
                let naive = profile_log_likelihood(&g, &moved).unwrap() - base;
                let inc = incremental_move_delta(&stats, &g, &z, node, c).unwrap();
                assert_relative_eq!(inc, naive, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn delta_same_class_is_zero_and_errors() {
        let g = ring_of_cliques();
        let z = ClassAssignment::new(vec![0; 8], 2).unwrap();
        let stats = BlockStats::compute(&g, &z).unwrap();
        assert_eq!(incremental_move_delta(&stats, &g, &z, 3, 0).unwrap(), 0.0);
        assert!(incremental_move_delta(&stats, &g, &z, 8, 0).is_err());
        assert!(incremental_move_delta(&stats, &g, &z, 0, 2).is_err());
    }

    #[test]
    fn moving_sole_member_out() {
        let g = ring_of_cliques();
        let z = ClassAssignment::new(vec![0, 0, 0, 0, 1, 1, 1, 2], 3).unwrap();
        let stats = BlockStats::compute(&g, &z).unwrap();
        let base = profile_log_likelihood(&g, &z).unwrap();
        let moved = ClassAssignment::new(vec![0, 0, 0, 0, 1, 1, 1, 1], 3).unwrap();
        let naive = profile_log_likelihood(&g, &moved).unwrap() - base;
        assert_relative_eq!(incremental_move_delta(&stats, &g, &z, 7, 1).unwrap(), naive, epsilon = 1e-9);
    }

    #[test]
    fn single_class_fit() {
        let g = ring_of_cliques();
        let res = gibbs_fit(&g, &SamplerConfig::new(1, 8).with_sweeps(3)).unwrap();
        assert_eq!(res.best_z.labels(), &[0; 8]);
        let expected = crate::netcore::block_term(28, 13);
        assert_relative_eq!(res.best_profile_loglik, expected, epsilon = 1e-12);
    }

    #[test]
    fn recovers_two_cliques_and_is_deterministic() {
        let g = ring_of_cliques();
        let cfg = SamplerConfig::new(2, 8).with_seed(11).with_sweeps(30);
        let a = gibbs_fit(&g, &cfg).unwrap();
        let b = gibbs_fit(&g, &cfg).unwrap();
        assert_eq!(a, b);
        let l = a.best_z.labels();
        assert!(l[..4].iter().all(|&x| x == l[0]) && l[4..].iter().all(|&x| x == l[4]) && l[0] != l[4]);
        assert!(a.trace.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(a.sweeps_run, 30 * 5);
    }

    #[test]
    fn rejects_bad_configs() {
        let g = Graph::empty(3);
        assert!(gibbs_fit(&g, &SamplerConfig::new(4, 3)).is_err());
        assert!(gibbs_fit(&g, &SamplerConfig::new(2, 3).with_sweeps(0)).is_err());
        assert!(gibbs_fit(&g, &SamplerConfig::new(2, 3).with_schedule(TemperatureSchedule::Constant { beta: 0.0 })).is_err());
    }

    #[test]
    fn geometric_schedule_endpoints() {
        let s = TemperatureSchedule::Geometric { start: 1.0, end: 3.0 };
        assert_relative_eq!(s.at(0, 10), 1.0);
        assert_relative_eq!(s.at(9, 10), 3.0);
        assert!(s.at(5, 10) > s.at(4, 10));
    }
}
