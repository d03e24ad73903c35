#![allow(dead_code)]

use rand::Rng;
use sbm_core::fit::incremental_move_delta;
use sbm_core::logit::{
    build_pair_design, fit_parameters, logit_gradient, logit_log_likelihood, Covariate, CovariateTable, LogitModel,
    OptimizeOptions, PairDesign,
};
use sbm_core::netcore::{
    bernoulli_kl, block_stats, expected_profile_log_likelihood, likelihood_gap_decomposition, n_pairs,
    partition_expected_log_likelihood, profile_log_likelihood, refine_partition, theta_bar, theta_hat, BlockMatrix,
    ClassAssignment, Graph, Partition, ProbabilityMatrix,
};
use sbm_core::seed::{rng_from_seed, SbmRng};
use sbm_core::synth::sample_graph;

pub fn rng(seed: u64) -> SbmRng {
    rng_from_seed(seed)
}

pub fn random_assignment(rng: &mut SbmRng, n: usize, k: usize) -> ClassAssignment {
    ClassAssignment::new((0..n).map(|_| rng.gen_range(0..k)).collect(), k).unwrap()
}

/// Heterogeneous `P` with entries strictly inside `(0, 1)`.
pub fn random_probabilities(rng: &mut SbmRng, n: usize) -> ProbabilityMatrix {
    let values = (0..n_pairs(n)).map(|_| rng.gen_range(0.02..0.98)).collect();
    ProbabilityMatrix::new(n, values).unwrap()
}

pub fn random_graph(rng: &mut SbmRng, n: usize, density: f64) -> Graph {
    let p = ProbabilityMatrix::constant(n, density).unwrap();
    sample_graph(&p, rng.gen())
}

/// `(graph, P, z)` with `N <= 12`, `K <= 3`.
pub fn small_instance(seed: u64) -> (Graph, ProbabilityMatrix, ClassAssignment) {
    let mut r = rng(seed);
    let n = r.gen_range(2..=12);
    let k = r.gen_range(1..=3);
    let p = random_probabilities(&mut r, n);
    let g = sample_graph(&p, r.gen());
    let z = random_assignment(&mut r, n, k);
    (g, p, z)
}

/// Relative residual of `L - Lbar = KL term + X term`.
pub fn gap_residual(g: &Graph, p: &ProbabilityMatrix, z: &ClassAssignment) -> f64 {
    let l = profile_log_likelihood(g, z).unwrap();
    let lbar = expected_profile_log_likelihood(p, z).unwrap();
    let gap = likelihood_gap_decomposition(g, p, z).unwrap();
    ((l - lbar) - gap.total()).abs() / l.abs().max(lbar.abs()).max(1.0)
}

/// Returns `(coarse, fine)` expected partition log-likelihoods for a random
/// partition of the pairs and a random refinement of it.
pub fn refinement_pair(seed: u64) -> (f64, f64) {
    let mut r = rng(seed);
    let n = r.gen_range(2..=12);
    let p = random_probabilities(&mut r, n);
    let n_cells = r.gen_range(1..=6);
    let split = r.gen_range(1..=4);
    let coarse_cells: Vec<usize> = (0..n_pairs(n)).map(|_| r.gen_range(0..n_cells)).collect();
    let fine_cells: Vec<usize> = coarse_cells.iter().map(|&c| c * split + r.gen_range(0..split)).collect();
    let coarse = Partition::new(n, coarse_cells, n_cells).unwrap();
    let fine = refine_partition(&coarse, fine_cells).unwrap();
    assert!(fine.refines(&coarse));
    (
        partition_expected_log_likelihood(&p, &coarse).unwrap(),
        partition_expected_log_likelihood(&p, &fine).unwrap(),
    )
}

/// Largest blockwise violation of `D(theta_hat || theta_bar) >= 2 (theta_hat - theta_bar)^2`
/// (non-positive when the inequality holds everywhere).
pub fn pinsker_violation(g: &Graph, p: &ProbabilityMatrix, z: &ClassAssignment) -> f64 {
    let hat = theta_hat(&block_stats(g, z).unwrap());
    let bar = theta_bar(p, z).unwrap();
    let mut worst = f64::NEG_INFINITY;
    for a in 0..z.k() {
        for b in a..z.k() {
            if let (Some(h), Some(t)) = (hat.get(a, b), bar.get(a, b)) {
                let d = bernoulli_kl(h, t).unwrap();
                worst = worst.max(2.0 * (h - t).powi(2) - d - 1e-12);
            }
        }
    }
    worst
}

/// Best profile log-likelihood over all `2^N` two-class assignments.
pub fn exhaustive_k2_optimum(g: &Graph) -> f64 {
    let n = g.n_nodes();
    (0..1u32 << n)
        .map(|mask| {
            let labels = (0..n).map(|i| ((mask >> i) & 1) as usize).collect();
            profile_log_likelihood(g, &ClassAssignment::new(labels, 2).unwrap()).unwrap()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Largest absolute gap between incremental move deltas and recomputation,
/// over every (node, class) move of a random instance.
pub fn incremental_delta_error(seed: u64) -> (f64, usize) {
    let mut r = rng(seed);
    let n = r.gen_range(2..=14);
    let k = r.gen_range(1..=4);
    let density = r.gen_range(0.05..0.95);
    let g = random_graph(&mut r, n, density);
    let z = random_assignment(&mut r, n, k);
    let stats = block_stats(&g, &z).unwrap();
    let base = profile_log_likelihood(&g, &z).unwrap();
    let mut worst: f64 = 0.0;
    let mut moves = 0;
    for node in 0..n {
        for c in 0..k {
            let fast = incremental_move_delta(&stats, &g, &z, node, c).unwrap();
            let mut labels = z.labels().to_vec();
            labels[node] = c;
            let slow = profile_log_likelihood(&g, &ClassAssignment::new(labels, k).unwrap()).unwrap() - base;
            worst = worst.max((fast - slow).abs());
            moves += 1;
        }
    }
    (worst, moves)
}

/// Random logit instance: graph, classes and a design with one or two
/// categorical covariates.
pub fn logit_instance(seed: u64) -> (Graph, ClassAssignment, PairDesign) {
    let mut r = rng(seed);
    let n = r.gen_range(10..=24);
    let k = r.gen_range(1..=3);
    let z = random_assignment(&mut r, n, k);
    let n_cov = r.gen_range(0..=2);
    let covs = (0..n_cov)
        .map(|c| {
            let levels = r.gen_range(2..=3);
            Covariate::from_indices(format!("x{c}"), (0..n).map(|_| r.gen_range(0..levels)).collect(), levels).unwrap()
        })
        .collect();
    let design = build_pair_design(&CovariateTable::new(n, covs).unwrap());
    let density = r.gen_range(0.2..0.6);
    let g = random_graph(&mut r, n, density);
    (g, z, design)
}

pub fn random_model(r: &mut SbmRng, z: &ClassAssignment, design: &PairDesign) -> LogitModel {
    let k = z.k();
    let vals: Vec<f64> = (0..k * k).map(|_| r.gen_range(-2.0..2.0)).collect();
    let theta = BlockMatrix::from_fn(k, |a, b| Some(vals[a.min(b) * k + a.max(b)]));
    let beta = (0..design.dim_beta()).map(|_| r.gen_range(-1.0..1.0)).collect();
    LogitModel::new(theta, beta, z.clone()).unwrap()
}

/// Largest relative disagreement between the analytic gradient and central
/// differences, measured against `max(|analytic|, 1)`.
pub fn gradient_fd_error(seed: u64) -> f64 {
    let (g, z, design) = logit_instance(seed);
    let mut r = rng(seed ^ 0x9e37);
    let m = random_model(&mut r, &z, &design);
    let grad = logit_gradient(&g, &m, &design).unwrap();
    let h = 1e-5;
    let ll = |model: &LogitModel| logit_log_likelihood(&g, model, &design).unwrap();
    let k = m.k;
    let mut worst: f64 = 0.0;
    for a in 0..k {
        for b in a..k {
            let shifted = |d: f64| {
                let theta = BlockMatrix::from_fn(k, |x, y| {
                    let v = m.theta_tilde.get(x, y).unwrap();
                    Some(if (x.min(y), x.max(y)) == (a, b) { v + d } else { v })
                });
                LogitModel::new(theta, m.beta.clone(), z.clone()).unwrap()
            };
            let fd = (ll(&shifted(h)) - ll(&shifted(-h))) / (2.0 * h);
            let an = grad.theta_tilde.get(a, b).unwrap();
            worst = worst.max((fd - an).abs() / an.abs().max(1.0));
        }
    }
    for c in 0..m.beta.len() {
        let shifted = |d: f64| {
            let mut beta = m.beta.clone();
            beta[c] += d;
            LogitModel::new(m.theta_tilde.clone(), beta, z.clone()).unwrap()
        };
        let fd = (ll(&shifted(h)) - ll(&shifted(-h))) / (2.0 * h);
        let an = grad.beta[c];
        worst = worst.max((fd - an).abs() / an.abs().max(1.0));
    }
    worst
}

/// Gradient max-norm at the optimizer's output, recomputed independently.
pub fn optimized_gradient_norm(seed: u64) -> f64 {
    let (g, z, design) = logit_instance(seed);
    let out = fit_parameters(&g, None, &z, &design, None, &OptimizeOptions::default()).unwrap();
    let m = LogitModel::new(out.theta_tilde, out.beta, z).unwrap();
    logit_gradient(&g, &m, &design).unwrap().max_norm()
}

/// Largest `|sigmoid(theta_tilde_ab) - theta_hat_ab|` over occupied blocks of a
/// covariate-free fit.
pub fn no_covariate_gap(seed: u64) -> f64 {
    let mut r = rng(seed);
    let n = r.gen_range(4..=30);
    let k = r.gen_range(1..=4);
    let z = random_assignment(&mut r, n, k);
    let density = r.gen_range(0.1..0.9);
    let g = random_graph(&mut r, n, density);
    let design = PairDesign::none(n);
    let out = fit_parameters(&g, None, &z, &design, None, &OptimizeOptions::default()).unwrap();
    let hat = theta_hat(&block_stats(&g, &z).unwrap());
    let mut worst: f64 = 0.0;
    for a in 0..k {
        for b in a..k {
            if let Some(h) = hat.get(a, b) {
                if h > 0.0 && h < 1.0 {
                    let t = out.theta_tilde.get(a, b).unwrap();
                    worst = worst.max((1.0 / (1.0 + (-t).exp()) - h).abs());
                }
            }
        }
    }
    worst
}
