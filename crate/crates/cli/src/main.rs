use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sbm_core::harness::{
    run_experiment, write_rows_file, ExperimentConfig, ExperimentKind, ExperimentOutput, FitRealParams, FitReport,
    RunManifest,
};

/// Stochastic blockmodel fitting and simulation experiments.
#[derive(Parser)]
#[command(name = "sbm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for results.csv, summary.json and manifest.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    threads: Option<usize>,
    /// Trials per configuration point (overrides the config).
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Observed estimation error against the confidence bounds on ER graphs.
    BoundTightness(Common),
    /// Normalized likelihood error along growth schedules.
    LikelihoodError(Common),
    /// Misclassification rate on calibrated planted models.
    Misclassification(Common),
    /// BIC and cross-validation over K for the logit blockmodel.
    ModelOrder {
        #[command(flatten)]
        common: Common,
        /// Edge list (synthetic data when absent).
        #[arg(long)]
        edges: Option<PathBuf>,
        /// Covariate CSV with header `node,...`.
        #[arg(long)]
        covariates: Option<PathBuf>,
        /// Comma-separated K values.
        #[arg(long, value_delimiter = ',')]
        ks: Option<Vec<usize>>,
    },
    /// Single blockmodel fit: prints theta_hat, bounds and, with a truth file,
    /// the misclassification count.
    Fit {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        edges: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        covariates: Option<PathBuf>,
        /// True labels, CSV `node,class`.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        delta: Option<f64>,
    },
}

fn load_config(kind: ExperimentKind, common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let cfg: ExperimentConfig =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            if cfg.kind != kind {
                bail!("config kind is {}, subcommand is {}", cfg.kind.as_str(), kind.as_str());
            }
            cfg
        }
        None => ExperimentConfig::defaults(kind),
    };
    if let Some(seed) = common.seed {
        cfg.base_seed = seed;
    }
    if let Some(trials) = common.trials {
        cfg.trials = trials;
    }
    if let Some(out) = &common.out {
        cfg.output = Some(out.clone());
    }
    Ok(cfg)
}

fn write_outputs(cfg: &ExperimentConfig, out: &ExperimentOutput, threads: usize) -> Result<()> {
    let Some(dir) = &cfg.output else { return Ok(()) };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let results = dir.join("results.csv");
    write_rows_file(&out.rows, &results)?;
    std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(out)?)?;
    RunManifest::new(cfg, &out.rows, Some("results.csv".into()), threads).write(dir.join("manifest.json"))?;
    eprintln!("wrote {} rows to {}", out.rows.len(), results.display());
    Ok(())
}

fn print_summary(out: &ExperimentOutput) {
    for s in &out.bound_summaries {
        println!(
            "K={:<3} delta={} trials={} kl_violations={} rms_violations={} mean_kl_ratio={:.3} mean_rms_ratio={:.3}",
            s.k, s.delta, s.trials, s.kl_violations, s.rms_violations, s.mean_kl_ratio, s.mean_rms_ratio
        );
    }
    for t in &out.trends {
        let slope = t.slope.map_or("n/a".to_owned(), |s| format!("{s:.3e}"));
        println!("{}: slope={slope} ({:?})", t.label, t.direction);
        for (n, m) in &t.medians {
            println!("  N={n:<6} median={m:.6}");
        }
    }
    if !out.model_order.is_empty() {
        println!("{:>3} {:>14} {:>14} {:>10} {:>12}", "K", "loglik", "BIC", "CV NLL", "KL bound/C");
        for r in &out.rows {
            println!(
                "{:>3} {:>14.3} {:>14.3} {:>10.5} {:>12.6}",
                r.k,
                r.loglik.unwrap_or(f64::NAN),
                r.bic.unwrap_or(f64::NAN),
                r.cv_nll.unwrap_or(f64::NAN),
                r.norm_kl_bound.unwrap_or(f64::NAN)
            );
        }
        for s in &out.model_order {
            println!("trial {}: BIC argmin K={} CV argmin K={:?}", s.trial, s.bic_argmin, s.cv_argmin);
        }
    }
    if let Some(fit) = &out.fit {
        print_fit(fit);
    }
}

fn print_fit(f: &FitReport) {
    println!("N={} edges={} K={} profile loglik={:.6}", f.n_nodes, f.n_edges, f.k, f.profile_loglik);
    println!("class sizes: {:?}", f.class_sizes);
    println!("theta_hat:");
    for row in &f.theta_hat {
        let cells: Vec<String> = row.iter().map(|v| if v.is_nan() { "   -   ".into() } else { format!("{v:.5}") }).collect();
        println!("  {}", cells.join(" "));
    }
    let b = &f.bounds;
    println!(
        "bounds (delta={}): KL {:.4} (per pair {:.6}), RMS {:.4} (normalized {:.6})",
        b.delta, b.epsilon_kl, b.epsilon_kl_normalized, b.epsilon_rms, b.epsilon_rms_normalized
    );
    if let Some(ne) = f.misclassified {
        println!("misclassified: {ne} of {} ({:.4})", f.n_nodes, ne as f64 / f.n_nodes as f64);
    }
    if let Some(l) = &f.logit {
        println!("logit blockmodel: loglik={:.4} BIC={:.4} covariates={:?}", l.loglik, l.bic, l.covariates);
        println!("  beta: {:?}", l.beta);
    }
}

fn run(kind: ExperimentKind, cfg: ExperimentConfig, threads: Option<usize>) -> Result<()> {
    let cfg = {
        let mut c = cfg;
        c.fill_defaults();
        c.validate()?;
        c
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.unwrap_or(0)).build()?;
    let n_threads = pool.current_num_threads();
    let out = pool.install(|| run_experiment(&cfg)).with_context(|| format!("running {}", kind.as_str()))?;
    print_summary(&out);
    write_outputs(&cfg, &out, n_threads)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::BoundTightness(c) => run(ExperimentKind::BoundTightness, load_config(ExperimentKind::BoundTightness, &c)?, c.threads),
        Command::LikelihoodError(c) => {
            run(ExperimentKind::LikelihoodError, load_config(ExperimentKind::LikelihoodError, &c)?, c.threads)
        }
        Command::Misclassification(c) => {
            run(ExperimentKind::Misclassification, load_config(ExperimentKind::Misclassification, &c)?, c.threads)
        }
        Command::ModelOrder { common, edges, covariates, ks } => {
            let kind = ExperimentKind::ModelOrder;
            let mut cfg = load_config(kind, &common)?;
            let mo = cfg.model_order.get_or_insert_with(Default::default);
            if edges.is_some() {
                mo.edges = edges;
                mo.synthetic = None;
            }
            if covariates.is_some() {
                mo.covariates = covariates;
            }
            if let Some(ks) = ks {
                mo.ks = ks;
            }
            run(kind, cfg, common.threads)
        }
        Command::Fit { common, edges, k, covariates, truth, delta } => {
            let kind = ExperimentKind::FitReal;
            let mut cfg = if common.config.is_some() {
                load_config(kind, &common)?
            } else {
                let edges = edges.clone().context("--edges is required without --config")?;
                let k = k.context("--k is required without --config")?;
                let mut cfg = load_config(kind, &common)?;
                cfg.fit_real = Some(FitRealParams { edges, k, covariates: None, truth: None, delta: 0.05, degree_bins: None });
                cfg
            };
            let f = cfg.fit_real.as_mut().context("missing fit_real section")?;
            if let Some(e) = edges {
                f.edges = e;
            }
            if let Some(k) = k {
                f.k = k;
            }
            if covariates.is_some() {
                f.covariates = covariates;
            }
            if truth.is_some() {
                f.truth = truth;
            }
            if let Some(d) = delta {
                f.delta = d;
            }
            run(kind, cfg, common.threads)
        }
    }
}

