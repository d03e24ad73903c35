use sbm_core::harness::{
    bound_tightness_trial, likelihood_error_trial, misclassification_trial, parse_covariates, parse_edge_list,
    parse_labels, read_rows_file, run_bound_tightness, run_likelihood_error, run_misclassification, run_model_order,
    write_rows_file, BoundTightnessParams, ExperimentConfig, ExperimentKind, LikelihoodErrorParams,
    MisclassificationParams, ModelOrderParams, SyntheticLogitParams,
};
use sbm_core::synth::Schedule;
use sbm_core::SbmError;

fn quick(kind: ExperimentKind) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::defaults(kind);
    cfg.trials = 3;
    cfg.base_seed = 42;
    cfg.sampler.sweeps = Some(20);
    cfg.sampler.restarts = 2;
    cfg
}

fn bound_config() -> ExperimentConfig {
    let mut cfg = quick(ExperimentKind::BoundTightness);
    cfg.bound_tightness = Some(BoundTightnessParams { n: 60, p: 0.1, ks: vec![2, 4], deltas: vec![0.05, 0.5] });
    cfg
}

fn lik_config() -> ExperimentConfig {
    let mut cfg = quick(ExperimentKind::LikelihoodError);
    cfg.likelihood_error = Some(LikelihoodErrorParams { schedules: vec![Schedule::new(vec![40, 80], 1.5, 0.5)] });
    cfg
}

fn mis_config() -> ExperimentConfig {
    let mut cfg = quick(ExperimentKind::Misclassification);
    cfg.misclassification =
        Some(MisclassificationParams { n_values: vec![40, 80], gammas: vec![0.8, 1.0], ..Default::default() });
    cfg
}

fn order_config() -> ExperimentConfig {
    let mut cfg = quick(ExperimentKind::ModelOrder);
    cfg.trials = 2;
    cfg.model_order = Some(ModelOrderParams {
        synthetic: Some(SyntheticLogitParams { n: 30, k: 2, ..Default::default() }),
        ks: vec![1, 2, 3],
        folds: Some(3),
        summary_ks: vec![2],
        ..Default::default()
    });
    cfg
}

#[test]
fn single_rows_are_reproducible_bit_for_bit() {
    let cfg = bound_config();
    let params = cfg.bound_tightness.clone().unwrap();
    let rows = run_bound_tightness(&cfg).unwrap();
    assert_eq!(rows.len(), 2 * 3 * 2);
    for r in &rows {
        let again = bound_tightness_trial(&params, &cfg.sampler, cfg.base_seed, r.k, r.trial).unwrap();
        assert!(again.contains(r));
    }

    let cfg = lik_config();
    let s = cfg.likelihood_error.clone().unwrap().schedules[0].clone();
    for r in run_likelihood_error(&cfg).unwrap() {
        assert_eq!(likelihood_error_trial(&s, r.n, &cfg.sampler, cfg.base_seed, r.trial).unwrap(), r);
    }

    let cfg = mis_config();
    for r in run_misclassification(&cfg).unwrap() {
        let again =
            misclassification_trial(r.n, r.k, r.m.unwrap(), r.gamma.unwrap(), &cfg.sampler, cfg.base_seed, r.trial)
                .unwrap();
        assert_eq!(again, r);
    }
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let cfg = order_config();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let a = one.install(|| run_model_order(&cfg)).unwrap();
    let b = three.install(|| run_model_order(&cfg)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.0.len(), 6);
    assert_eq!(a.1.len(), 2);
    let c = three.install(|| run_misclassification(&mis_config())).unwrap();
    assert_eq!(one.install(|| run_misclassification(&mis_config())).unwrap(), c);
}

#[test]
fn result_tables_round_trip_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut rows = run_bound_tightness(&bound_config()).unwrap();
    rows.extend(run_model_order(&order_config()).unwrap().0);
    let path = dir.path().join("rows.csv");
    write_rows_file(&rows, &path).unwrap();
    assert_eq!(read_rows_file(&path).unwrap(), rows);
}

#[test]
fn looser_confidence_gives_smaller_bounds() {
    let rows = run_bound_tightness(&bound_config()).unwrap();
    for r in rows.iter().filter(|r| r.delta == Some(0.5)) {
        let strict = rows.iter().find(|s| s.k == r.k && s.trial == r.trial && s.delta == Some(0.05)).unwrap();
        assert!(r.kl_bound.unwrap() < strict.kl_bound.unwrap());
        assert!(r.rms_bound.unwrap() < strict.rms_bound.unwrap());
        assert_eq!(r.kl_error, strict.kl_error);
    }
}

fn parse_line(e: SbmError) -> usize {
    match e {
        SbmError::Parse { line, .. } => line,
        other => panic!("expected a parse error, got {other}"),
    }
}

#[test]
fn malformed_inputs_report_line_numbers() {
    let g = parse_edge_list("# header\n0 1\n\n1 2\n".as_bytes(), None).unwrap();
    assert_eq!((g.n_nodes(), g.edge_count()), (3, 2));
    assert_eq!(parse_line(parse_edge_list("0 1\n1 x\n".as_bytes(), None).unwrap_err()), 2);
    assert_eq!(parse_line(parse_edge_list("0 1\n2 2\n".as_bytes(), None).unwrap_err()), 2);
    assert_eq!(parse_line(parse_edge_list("0 1\n# c\n1 0\n".as_bytes(), None).unwrap_err()), 3);
    assert_eq!(parse_line(parse_edge_list("0 1 2\n".as_bytes(), None).unwrap_err()), 1);
    assert_eq!(parse_line(parse_edge_list("0 5\n".as_bytes(), Some(3)).unwrap_err()), 1);

    let cov = parse_covariates("node,year,dorm\n1,2009,b\n0,2010,a\n2,2009,a\n".as_bytes()).unwrap();
    assert_eq!(cov.n_nodes(), 3);
    assert_eq!(cov.covariates()[0].levels, vec![1, 0, 0]);
    assert_eq!(parse_line(parse_covariates("node,year\n0,a\n0,b\n".as_bytes()).unwrap_err()), 3);
    assert_eq!(parse_line(parse_covariates("node,year\n0,a,b\n".as_bytes()).unwrap_err()), 2);
    assert!(parse_covariates("node,year\n0,a\n2,b\n".as_bytes()).is_err());

    let z = parse_labels("node,class\n0,1\n1,0\n2,1\n".as_bytes()).unwrap();
    assert_eq!(z.labels(), &[1, 0, 1]);
    assert_eq!(parse_line(parse_labels("node,class\n0,1\nx,0\n".as_bytes()).unwrap_err()), 3);
}

#[test]
fn config_rejects_unknown_keys() {
    let err = ExperimentConfig::from_json(r#"{"kind": "bound-tightness", "trails": 3}"#).unwrap_err();
    assert!(err.to_string().contains("trails"), "{err}");
    let cfg = ExperimentConfig::from_json(r#"{"kind": "misclassification", "trials": 3}"#).unwrap();
    assert_eq!(cfg.trials, 3);
    assert!(cfg.misclassification.is_some());
}
