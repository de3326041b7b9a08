use pce::harness::{
    read_records, run_plan, BaselineCache, BaselineMethod, ExperimentPlan, GraphSource, RunOptions,
    RunRecord, RunRole, SolverSpec,
};
use pce::pce_core::graph::GraphGenerator;
use pce::pce_core::oracles::SaConfig;
use pce::report::{aggregate, markdown, EMPTY_CELL};

fn plan() -> ExperimentPlan {
    let mut plan = ExperimentPlan::new(
        vec![GraphSource::Generate(GraphGenerator::complete(6))],
        vec![SolverSpec::iterative(), SolverSpec::Fixed { alpha: 100.0 }],
    );
    plan.c_values = Some(vec![2, 3]);
    plan.repetitions = 2;
    plan.seed_base = 40;
    plan.baseline = BaselineMethod::Exhaustive;
    plan
}

fn without_times(mut records: Vec<RunRecord>) -> Vec<RunRecord> {
    for r in &mut records {
        r.wall_time_s = 0.0;
    }
    records
}

#[test]
fn plan_layout_and_pairing() {
    let records = run_plan(
        &plan(),
        &mut BaselineCache::in_memory(),
        &RunOptions::default(),
    )
    .unwrap();
    // 2 budgets × 2 reps × (iterative + control + fixed)
    assert_eq!(records.len(), 12);
    assert!(records.iter().enumerate().all(|(i, r)| r.run_id == i));
    for r in &records {
        assert!(r.succeeded(), "{:?}", r.error);
        assert_eq!(r.n, 6);
        assert_eq!(r.baseline.as_ref().unwrap().method, "exhaustive");
        match r.role {
            RunRole::Iterative => assert_eq!(r.pair_id, Some(r.run_id)),
            RunRole::Control => {
                let it = &records[r.pair_id.unwrap()];
                assert_eq!(it.role, RunRole::Iterative);
                assert_eq!(
                    r.config.objective.alpha,
                    it.outcome.as_ref().unwrap().final_alpha
                );
                assert_eq!((r.c, r.repetition), (it.c, it.repetition));
            }
            RunRole::Single => assert_eq!(r.pair_id, None),
        }
        let m = r.metrics.as_ref().unwrap();
        assert_eq!(m.normalized_cut.is_some(), m.feasible);
        assert_eq!(
            r.config.seed,
            40 + r.repetition as u64
                + if r.role == RunRole::Control {
                    pce::pce_core::solver::CONTROL_SEED_OFFSET
                } else {
                    0
                }
        );
    }
}

#[test]
fn streamed_records_replay_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.jsonl");
    let opts = RunOptions {
        records_path: Some(path.clone()),
        ..Default::default()
    };
    let records = run_plan(&plan(), &mut BaselineCache::in_memory(), &opts).unwrap();
    let mut read = read_records(&path).unwrap();
    read.sort_by_key(|r| r.run_id);
    assert_eq!(read, records);
    for r in &read {
        assert_eq!(
            &r.replay().unwrap(),
            r.outcome.as_ref().unwrap(),
            "run {}",
            r.run_id
        );
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let run = |workers| {
        let opts = RunOptions {
            workers: Some(workers),
            ..Default::default()
        };
        without_times(run_plan(&plan(), &mut BaselineCache::in_memory(), &opts).unwrap())
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn aggregation_tables() {
    let records = run_plan(
        &plan(),
        &mut BaselineCache::in_memory(),
        &RunOptions::default(),
    )
    .unwrap();
    let report = aggregate(&records);
    assert_eq!(report.total_runs, 12);
    assert_eq!(report.failed_runs, 0);
    assert_eq!(report.contingency.len(), 1);
    let row = &report.contingency[0];
    assert_eq!(row.pairs, 4);
    let total: f64 = row.cells().iter().map(|c| c.2).sum();
    assert!((total - 100.0).abs() < 1e-9);

    // Per-label group rows plus per-(c, label) cells.
    assert_eq!(report.groups.len(), 3);
    assert_eq!(report.cells.len(), 6);
    for g in &report.groups {
        assert_eq!(g.runs, 4);
    }
}

#[test]
fn cut_means_use_feasible_runs_only() {
    let mut records = run_plan(
        &plan(),
        &mut BaselineCache::in_memory(),
        &RunOptions::default(),
    )
    .unwrap();
    // Force a known pattern onto the fixed-α runs.
    let fixed: Vec<usize> = records
        .iter()
        .filter(|r| r.role == RunRole::Single)
        .map(|r| r.run_id)
        .collect();
    for (k, &id) in fixed.iter().enumerate() {
        let m = records[id].metrics.as_mut().unwrap();
        m.feasible = k % 2 == 0;
        m.normalized_cut = m.feasible.then_some(if k == 0 { 1.0 } else { 0.5 });
    }
    let report = aggregate(&records);
    let g = report
        .groups
        .iter()
        .find(|g| g.label.starts_with("pce("))
        .unwrap();
    assert_eq!(g.epsilon_c, Some(0.5));
    assert_eq!(g.normalized_cut, Some(0.75));

    // Without matched feasible pairs the comparison renders as empty.
    for r in records.iter_mut().filter(|r| r.role == RunRole::Control) {
        let m = r.metrics.as_mut().unwrap();
        m.feasible = false;
        m.normalized_cut = None;
    }
    let report = aggregate(&records);
    let row = &report.cut_comparison[0];
    assert_eq!(row.matched_pairs, 0);
    assert_eq!(row.delta_percent, None);
    assert!(markdown(&report).contains(EMPTY_CELL));
}

#[test]
fn baseline_cache_persists_and_tracks_method() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("baselines.json");
    let g = GraphGenerator::complete(8).generate().unwrap();
    let sa = BaselineMethod::Sa(SaConfig::with_seed(3));

    let mut cache = BaselineCache::open(&path).unwrap();
    assert!(cache.is_empty());
    let first = cache.get_or_compute(&g, 3, &sa).unwrap();
    cache.save().unwrap();

    let mut reopened = BaselineCache::open(&path).unwrap();
    assert_eq!(reopened.len(), 1);
    assert_eq!(reopened.get_or_compute(&g, 3, &sa).unwrap(), first);
    assert_eq!(first.cut, 15.0);

    let exact = reopened
        .get_or_compute(&g, 3, &BaselineMethod::Exhaustive)
        .unwrap();
    assert_eq!(exact.method, "exhaustive");
    assert!(exact.optimal);
    assert_eq!(exact.cut, first.cut);
    assert_eq!(reopened.len(), 1);
}

#[test]
fn invalid_plans_are_rejected_up_front() {
    let mut p = plan();
    p.c_values = Some(vec![4]);
    assert!(run_plan(&p, &mut BaselineCache::in_memory(), &RunOptions::default()).is_err());
    let mut p = plan();
    p.repetitions = 0;
    assert!(run_plan(&p, &mut BaselineCache::in_memory(), &RunOptions::default()).is_err());
    let mut p = plan();
    p.solvers = vec![SolverSpec::Fixed { alpha: -1.0 }];
    assert!(run_plan(&p, &mut BaselineCache::in_memory(), &RunOptions::default()).is_err());
}

#[test]
fn plan_json_defaults() {
    let text = r#"{
        "graphs": [{"generate": {"n": 6, "weights": {"kind": "unit"}}}],
        "solvers": [{"kind": "iterative"}, {"kind": "fixed", "alpha": 4.0}]
    }"#;
    let p: ExperimentPlan = serde_json::from_str(text).unwrap();
    assert_eq!(p.repetitions, 10);
    assert_eq!(p.layers, 1);
    assert_eq!(p.c_values_for(6), vec![2, 3]);
    assert_eq!(p.solvers[0], SolverSpec::iterative());
    assert_eq!(p.baseline, BaselineMethod::default());
}
