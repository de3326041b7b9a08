use pce_core::graph::{GraphGenerator, WeightedGraph};
use pce_core::metrics::binarization;
use pce_core::objective::{decode, is_feasible};
use pce_core::solver::{
    control_config, solve, solve_pce, AlphaMode, ExitReason, PceConfig, CONTROL_SEED_OFFSET,
};

#[test]
fn triangle_always_cuts_two() {
    let g = WeightedGraph::complete_unit(3).unwrap();
    for seed in 0..8 {
        let out = solve(&PceConfig::iterative_defaults(g.clone(), 1, seed).unwrap()).unwrap();
        assert!(out.feasible, "seed {seed}");
        assert_eq!(out.cut, 2.0);
    }
}

#[test]
fn outcome_is_self_consistent() {
    let g = GraphGenerator::complete(6).generate().unwrap();
    for seed in 0..3 {
        let cfg = PceConfig::iterative_defaults(g.clone(), 2, seed).unwrap();
        let out = solve(&cfg).unwrap();
        assert_eq!(out.z, decode(out.soft.values()));
        assert_eq!(out.feasible, is_feasible(&out.z, 2));
        assert_eq!(out.cut, g.cut_size(&out.z).unwrap());
        assert_eq!(out.outer_iters, out.history.len());
        assert_eq!(
            out.inner_evals,
            out.history.iter().map(|h| h.evals).sum::<usize>()
        );
        let last = out.history.last().unwrap();
        assert_eq!(last.alpha, out.final_alpha);
        assert_eq!(last.theta_end, out.theta_final);
        assert_eq!(last.multiplier, None);
        for pair in out.history.windows(2) {
            assert_eq!(pair[1].theta_start, pair[0].theta_end);
            assert!(pair[1].alpha > pair[0].alpha);
            let m = pair[0].multiplier.unwrap();
            assert!((pair[0].alpha * m - pair[1].alpha).abs() <= 1e-12 * pair[1].alpha);
        }
        if out.exit == ExitReason::Binarized {
            assert_eq!(binarization(&out.soft), 1.0);
        }
        assert!(out.outer_iters <= 50);
        // Same config, same answer.
        assert_eq!(solve(&cfg).unwrap(), out);
    }
}

#[test]
fn control_runs_at_the_final_alpha() {
    let g = GraphGenerator::complete(6).generate().unwrap();
    let cfg = PceConfig::iterative_defaults(g, 2, 4).unwrap();
    let it = solve(&cfg).unwrap();
    let ctl_cfg = control_config(&it, &cfg);
    assert_eq!(ctl_cfg.alpha_mode, AlphaMode::Fixed);
    assert_eq!(ctl_cfg.objective.alpha, it.final_alpha);
    assert_eq!(ctl_cfg.seed, 4u64.wrapping_add(CONTROL_SEED_OFFSET));
    assert_eq!(ctl_cfg.objective.graph, cfg.objective.graph);
    let ctl = solve_pce(&ctl_cfg).unwrap();
    assert_eq!(ctl.exit, ExitReason::FixedAlpha);
    assert_eq!(ctl.outer_iters, 1);
    assert_eq!(ctl.final_alpha, it.final_alpha);
}

#[test]
fn weighted_graph_solves() {
    let mut gen = GraphGenerator::complete(8);
    gen.weights = pce_core::graph::WeightMode::UniformRandom { lo: 0.5, hi: 2.0 };
    gen.seed = 11;
    let g = gen.generate().unwrap();
    let out = solve(&PceConfig::iterative_defaults(g.clone(), 3, 0).unwrap()).unwrap();
    assert_eq!(out.cut, g.cut_size(&out.z).unwrap());
    assert_eq!(out.soft.len(), 8);
}
