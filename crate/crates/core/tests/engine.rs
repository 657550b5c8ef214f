mod common;

use matchboost::engine::{boost, boost_observed, classify_arc, ArcType, EngineConfig};
use matchboost::oracle::oracle_by_name;
use matchboost::structure::PhaseState;
use matchboost::{Constants, Epsilon, Graph, Matching, PhaseParams};
use proptest::prelude::*;

use common::{brute_mu, is_valid_matching, random_graph, TraceObserver};

fn small_graph() -> impl Strategy<Value = Graph> {
    (2usize..=16, 0.05f64..0.5, any::<u64>()).prop_map(|(n, p, s)| random_graph(n, p, s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn boost_meets_bound_with_checked_ops(
        g in small_graph(),
        eps_i in 0usize..2,
        oracle_i in 0usize..4,
        seed in any::<u64>(),
    ) {
        let eps = [0.25, 0.125][eps_i];
        let name = ["exact", "greedy", "adversarial(2)", "adversarial(3)"][oracle_i];
        let cfg = EngineConfig { verify_ops: true, ..EngineConfig::default() };
        let out = boost(&g, eps, oracle_by_name(name, Some(seed)).unwrap(), &cfg).unwrap();
        let edges = out.matching.edges();
        prop_assert!(is_valid_matching(&g, &edges));
        let mu = brute_mu(&g);
        prop_assert!((edges.len() as f64) * (1.0 + eps) >= mu as f64, "{} gave {} of {}", name, edges.len(), mu);
        prop_assert!(out.stats.final_size >= out.stats.initial_size);
    }

    #[test]
    fn phase_traces_keep_structural_guarantees(g in small_graph(), oracle_i in 0usize..3) {
        let name = ["exact", "greedy", "adversarial(3)"][oracle_i];
        let cfg = EngineConfig { instrument: true, ..EngineConfig::default() };
        let mut obs = TraceObserver { check_short_paths: g.vertex_count() <= 12, ..TraceObserver::default() };
        boost_observed(&g, 0.25, oracle_by_name(name, None).unwrap(), &cfg, &mut obs).unwrap();
        prop_assert!(obs.violations.is_empty(), "{:?}", &obs.violations[..obs.violations.len().min(3)]);
    }
}

#[test]
fn deterministic_oracles_give_identical_runs() {
    let g = random_graph(40, 0.1, 7);
    let cfg = EngineConfig::default();
    for name in ["exact", "adversarial(2)"] {
        let a = boost(&g, 0.25, oracle_by_name(name, None).unwrap(), &cfg).unwrap();
        let b = boost(&g, 0.25, oracle_by_name(name, None).unwrap(), &cfg).unwrap();
        assert_eq!(a, b);
    }
    let a = boost(&g, 0.25, oracle_by_name("greedy", Some(3)).unwrap(), &cfg).unwrap();
    let b = boost(&g, 0.25, oracle_by_name("greedy", Some(3)).unwrap(), &cfg).unwrap();
    assert_eq!(a.matching, b.matching);
}

#[test]
fn odd_path_reaches_perfect_matching() {
    // 0-1-2-3-4-5 with the middle edge matched: one length-5 augmenting path.
    let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
    let out = boost(&g, 0.25, oracle_by_name("adversarial(3)", None).unwrap(), &EngineConfig::default()).unwrap();
    assert_eq!(out.matching.len(), 3);
}

#[test]
fn empty_and_edgeless_graphs() {
    let cfg = EngineConfig::default();
    assert!(boost(&Graph::new(0), 0.25, oracle_by_name("exact", None).unwrap(), &cfg)
        .unwrap()
        .matching
        .is_empty());
    assert!(boost(&Graph::new(5), 0.25, oracle_by_name("exact", None).unwrap(), &cfg)
        .unwrap()
        .matching
        .is_empty());
}

#[test]
fn bad_epsilon_is_rejected() {
    let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
    for e in [0.0, -0.1, 0.5, 1.5, f64::NAN] {
        assert!(boost(&g, e, oracle_by_name("exact", None).unwrap(), &EngineConfig::default()).is_err());
    }
}

#[test]
fn arcs_between_two_fresh_roots_are_augmenting() {
    let mut g = Graph::from_edges(2, &[(0, 1)]).unwrap();
    let m = Matching::new(2);
    let params = PhaseParams::new(Epsilon::new(0.25).unwrap(), 1, &Constants::default());
    let mut st = PhaseState::new(&mut g, &m, params);
    assert!(st.init_structure(0).is_err());
    assert_eq!(classify_arc(&st, 0, 1), ArcType::Type2);
    st.op_augment(0, 1).unwrap();
    assert_eq!(st.paths().len(), 1);
    assert!(st.check_invariants().is_ok());
}
