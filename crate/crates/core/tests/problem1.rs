mod common;

use matchboost::engine::EngineConfig;
use matchboost::oracle::{weak_by_name, WeakOracle};
use matchboost::problem1::{
    apply_chunk, chunk_size, format_stream, into_chunks, parse_stream, random_stream, run_harness, HarnessParams,
    Update, ValidatingWeak, Violation,
};
use matchboost::{AdjacencyView, Error, Graph, Vertex};
use proptest::prelude::*;

use common::brute_mu;

fn update() -> impl Strategy<Value = Update> {
    prop_oneof![
        (0usize..1000, 0usize..1000).prop_map(|(u, v)| Update::Insert(u, v)),
        (0usize..1000, 0usize..1000).prop_map(|(u, v)| Update::Delete(u, v)),
        Just(Update::Empty),
    ]
}

proptest! {
    #[test]
    fn streams_roundtrip_through_text(ups in prop::collection::vec(update(), 0..60)) {
        prop_assert_eq!(parse_stream(&format_stream(&ups)).unwrap(), ups);
    }

    #[test]
    fn chunks_are_padded_to_size(len in 0usize..100, size in 1usize..20) {
        let ups = random_stream(10, len, len as u64);
        let chunks = into_chunks(&ups, size);
        prop_assert_eq!(chunks.len(), len.div_ceil(size));
        prop_assert!(chunks.iter().all(|c| c.len() == size));
        let flat: Vec<Update> = chunks.concat();
        prop_assert_eq!(&flat[..len], &ups[..]);
        prop_assert!(flat[len..].iter().all(|u| *u == Update::Empty));
    }

    #[test]
    fn random_streams_apply_cleanly(n in 2usize..30, len in 0usize..200, seed in any::<u64>()) {
        let ups = random_stream(n, len, seed);
        prop_assert_eq!(ups.len(), len);
        let mut g = Graph::new(n);
        prop_assert!(apply_chunk(&mut g, &ups, len, 0).is_ok());
    }
}

#[test]
fn parse_reports_line_numbers() {
    let text = "# header\n+ 0 1\n\n- 0 1\n.\n+ 2 x\n";
    match parse_stream(text) {
        Err(Error::InvalidUpdate { record, .. }) => assert_eq!(record, 6),
        other => panic!("{other:?}"),
    }
    assert!(parse_stream("* 1 2").is_err());
    assert!(parse_stream("+ 1").is_err());
    assert_eq!(parse_stream("# only\n\n").unwrap(), vec![]);
}

#[test]
fn chunk_size_follows_alpha() {
    assert_eq!(chunk_size(256, 1.0 / 16.0), 16);
    assert_eq!(chunk_size(10, 1.0 / 16.0), 1);
    assert_eq!(chunk_size(0, 0.5), 1);
}

#[test]
fn bad_chunks_are_rejected() {
    let mut g = Graph::new(4);
    let chunk = [Update::Insert(0, 1); 3];
    assert!(matches!(
        apply_chunk(&mut g, &chunk[..2], 3, 0),
        Err(Error::ChunkSize { expected: 3, got: 2 })
    ));
    match apply_chunk(&mut g, &[Update::Insert(0, 1), Update::Delete(2, 3)], 2, 10) {
        Err(Error::InvalidUpdate { record, .. }) => assert_eq!(record, 12),
        other => panic!("{other:?}"),
    }
    let mut g = Graph::new(4);
    assert!(apply_chunk(&mut g, &[Update::Insert(0, 0)], 1, 0).is_err());
    assert!(apply_chunk(&mut g, &[Update::Insert(0, 9)], 1, 0).is_err());
}

type Script = fn(&[Vertex]) -> Option<Vec<(Vertex, Vertex)>>;

/// Scripted oracle for exercising the validator.
struct Scripted(Script);

impl WeakOracle for Scripted {
    fn name(&self) -> String {
        "scripted".into()
    }
    fn lambda(&self) -> f64 {
        1.0
    }
    fn query(&mut self, _: &dyn AdjacencyView, s: &[Vertex], _: f64) -> Option<Vec<(Vertex, Vertex)>> {
        (self.0)(s)
    }
}

#[test]
fn validator_flags_each_kind_of_misbehaviour() {
    let g = Graph::from_edges(6, &[(0, 1), (2, 3), (4, 5), (1, 2)]).unwrap();
    let all: Vec<Vertex> = (0..6).collect();

    let mut v = ValidatingWeak::new(Scripted(|_| None), None);
    v.query(&g, &all, 0.1);
    assert!(matches!(v.violations[..], [Violation::MissedMatching { mu: 3, .. }]));
    // Refusing is fine when the induced matching is below the threshold.
    v.reset();
    v.query(&g, &[0, 1], 0.5);
    assert!(v.violations.is_empty());

    let mut v = ValidatingWeak::new(Scripted(|_| Some(vec![(0, 2)])), None);
    v.query(&g, &all, 0.1);
    assert!(v.violations.iter().any(|x| matches!(x, Violation::InvalidAnswer { .. })));

    let mut v = ValidatingWeak::new(Scripted(|_| Some(vec![(0, 1), (1, 2)])), None);
    v.query(&g, &all, 0.1);
    assert!(v.violations.iter().any(|x| matches!(x, Violation::InvalidAnswer { .. })));

    let mut v = ValidatingWeak::new(Scripted(|_| Some(vec![(4, 5)])), None);
    v.query(&g, &[0, 1, 2, 3], 0.1);
    assert!(v.violations.iter().any(|x| matches!(x, Violation::InvalidAnswer { .. })));

    let mut v = ValidatingWeak::new(Scripted(|_| Some(vec![(0, 1)])), None);
    v.query(&g, &all, 0.5);
    assert!(matches!(v.violations[..], [Violation::SmallAnswer { size: 1, .. }]));

    let mut v = ValidatingWeak::new(weak_by_name("weak-exact").unwrap(), Some(2));
    for _ in 0..5 {
        v.query(&g, &all, 0.1);
    }
    assert_eq!((v.served, v.dropped), (2, 3));
    assert!(v.violations.is_empty());
}

#[test]
fn harness_reports_one_row_per_chunk() {
    let n = 16;
    let ups = random_stream(n, 50, 4);
    let params = HarnessParams::new(0.25, 9);
    let reports = run_harness(n, &ups, weak_by_name("weak-greedy").unwrap(), &params, &EngineConfig::default()).unwrap();
    assert_eq!(reports.len(), 50);
    let mut g = Graph::new(n);
    for (r, u) in reports.iter().zip(&ups) {
        apply_chunk(&mut g, &[*u], 1, 0).unwrap();
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        assert_eq!(r.dropped, 0);
        assert_eq!(r.graph_size, g.edge_count());
        assert_eq!(r.mu, brute_mu(&g));
        assert!(r.matching_size <= r.mu);
        if !r.precondition_warning && r.mu as f64 >= 0.25 * 0.25 * n as f64 {
            assert!(r.matching_size as f64 * 1.25 >= r.mu as f64);
        }
        assert!(r.wall_time.is_none());
    }
}

#[test]
fn lying_oracle_is_caught_by_the_harness() {
    let ups = vec![Update::Insert(0, 1), Update::Insert(2, 3)];
    let params = HarnessParams::new(0.25, 1);
    let reports = run_harness(4, &ups, Scripted(|_| None), &params, &EngineConfig::default()).unwrap();
    assert!(reports
        .iter()
        .any(|r| r.violations.iter().any(|v| matches!(v, Violation::MissedMatching { .. }))));
}
