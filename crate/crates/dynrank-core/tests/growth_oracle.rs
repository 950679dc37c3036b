//! Growth cases: a fresh sink, fresh sources over a live sink, and a
//! detached pair, against published example values and the from-scratch
//! oracle.

mod common;

use common::{example_graph, fresh_batch, id, C, K};
use dynrank_core::growth::{
    detached_block_corners, grow_new_source, grow_sink_border, source_seed, Corner,
};
use dynrank_core::store::DenseMode;
use dynrank_core::tol::oracle_tol;
use dynrank_core::{NodeId, SimStore, UpdateOp};

fn col(s: &dynrank_core::SimMatrix, x: NodeId) -> Vec<f64> {
    (0..s.n()).map(|y| s.get(y, x.index())).collect()
}

#[test]
fn fresh_sink_border_matches_published_example() {
    let g = example_graph();
    let q = g.build_transition();
    let s = fresh_batch(&g, C, K);
    let bg = grow_sink_border(&q, &col(&s, id('i')), id('i'), C);
    assert!((bg.y[id('a').index()] - 0.082773).abs() < 1e-5);
    assert!((bg.y[id('b').index()] - 0.111360).abs() < 1e-5);
    let Corner::Single(corner) = bg.corner else {
        panic!("sink growth must carry a single corner")
    };
    assert!((corner - 0.672320).abs() < 1e-5);
}

#[test]
fn fresh_sink_leaves_old_block_untouched_and_tracks_batch() {
    let mut store = SimStore::dense_from_graph(example_graph(), C, K, DenseMode::Full);
    let before = store.scores().unwrap().clone();
    let p = NodeId(15);
    let outcome = store
        .apply_unit_op(UpdateOp::Insert, id('i'), p)
        .unwrap();
    assert_eq!(outcome.case, dynrank_core::EdgeCaseTag::NewSink);
    let s = store.scores().unwrap();
    // the old block is copied, not recomputed
    for a in 0..before.n() {
        for b in 0..before.n() {
            assert_eq!(s.get(a, b).to_bits(), before.get(a, b).to_bits());
        }
    }
    let want = fresh_batch(store.graph(), C, K);
    assert!(s.max_abs_diff(&want) <= oracle_tol(C, K));
}

#[test]
fn fresh_source_seed_matches_published_example() {
    let g = example_graph();
    let s = fresh_batch(&g, C, K);
    let d_sink = g.in_degree(id('j'));
    let z = source_seed(&col(&s, id('j')), id('j'), d_sink, 1, C);
    for (x, want) in [('f', -0.258), ('i', -0.388), ('j', -0.29)] {
        assert!(
            (z[id(x).index()] - want).abs() < 1e-3,
            "z[{x}] = {}",
            z[id(x).index()]
        );
    }
}

#[test]
fn fresh_source_shifts_old_block_like_published_example() {
    let g = example_graph();
    let q = g.build_transition();
    let s = fresh_batch(&g, C, K);
    let (_bg, ds) = grow_new_source(&q, &col(&s, id('j')), id('j'), 1, C, 10);
    let at = |a: char, b: char| ds.get(id(a).index(), id(b).index());
    for (a, b, want) in [
        ('a', 'a', -0.0137),
        ('f', 'j', -0.0688),
        ('i', 'j', -0.1035),
        ('j', 'j', -0.1547),
    ] {
        assert!((at(a, b) - want).abs() < 5e-4, "ds[{a},{b}] = {}", at(a, b));
    }
}

#[test]
fn fresh_source_tracks_batch_with_exact_zero_cross_block() {
    let mut store = SimStore::dense_from_graph(example_graph(), C, K, DenseMode::Full);
    let p = NodeId(15);
    let outcome = store
        .apply_unit_op(UpdateOp::Insert, p, id('j'))
        .unwrap();
    assert_eq!(outcome.case, dynrank_core::EdgeCaseTag::NewSource);
    let s = store.scores().unwrap();
    let want = fresh_batch(store.graph(), C, K);
    assert!(s.max_abs_diff(&want) <= oracle_tol(C, K));
    // a parentless node shares no ancestry with anyone: exact zeros
    for y in 0..15 {
        assert_eq!(s.get(y, 15), 0.0);
        assert_eq!(s.get(15, y), 0.0);
    }
    assert_eq!(s.get(15, 15), 1.0 - C);
}

#[test]
fn detached_pair_is_closed_form() {
    let mut store = SimStore::dense_from_graph(example_graph(), C, K, DenseMode::Full);
    let before = store.scores().unwrap().clone();
    let (p, r) = (NodeId(15), NodeId(16));
    let outcome = store.apply_unit_op(UpdateOp::Insert, p, r).unwrap();
    assert_eq!(outcome.case, dynrank_core::EdgeCaseTag::BothNew);
    let s = store.scores().unwrap();
    for a in 0..before.n() {
        for b in 0..before.n() {
            assert_eq!(s.get(a, b).to_bits(), before.get(a, b).to_bits());
        }
    }
    assert_eq!(s.get(15, 15).to_bits(), (1.0 - C).to_bits());
    assert_eq!(s.get(16, 16).to_bits(), (1.0 - C * C).to_bits());
    assert_eq!(s.get(15, 16), 0.0);
    let want = fresh_batch(store.graph(), C, K);
    assert!(s.max_abs_diff(&want) <= 1e-12);
}

/// A detached block of several fresh parents over one fresh sink has a
/// closed-form sink diagonal.
#[test]
fn detached_block_corner_matches_tiny_batch() {
    for delta in 1..=4usize {
        let n = delta + 1;
        let sink = delta as u32;
        let g = dynrank_core::DynamicGraph::from_edges(
            n,
            (0..delta as u32).map(|s| (s, sink)),
        )
        .unwrap();
        let want = fresh_batch(&g, C, 8);
        let (src_diag, sink_diag) = detached_block_corners(delta, C);
        assert!((want.get(0, 0) - src_diag).abs() <= 1e-15);
        assert!(
            (want.get(delta, delta) - sink_diag).abs() <= 1e-15,
            "delta {delta}: batch {} vs corner {}",
            want.get(delta, delta),
            sink_diag
        );
    }
}

/// Growth cases with an id gap: inserting far past the current range
/// allocates fillers that stay isolated.
#[test]
fn id_gap_growth_keeps_fillers_isolated() {
    let mut store = SimStore::dense_from_graph(example_graph(), C, 12, DenseMode::Full);
    store.apply_unit_op(UpdateOp::Insert, id('i'), NodeId(18)).unwrap();
    assert_eq!(store.node_count(), 19);
    let s = store.scores().unwrap();
    for filler in 15..18 {
        assert_eq!(s.get(filler, filler), 1.0 - C);
        for y in 0..19 {
            if y != filler {
                assert_eq!(s.get(y, filler), 0.0);
            }
        }
        assert!(!store.graph().is_live(NodeId(filler as u32)));
    }
    let want = fresh_batch(store.graph(), C, 12);
    assert!(s.max_abs_diff(&want) <= oracle_tol(C, 12));
}
