//! Shared fixtures for the integration suites.
#![allow(dead_code)]

use dynrank_core::{batch_simrank, DynamicGraph, NodeId, SimMatrix};
use rand::Rng;

/// Damping used by the 15-node worked example.
pub const C: f64 = 0.8;

/// Iteration count safely past the example's depth; the example graph is a
/// DAG, so truncated scores are exact from there on.
pub const K: u32 = 80;

/// Letter names of the worked-example nodes; index = node id.
pub const NAMES: &str = "abcdefghijklmno";

pub fn id(ch: char) -> NodeId {
    let k = NAMES.find(ch).expect("known node letter");
    NodeId(k as u32)
}

/// 15-node citation-style example: `o` fans out to a layer that funnels
/// through `f`, `i`, `j` into `a`, `b`, `d`.
pub const EDGES: &[(char, char)] = &[
    ('o', 'e'),
    ('o', 'l'),
    ('o', 'm'),
    ('o', 'n'),
    ('o', 'a'),
    ('o', 'b'),
    ('c', 'a'),
    ('c', 'b'),
    ('e', 'h'),
    ('e', 'k'),
    ('l', 'g'),
    ('g', 'f'),
    ('h', 'f'),
    ('h', 'i'),
    ('h', 'j'),
    ('k', 'j'),
    ('f', 'b'),
    ('j', 'a'),
    ('j', 'b'),
    ('a', 'd'),
    ('b', 'd'),
];

pub fn example_graph() -> DynamicGraph {
    DynamicGraph::from_edges(15, EDGES.iter().map(|&(s, d)| (id(s).0, id(d).0)))
        .expect("example edges are valid")
}

pub fn fresh_batch(g: &DynamicGraph, c: f64, k: u32) -> SimMatrix {
    batch_simrank(&g.build_transition(), c, k)
}

/// Random digraph over exactly `n` ids with about `target` distinct edges
/// (no self-loops). Some ids may stay edgeless.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, target: usize) -> DynamicGraph {
    let mut g = DynamicGraph::new(n);
    for _ in 0..target {
        let s = rng.gen_range(0..n as u32);
        let d = rng.gen_range(0..n as u32);
        if s != d && !g.has_edge(NodeId(s), NodeId(d)) {
            g.insert_edge(NodeId(s), NodeId(d)).unwrap();
        }
    }
    g
}
