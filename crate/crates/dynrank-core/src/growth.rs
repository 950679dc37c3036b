//! Bordered growth: insertions whose source or sink is a fresh node.
//!
//! A fresh endpoint never changes the old transition rows (only row `sink`
//! can change, and for a fresh sink that row did not exist), so the state
//! grows by a border instead of going through the rank-one machinery:
//!
//! * fresh sink, live sources: the old block is untouched bit for bit; the
//!   new row/column is `y = (C/delta) Q s` with `s` the summed source
//!   columns, and the corner is `(C/delta^2) * total + (1 - C)`.
//! * fresh sources, live sink: the border is zero (a parentless node shares
//!   nothing), but the sink's in-degree changes, which perturbs the old
//!   block through a deflected series seeded by a vector `z`.
//! * all endpoints fresh: a detached component with closed-form corners.
//!
//! Everything is written over `delta` same-sink sources; `delta = 1` is the
//! single-edge case and runs through the same arithmetic.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{EdgeCaseTag, NodeId};
use crate::transition::TransitionMatrix;
use crate::update::DeltaS;

/// Diagonal entries a growth introduces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Corner {
    /// One fresh node.
    Single(f64),
    /// Fresh source and fresh sink of one detached edge (or block).
    Pair { source: f64, sink: f64 },
}

/// The border data of a growth case. `y` and `z` are over old ids.
#[derive(Clone, Debug)]
pub struct BorderedGrowth {
    pub case: EdgeCaseTag,
    /// Fresh-sink border column; empty for the other cases.
    pub y: Vec<f64>,
    /// Fresh-source correction seed; empty for the other cases.
    pub z: Vec<f64>,
    pub corner: Corner,
}

/// Fresh sink fed by `delta` live sources. `source_col_sum` is the sum of
/// the sources' old columns, `source_total` the old score mass over
/// sources x sources.
pub fn grow_new_sink(
    q: &TransitionMatrix,
    source_col_sum: &[f64],
    source_total: f64,
    delta: usize,
    c: f64,
) -> BorderedGrowth {
    let n = q.n();
    let dd = delta as f64;
    let mut y = vec![0.0; n];
    q.matvec(source_col_sum, &mut y);
    for v in y.iter_mut() {
        *v *= c / dd;
    }
    let corner = (c / (dd * dd)) * source_total + (1.0 - c);
    BorderedGrowth {
        case: EdgeCaseTag::NewSink,
        y,
        z: Vec::new(),
        corner: Corner::Single(corner),
    }
}

/// Single live source feeding a fresh sink.
pub fn grow_sink_border(
    q: &TransitionMatrix,
    src_col: &[f64],
    src: NodeId,
    c: f64,
) -> BorderedGrowth {
    grow_new_sink(q, src_col, src_col[src.index()], 1, c)
}

/// Correction seed for fresh sources over a live sink. `d_sink` is the
/// sink's in-degree before the insertion (threaded explicitly so a caller
/// that already mutated its counters cannot skew the scale).
pub fn source_seed(
    sink_col: &[f64],
    sink: NodeId,
    d_sink: usize,
    delta: usize,
    c: f64,
) -> Vec<f64> {
    let j = sink.index();
    let dd = delta as f64;
    let df = d_sink as f64;
    let s_jj = sink_col[j];
    let coef =
        (1.0 / (2.0 * c * (df + dd))) * (dd * s_jj - (dd - c) * (1.0 - c)) + (1.0 - c) / c;
    let mut z: Vec<f64> = sink_col.iter().map(|&v| -(v / c)).collect();
    z[j] += coef;
    z
}

/// One deflected propagation step:
/// `out = scale * Q x - deflation * (Q[pivot, :] . x) e_pivot`.
///
/// The deflation realizes the sink's in-degree change without touching the
/// stored matrix; the column path evaluates the same expression per entry.
pub fn step_deflected(
    q: &TransitionMatrix,
    pivot: usize,
    deflation: f64,
    scale: f64,
    x: &[f64],
    out: &mut [f64],
) {
    let pdot = q.row_dot(pivot, x);
    for (a, o) in out.iter_mut().enumerate() {
        *o = scale * q.row_dot(a, x);
    }
    out[pivot] -= deflation * pdot;
}

/// Old-block score change caused by giving the live sink `delta` fresh
/// parents: the truncated series `sum xi_t eta_t^T` with `xi_0 = e_sink`,
/// `eta_0 = z`, deflected steps, scaled into
/// `delta S = (C delta / (d + delta)) (M + M^T)`.
pub fn source_correction(
    q: &TransitionMatrix,
    z: &[f64],
    sink: NodeId,
    d_sink: usize,
    delta: usize,
    c: f64,
    k: u32,
) -> DeltaS {
    let n = q.n();
    let j = sink.index();
    let dd = delta as f64;
    let df = d_sink as f64;
    let defl_xi = c * dd / (df + dd);
    let defl_eta = dd / (df + dd);
    let mut m = vec![0.0; n * n];
    let mut xi = vec![0.0; n];
    xi[j] = 1.0;
    let mut eta = z.to_vec();
    let mut xi_next = vec![0.0; n];
    let mut eta_next = vec![0.0; n];
    for step in 0..=k {
        if step > 0 {
            step_deflected(q, j, defl_xi, c, &xi, &mut xi_next);
            step_deflected(q, j, defl_eta, 1.0, &eta, &mut eta_next);
            core::mem::swap(&mut xi, &mut xi_next);
            core::mem::swap(&mut eta, &mut eta_next);
        }
        for a in 0..n {
            let xa = xi[a];
            if xa == 0.0 {
                continue;
            }
            let row = &mut m[a * n..(a + 1) * n];
            for (mv, &ev) in row.iter_mut().zip(eta.iter()) {
                *mv += xa * ev;
            }
        }
    }
    let scale = c * dd / (df + dd);
    let mut values = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            values[a * n + b] = scale * (m[a * n + b] + m[b * n + a]);
        }
    }
    DeltaS::Dense { n, values }
}

/// Fresh sources over a live sink: the border data (zero border, `1 - C`
/// corner per source) plus the old-block correction.
pub fn grow_new_source(
    q: &TransitionMatrix,
    sink_col: &[f64],
    sink: NodeId,
    delta: usize,
    c: f64,
    k: u32,
) -> (BorderedGrowth, DeltaS) {
    let d_sink = q.row_len(sink.index());
    let z = source_seed(sink_col, sink, d_sink, delta, c);
    let ds = source_correction(q, &z, sink, d_sink, delta, c, k);
    (
        BorderedGrowth {
            case: EdgeCaseTag::NewSource,
            y: Vec::new(),
            z,
            corner: Corner::Single(1.0 - c),
        },
        ds,
    )
}

/// Single detached edge between two fresh nodes: the source keeps the
/// fresh-node self-score and the sink stacks one step on top of it.
pub fn grow_detached(c: f64) -> BorderedGrowth {
    BorderedGrowth {
        case: EdgeCaseTag::BothNew,
        y: Vec::new(),
        z: Vec::new(),
        corner: Corner::Pair {
            source: 1.0 - c,
            sink: 1.0 - c * c,
        },
    }
}

/// Corners for `delta` fresh sources feeding one fresh sink:
/// `(1 - C)` per source, `(1 - C)(1 + C/delta)` for the sink.
pub fn detached_block_corners(delta: usize, c: f64) -> (f64, f64) {
    let dd = delta as f64;
    (1.0 - c, (1.0 - c) * (1.0 + c / dd))
}
