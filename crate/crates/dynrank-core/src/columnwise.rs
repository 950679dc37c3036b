//! Column-at-a-time evaluation of a single update's effect.
//!
//! For one prepared update, any column of the post-update scores can be
//! produced without materializing a matrix: the one-sided correction `M`
//! contributes to column `x` only through `M[:, x]` and `M[x, :]`, and both
//! are foldable while the series vectors are advanced, in `O(K (m + n))`
//! time and `O(n)` extra space per column (the old column itself comes from
//! the linear-memory batch procedure). The fold evaluates the identical
//! expressions as the dense correction, so the two paths agree bit for bit
//! on the correction term.

use alloc::vec;
use alloc::vec::Vec;

use crate::batch::{partial_sim_column, SimColumn};
use crate::graph::{EdgeCaseTag, GraphError, NodeId};
use crate::growth::{self, Corner};
use crate::store::SimStore;
use crate::transition::TransitionMatrix;
use crate::update::{self, RankOneUpdate, UpdateOp};

/// Shared, immutable data of one update, reused across column evaluations:
/// the pre-update transition matrix, the structural class, the payload the
/// class needs, and the old columns the preparation already fetched.
pub struct UpdateBundle<'q> {
    q_old: &'q TransitionMatrix,
    op: UpdateOp,
    src: NodeId,
    dst: NodeId,
    case: EdgeCaseTag,
    n_old: usize,
    n_new: usize,
    damping: f64,
    iters: u32,
    src_col: Option<Vec<f64>>,
    dst_col: Option<Vec<f64>>,
    payload: BundlePayload,
}

enum BundlePayload {
    /// Rank-one change between live nodes (insert or delete).
    InGraph(RankOneUpdate),
    /// Fresh sink: border column over old ids plus the corner.
    NewSink { y: Vec<f64>, corner: f64 },
    /// Fresh source: correction seed and the sink's original in-degree.
    NewSource { z: Vec<f64>, d_sink: usize },
    /// Detached pair: the two corners.
    BothNew { source: f64, sink: f64 },
}

impl<'q> UpdateBundle<'q> {
    pub fn case(&self) -> EdgeCaseTag {
        self.case
    }

    pub fn op(&self) -> UpdateOp {
        self.op
    }

    /// Node count after the update.
    pub fn n_new(&self) -> usize {
        self.n_new
    }

    /// The old column of `x`, reusing the cached endpoint columns.
    fn old_column(&self, x: NodeId) -> Vec<f64> {
        if x == self.src {
            if let Some(col) = &self.src_col {
                return col.clone();
            }
        }
        if x == self.dst {
            if let Some(col) = &self.dst_col {
                return col.clone();
            }
        }
        partial_sim_column(self.q_old, x, self.damping, self.iters).values
    }
}

/// Prepares one update against the store's current state without mutating
/// it. The bundle borrows the store's transition matrix; apply the update
/// to the store only after the bundle is dropped.
pub fn prepare_unit_update(
    store: &SimStore,
    op: UpdateOp,
    src: NodeId,
    dst: NodeId,
) -> Result<UpdateBundle<'_>, GraphError> {
    let case = crate::store::classify(store.graph(), op, src, dst)?;
    let q_old = store.transition();
    let n_old = store.node_count();
    let (c, k) = (store.damping(), store.iters());
    let (n_new, src_col, dst_col, payload) = match case {
        EdgeCaseTag::BothLive => {
            let src_col = store.column(src)?.values;
            let dst_col = store.column(dst)?.values;
            let upd = update::prepare_unit(q_old, &src_col, &dst_col, src, dst, c, op)?;
            (
                n_old,
                Some(src_col),
                Some(dst_col),
                BundlePayload::InGraph(upd),
            )
        }
        EdgeCaseTag::NewSink => {
            let src_col = store.column(src)?.values;
            let bg = growth::grow_sink_border(q_old, &src_col, src, c);
            let Corner::Single(corner) = bg.corner else {
                unreachable!("sink growth has a single corner")
            };
            (
                n_old.max(dst.index() + 1),
                Some(src_col),
                None,
                BundlePayload::NewSink { y: bg.y, corner },
            )
        }
        EdgeCaseTag::NewSource => {
            let dst_col = store.column(dst)?.values;
            let d_sink = q_old.row_len(dst.index());
            let z = growth::source_seed(&dst_col, dst, d_sink, 1, c);
            (
                n_old.max(src.index() + 1),
                None,
                Some(dst_col),
                BundlePayload::NewSource { z, d_sink },
            )
        }
        EdgeCaseTag::BothNew => {
            let (source, sink) = match growth::grow_detached(c).corner {
                Corner::Pair { source, sink } => (source, sink),
                Corner::Single(_) => unreachable!("detached growth has a pair corner"),
            };
            (
                n_old.max(src.index() + 1).max(dst.index() + 1),
                None,
                None,
                BundlePayload::BothNew { source, sink },
            )
        }
    };
    Ok(UpdateBundle {
        q_old,
        op,
        src,
        dst,
        case,
        n_old,
        n_new,
        damping: c,
        iters: k,
        src_col,
        dst_col,
        payload,
    })
}

/// Fold state of the correction series for one column `x`: after the fold,
/// `m_vec` holds `M[:, x]`, `n_vec` holds `M[x, :]`, and `xi`/`eta` are the
/// final series vectors. No per-step history is kept.
pub struct ColumnUpdateContext {
    pub x: NodeId,
    pub m_vec: Vec<f64>,
    pub n_vec: Vec<f64>,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
}

impl ColumnUpdateContext {
    fn fold<Step>(
        x: NodeId,
        n: usize,
        xi0: Vec<f64>,
        eta0: Vec<f64>,
        k: u32,
        mut step: Step,
    ) -> Self
    where
        Step: FnMut(&[f64], &mut [f64], &[f64], &mut [f64]),
    {
        let xv = x.index();
        let mut xi = xi0;
        let mut eta = eta0;
        let mut xi_next = vec![0.0; n];
        let mut eta_next = vec![0.0; n];
        let mut m_vec = vec![0.0; n];
        let mut n_vec = vec![0.0; n];
        for s in 0..=k {
            if s > 0 {
                step(&xi, &mut xi_next, &eta, &mut eta_next);
                core::mem::swap(&mut xi, &mut xi_next);
                core::mem::swap(&mut eta, &mut eta_next);
            }
            let ex = eta[xv];
            for (mv, &xa) in m_vec.iter_mut().zip(xi.iter()) {
                *mv += xa * ex;
            }
            let xx = xi[xv];
            for (nv, &eb) in n_vec.iter_mut().zip(eta.iter()) {
                *nv += xx * eb;
            }
        }
        ColumnUpdateContext {
            x,
            m_vec,
            n_vec,
            xi,
            eta,
        }
    }
}

/// The correction fold for column `x`, for the cases that carry one
/// (returns `None` for pure growth cases).
pub fn column_context(bundle: &UpdateBundle<'_>, x: NodeId) -> Option<ColumnUpdateContext> {
    let n = bundle.n_old;
    let (q, c) = (bundle.q_old, bundle.damping);
    match &bundle.payload {
        BundlePayload::InGraph(upd) => {
            let j = upd.sink.index();
            let u_scale = upd.u_scale();
            let mut xi0 = vec![0.0; n];
            xi0[j] = c;
            let eta0 = upd.gamma.clone();
            Some(ColumnUpdateContext::fold(
                x,
                n,
                xi0,
                eta0,
                bundle.iters,
                |xi, xi_next, eta, eta_next| {
                    update::step_corrected(q, &upd.v, u_scale, j, c, xi, xi_next);
                    update::step_corrected(q, &upd.v, u_scale, j, 1.0, eta, eta_next);
                },
            ))
        }
        BundlePayload::NewSource { z, d_sink } => {
            let j = bundle.dst.index();
            let dd = 1.0;
            let df = *d_sink as f64;
            let defl_xi = c * dd / (df + dd);
            let defl_eta = dd / (df + dd);
            let mut xi0 = vec![0.0; n];
            xi0[j] = 1.0;
            Some(ColumnUpdateContext::fold(
                x,
                n,
                xi0,
                z.clone(),
                bundle.iters,
                |xi, xi_next, eta, eta_next| {
                    growth::step_deflected(q, j, defl_xi, c, xi, xi_next);
                    growth::step_deflected(q, j, defl_eta, 1.0, eta, eta_next);
                },
            ))
        }
        BundlePayload::NewSink { .. } | BundlePayload::BothNew { .. } => None,
    }
}

fn isolated_column(n: usize, x: usize, diag: f64) -> Vec<f64> {
    let mut values = vec![0.0; n];
    values[x] = diag;
    values
}

/// Column `x` of the post-update scores.
pub fn update_column(bundle: &UpdateBundle<'_>, x: NodeId) -> Result<SimColumn, GraphError> {
    let n_new = bundle.n_new;
    let n_old = bundle.n_old;
    if x.index() >= n_new {
        return Err(GraphError::NodeOutOfRange {
            node: x,
            nodes: n_new,
        });
    }
    let c = bundle.damping;
    let values = match &bundle.payload {
        BundlePayload::InGraph(_) => {
            let mut values = bundle.old_column(x);
            let ctx = column_context(bundle, x).expect("in-graph update carries a correction");
            for ((v, &m), &nn) in values.iter_mut().zip(ctx.m_vec.iter()).zip(ctx.n_vec.iter())
            {
                *v += m + nn;
            }
            values
        }
        BundlePayload::NewSink { y, corner } => {
            if x == bundle.dst {
                let mut values = vec![0.0; n_new];
                values[..n_old].copy_from_slice(y);
                values[bundle.dst.index()] = *corner;
                values
            } else if x.index() < n_old {
                let mut values = bundle.old_column(x);
                values.resize(n_new, 0.0);
                values[bundle.dst.index()] = y[x.index()];
                values
            } else {
                isolated_column(n_new, x.index(), 1.0 - c)
            }
        }
        BundlePayload::NewSource { z: _, d_sink } => {
            if x == bundle.src {
                isolated_column(n_new, x.index(), 1.0 - c)
            } else if x.index() < n_old {
                let ctx =
                    column_context(bundle, x).expect("fresh-source growth carries a correction");
                let dd = 1.0;
                let scale = c * dd / (*d_sink as f64 + dd);
                let mut values = bundle.old_column(x);
                for ((v, &m), &nn) in
                    values.iter_mut().zip(ctx.m_vec.iter()).zip(ctx.n_vec.iter())
                {
                    *v += scale * (m + nn);
                }
                values.resize(n_new, 0.0);
                values[bundle.src.index()] = 0.0;
                values
            } else {
                isolated_column(n_new, x.index(), 1.0 - c)
            }
        }
        BundlePayload::BothNew { source, sink } => {
            if x == bundle.src {
                isolated_column(n_new, x.index(), *source)
            } else if x == bundle.dst {
                isolated_column(n_new, x.index(), *sink)
            } else if x.index() < n_old {
                let mut values = bundle.old_column(x);
                values.resize(n_new, 0.0);
                values
            } else {
                isolated_column(n_new, x.index(), 1.0 - c)
            }
        }
    };
    Ok(SimColumn { owner: x, values })
}

/// All post-update columns, in id order.
pub fn update_all_columns<'b, 'q>(
    bundle: &'b UpdateBundle<'q>,
) -> impl Iterator<Item = SimColumn> + 'b {
    (0..bundle.n_new as u32).map(move |x| {
        update_column(bundle, NodeId(x)).expect("iterator stays within the new id range")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DynamicGraph;
    use crate::store::DenseMode;
    use crate::tol::EQ_TOL;

    fn fan() -> DynamicGraph {
        DynamicGraph::from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    /// Columns of an applied dense update vs the column path from the same
    /// baseline.
    fn compare_case(op: UpdateOp, src: u32, dst: u32) {
        let (c, k) = (0.6, 15);
        let g = fan();
        let dense = SimStore::dense_from_graph(g.clone(), c, k, DenseMode::Full);
        let bundle = prepare_unit_update(&dense, op, NodeId(src), NodeId(dst)).unwrap();
        let cols: Vec<SimColumn> = update_all_columns(&bundle).collect();
        drop(bundle);
        let mut dense = dense;
        dense.apply_unit_op(op, NodeId(src), NodeId(dst)).unwrap();
        let s = dense.scores().unwrap();
        for col in cols {
            for (y, &v) in col.values.iter().enumerate() {
                let want = s.get(y, col.owner.index());
                assert!(
                    crate::tol::fabs(v - want) < EQ_TOL,
                    "{op} ({src},{dst}) cell ({y},{})",
                    col.owner
                );
            }
        }
    }

    #[test]
    fn columns_match_dense_across_cases() {
        compare_case(UpdateOp::Insert, 1, 2); // both live
        compare_case(UpdateOp::Delete, 2, 3); // both live, d > 1
        compare_case(UpdateOp::Insert, 3, 5); // fresh sink (id gap)
        compare_case(UpdateOp::Insert, 7, 1); // fresh source
        compare_case(UpdateOp::Insert, 8, 9); // detached pair
    }

    #[test]
    fn out_of_range_column_is_rejected() {
        let (c, k) = (0.6, 10);
        let dense = SimStore::dense_from_graph(fan(), c, k, DenseMode::Full);
        let bundle =
            prepare_unit_update(&dense, UpdateOp::Insert, NodeId(1), NodeId(2)).unwrap();
        assert!(update_column(&bundle, NodeId(4)).is_err());
    }
}
