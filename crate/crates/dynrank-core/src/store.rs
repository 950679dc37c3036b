//! Maintained similarity state over a dynamic graph.
//!
//! Two shapes share one interface. The dense store materializes the score
//! matrix and keeps it current via rank-one corrections and bordered
//! growth; it can evaluate corrections in full or restricted to the
//! affected area. The column store materializes nothing beyond the graph
//! and its transition matrix, answering column queries by the
//! linear-memory procedure; structural updates only maintain the graph.

use crate::batch::{batch_simrank, partial_sim_column, SimColumn, SimMatrix};
use crate::graph::{DynamicGraph, EdgeCaseTag, GraphError, NodeId};
use crate::growth::{self, Corner};
use crate::transition::TransitionMatrix;
use crate::update::{self, UpdateOp};

/// How a dense store evaluates rank-one corrections.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DenseMode {
    Full,
    Pruned,
}

/// Result of one applied unit update.
#[derive(Clone, Debug)]
pub struct UnitOutcome {
    pub case: EdgeCaseTag,
    /// Cells the pruned correction touched; `None` when no pruned
    /// rank-one correction ran (full mode, growth cases, column store).
    pub affected_cells: Option<usize>,
}

pub struct DenseStore {
    graph: DynamicGraph,
    q: TransitionMatrix,
    s: SimMatrix,
    mode: DenseMode,
    damping: f64,
    iters: u32,
}

pub struct ColumnStore {
    graph: DynamicGraph,
    q: TransitionMatrix,
    damping: f64,
    iters: u32,
}

pub enum SimStore {
    Dense(DenseStore),
    Columns(ColumnStore),
}

impl SimStore {
    /// Dense store initialized by the batch oracle.
    pub fn dense_from_graph(graph: DynamicGraph, c: f64, k: u32, mode: DenseMode) -> Self {
        let q = graph.build_transition();
        let s = batch_simrank(&q, c, k);
        SimStore::Dense(DenseStore {
            graph,
            q,
            s,
            mode,
            damping: c,
            iters: k,
        })
    }

    /// Column store; no matrix is ever allocated.
    pub fn columns_from_graph(graph: DynamicGraph, c: f64, k: u32) -> Self {
        let q = graph.build_transition();
        SimStore::Columns(ColumnStore {
            graph,
            q,
            damping: c,
            iters: k,
        })
    }

    pub fn graph(&self) -> &DynamicGraph {
        match self {
            SimStore::Dense(d) => &d.graph,
            SimStore::Columns(c) => &c.graph,
        }
    }

    /// The incrementally maintained transition matrix.
    pub fn transition(&self) -> &TransitionMatrix {
        match self {
            SimStore::Dense(d) => &d.q,
            SimStore::Columns(c) => &c.q,
        }
    }

    pub fn damping(&self) -> f64 {
        match self {
            SimStore::Dense(d) => d.damping,
            SimStore::Columns(c) => c.damping,
        }
    }

    pub fn iters(&self) -> u32 {
        match self {
            SimStore::Dense(d) => d.iters,
            SimStore::Columns(c) => c.iters,
        }
    }

    pub fn node_count(&self) -> usize {
        self.graph().node_count()
    }

    /// The maintained matrix, if this store keeps one.
    pub fn scores(&self) -> Option<&SimMatrix> {
        match self {
            SimStore::Dense(d) => Some(&d.s),
            SimStore::Columns(_) => None,
        }
    }

    /// Column `x` of the current scores.
    pub fn column(&self, x: NodeId) -> Result<SimColumn, GraphError> {
        let n = self.node_count();
        if x.index() >= n {
            return Err(GraphError::NodeOutOfRange { node: x, nodes: n });
        }
        Ok(match self {
            SimStore::Dense(d) => SimColumn {
                owner: x,
                values: d.s.row(x.index()).to_vec(),
            },
            SimStore::Columns(c) => partial_sim_column(&c.q, x, c.damping, c.iters),
        })
    }

    /// Applies one edge update, keeping graph, transition matrix, and (for
    /// the dense shape) scores consistent.
    pub fn apply_unit_op(
        &mut self,
        op: UpdateOp,
        src: NodeId,
        dst: NodeId,
    ) -> Result<UnitOutcome, GraphError> {
        match self {
            SimStore::Dense(d) => d.apply_unit_op(op, src, dst),
            SimStore::Columns(c) => c.apply_unit_op(op, src, dst),
        }
    }
}

/// Validation shared by both store shapes; returns the case tag an
/// insertion will take.
pub(crate) fn classify(
    graph: &DynamicGraph,
    op: UpdateOp,
    src: NodeId,
    dst: NodeId,
) -> Result<EdgeCaseTag, GraphError> {
    match op {
        UpdateOp::Insert => {
            if src == dst {
                return Err(GraphError::SelfLoop { node: src });
            }
            if graph.has_edge(src, dst) {
                return Err(GraphError::DuplicateEdge { src, dst });
            }
            Ok(match (graph.is_live(src), graph.is_live(dst)) {
                (true, true) => EdgeCaseTag::BothLive,
                (true, false) => EdgeCaseTag::NewSink,
                (false, true) => EdgeCaseTag::NewSource,
                (false, false) => EdgeCaseTag::BothNew,
            })
        }
        UpdateOp::Delete => {
            if graph.has_edge(src, dst) {
                Ok(EdgeCaseTag::BothLive)
            } else {
                Err(GraphError::MissingEdge { src, dst })
            }
        }
    }
}

impl DenseStore {
    fn apply_unit_op(
        &mut self,
        op: UpdateOp,
        src: NodeId,
        dst: NodeId,
    ) -> Result<UnitOutcome, GraphError> {
        let tag = classify(&self.graph, op, src, dst)?;
        let (c, k) = (self.damping, self.iters);
        match tag {
            EdgeCaseTag::BothLive => {
                let upd = update::prepare_unit(
                    &self.q,
                    self.s.row(src.index()),
                    self.s.row(dst.index()),
                    src,
                    dst,
                    c,
                    op,
                )?;
                let (ds, cells) = match self.mode {
                    DenseMode::Full => (update::apply_unit(&self.q, &upd, c, k), None),
                    DenseMode::Pruned => {
                        let aff =
                            update::affected_sets(&self.graph, &self.s, &[src], dst, op, k);
                        let ds = update::apply_unit_pruned(&self.q, &upd, &aff, c, k);
                        let cells = ds.affected_cells();
                        (ds, Some(cells))
                    }
                };
                ds.apply_to(&mut self.s);
                self.mutate_graph(op, src, dst);
                Ok(UnitOutcome {
                    case: tag,
                    affected_cells: cells,
                })
            }
            EdgeCaseTag::NewSink => {
                let bg = growth::grow_sink_border(&self.q, self.s.row(src.index()), src, c);
                let Corner::Single(corner) = bg.corner else {
                    unreachable!("sink growth has a single corner")
                };
                let new_n = self.graph.node_count().max(dst.index() + 1);
                self.s.grow(new_n, 1.0 - c);
                self.s.set_border(dst.index(), &bg.y, corner);
                self.mutate_graph(op, src, dst);
                Ok(UnitOutcome {
                    case: tag,
                    affected_cells: None,
                })
            }
            EdgeCaseTag::NewSource => {
                let (_, ds) =
                    growth::grow_new_source(&self.q, self.s.row(dst.index()), dst, 1, c, k);
                ds.apply_to(&mut self.s);
                let new_n = self.graph.node_count().max(src.index() + 1);
                self.s.grow(new_n, 1.0 - c);
                self.s.set_isolated(src.index(), 1.0 - c);
                self.mutate_graph(op, src, dst);
                Ok(UnitOutcome {
                    case: tag,
                    affected_cells: None,
                })
            }
            EdgeCaseTag::BothNew => {
                let bg = growth::grow_detached(c);
                let Corner::Pair { source, sink } = bg.corner else {
                    unreachable!("detached growth has a pair corner")
                };
                let new_n = self
                    .graph
                    .node_count()
                    .max(src.index() + 1)
                    .max(dst.index() + 1);
                self.s.grow(new_n, 1.0 - c);
                self.s.set_isolated(src.index(), source);
                self.s.set_isolated(dst.index(), sink);
                self.mutate_graph(op, src, dst);
                Ok(UnitOutcome {
                    case: tag,
                    affected_cells: None,
                })
            }
        }
    }

    /// Graph and transition maintenance once the score change is in.
    /// Validation happened up front, so these cannot fail.
    fn mutate_graph(&mut self, op: UpdateOp, src: NodeId, dst: NodeId) {
        match op {
            UpdateOp::Insert => {
                self.graph
                    .insert_edge(src, dst)
                    .expect("validated before scoring");
            }
            UpdateOp::Delete => {
                self.graph
                    .delete_edge(src, dst)
                    .expect("validated before scoring");
            }
        }
        if self.graph.node_count() > self.q.n() {
            self.q.grow(self.graph.node_count());
        }
        self.q
            .refresh_sink_row(dst.index(), self.graph.in_neighbors(dst));
        debug_assert_eq!(self.s.n(), self.graph.node_count());
    }

    pub(crate) fn parts_mut(
        &mut self,
    ) -> (&mut DynamicGraph, &mut TransitionMatrix, &mut SimMatrix) {
        (&mut self.graph, &mut self.q, &mut self.s)
    }

    pub fn mode(&self) -> DenseMode {
        self.mode
    }
}

impl ColumnStore {
    fn apply_unit_op(
        &mut self,
        op: UpdateOp,
        src: NodeId,
        dst: NodeId,
    ) -> Result<UnitOutcome, GraphError> {
        let tag = classify(&self.graph, op, src, dst)?;
        match op {
            UpdateOp::Insert => {
                self.graph.insert_edge(src, dst)?;
            }
            UpdateOp::Delete => {
                self.graph.delete_edge(src, dst)?;
            }
        }
        if self.graph.node_count() > self.q.n() {
            self.q.grow(self.graph.node_count());
        }
        self.q
            .refresh_sink_row(dst.index(), self.graph.in_neighbors(dst));
        Ok(UnitOutcome {
            case: tag,
            affected_cells: None,
        })
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut DynamicGraph, &mut TransitionMatrix) {
        (&mut self.graph, &mut self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol::oracle_tol;
    use alloc::vec::Vec;

    fn fan() -> DynamicGraph {
        DynamicGraph::from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn dense_insert_tracks_oracle() {
        let (c, k) = (0.6, 20);
        let mut store = SimStore::dense_from_graph(fan(), c, k, DenseMode::Full);
        let out = store
            .apply_unit_op(UpdateOp::Insert, NodeId(1), NodeId(2))
            .unwrap();
        assert_eq!(out.case, EdgeCaseTag::BothLive);
        let mut g = fan();
        g.insert_edge(NodeId(1), NodeId(2)).unwrap();
        let oracle = batch_simrank(&g.build_transition(), c, k);
        let diff = store.scores().unwrap().max_abs_diff(&oracle);
        assert!(diff < oracle_tol(c, k), "diff {diff}");
        // Transition matrix kept consistent with a rebuild.
        assert_eq!(*store.transition(), g.build_transition());
    }

    #[test]
    fn growth_cases_allocate_ids() {
        let (c, k) = (0.6, 15);
        let mut store = SimStore::dense_from_graph(fan(), c, k, DenseMode::Full);
        // Fresh sink with a gap: ids 4 and 5 come alive, 4 stays dead.
        store
            .apply_unit_op(UpdateOp::Insert, NodeId(3), NodeId(5))
            .unwrap();
        assert_eq!(store.node_count(), 6);
        let s = store.scores().unwrap();
        assert_eq!(s.get(4, 4), 1.0 - c);
        assert_eq!(s.get(4, 5), 0.0);
        let mut g = fan();
        g.insert_edge(NodeId(3), NodeId(5)).unwrap();
        let oracle = batch_simrank(&g.build_transition(), c, k);
        assert!(store.scores().unwrap().max_abs_diff(&oracle) < oracle_tol(c, k));
    }

    #[test]
    fn column_store_answers_without_matrix() {
        let (c, k) = (0.6, 15);
        let mut store = SimStore::columns_from_graph(fan(), c, k);
        store
            .apply_unit_op(UpdateOp::Insert, NodeId(1), NodeId(2))
            .unwrap();
        assert!(store.scores().is_none());
        let mut g = fan();
        g.insert_edge(NodeId(1), NodeId(2)).unwrap();
        let oracle = batch_simrank(&g.build_transition(), c, k);
        for x in 0..4u32 {
            let col = store.column(NodeId(x)).unwrap();
            let want: Vec<f64> = (0..4).map(|y| oracle.get(y, x as usize)).collect();
            assert!(col.max_abs_diff(&want) < 1e-10);
        }
    }

    #[test]
    fn errors_leave_state_untouched() {
        let (c, k) = (0.6, 10);
        let mut store = SimStore::dense_from_graph(fan(), c, k, DenseMode::Full);
        let before = store.scores().unwrap().clone();
        assert!(store
            .apply_unit_op(UpdateOp::Insert, NodeId(0), NodeId(1))
            .is_err());
        assert!(store
            .apply_unit_op(UpdateOp::Delete, NodeId(3), NodeId(0))
            .is_err());
        assert!(store
            .apply_unit_op(UpdateOp::Insert, NodeId(2), NodeId(2))
            .is_err());
        assert_eq!(store.scores().unwrap().max_abs_diff(&before), 0.0);
        assert_eq!(store.graph().edge_count(), 4);
    }
}
