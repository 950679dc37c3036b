//! Update streams: net effect, same-sink blocks, and block application.
//!
//! A stream of signed edge updates is first netted per edge (a +/- pair
//! cancels); the net insertions and deletions are then grouped into blocks
//! that share a sink, because all edges into one sink form a single
//! rank-one or growth step regardless of how many there are. Blocks are
//! applied deterministically: every deletion block before any insertion
//! block, blocks in ascending sink id, and within a sink the fresh-source
//! block before the live-source block. Source liveness is re-checked when
//! a block is applied, since earlier blocks may have changed it.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{
    data_lines, parse_id, DynamicGraph, EdgeCaseTag, GraphError, NodeId, ParseError,
    ParseErrorKind,
};
use crate::growth;
use crate::store::{DenseMode, SimStore, UnitOutcome};
use crate::update::{self, UpdateOp};

/// One signed edge update.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamOp {
    pub op: UpdateOp,
    pub src: NodeId,
    pub dst: NodeId,
}

/// An ordered stream of signed edge updates.
#[derive(Clone, Debug, Default)]
pub struct UpdateStream {
    pub ops: Vec<StreamOp>,
}

/// Parses the update-stream format: `+|- src dst` per line, `#` comments.
pub fn parse_update_stream(text: &str) -> Result<UpdateStream, ParseError> {
    let mut ops = Vec::new();
    for (line, t) in data_lines(text) {
        let fields: Vec<&str> = t.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(ParseError {
                line,
                kind: ParseErrorKind::FieldCount {
                    found: fields.len(),
                    expected: 3,
                },
            });
        }
        let op = match fields[0] {
            "+" => UpdateOp::Insert,
            "-" => UpdateOp::Delete,
            _ => {
                return Err(ParseError {
                    line,
                    kind: ParseErrorKind::BadOp,
                })
            }
        };
        let (src, dst) = match (parse_id(fields[1]), parse_id(fields[2])) {
            (Some(s), Some(d)) => (NodeId(s), NodeId(d)),
            _ => {
                return Err(ParseError {
                    line,
                    kind: ParseErrorKind::BadNodeId,
                })
            }
        };
        ops.push(StreamOp { op, src, dst });
    }
    Ok(UpdateStream { ops })
}

/// Why a stream's net effect is inconsistent with the current graph.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StreamError {
    /// Net count per edge must stay in {-1, 0, +1}.
    NetCount { src: NodeId, dst: NodeId, net: i64 },
    /// Net insertion of an edge that is already present.
    InsertPresent { src: NodeId, dst: NodeId },
    /// Net deletion of an edge that is not present.
    DeleteAbsent { src: NodeId, dst: NodeId },
    /// Self-loops are never valid.
    SelfLoop { node: NodeId },
    /// Structural failure while applying a block.
    Graph(GraphError),
}

impl fmt::Display for StreamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("invalid stream: ")?;
        match self {
            StreamError::NetCount { src, dst, net } => {
                write!(f, "edge {src} -> {dst} nets {net}, expected -1, 0, or +1")
            }
            StreamError::InsertPresent { src, dst } => {
                write!(f, "net insertion of existing edge {src} -> {dst}")
            }
            StreamError::DeleteAbsent { src, dst } => {
                write!(f, "net deletion of absent edge {src} -> {dst}")
            }
            StreamError::SelfLoop { node } => write!(f, "self-loop on node {node}"),
            StreamError::Graph(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for StreamError {}

impl From<GraphError> for StreamError {
    fn from(e: GraphError) -> Self {
        StreamError::Graph(e)
    }
}

/// Nets the stream against the current membership of `g`. Returns the
/// sorted net insertions and deletions as `(src, dst)` pairs. An edge whose
/// updates cancel is dropped without a membership check.
pub fn net_updates(
    stream: &UpdateStream,
    g: &DynamicGraph,
) -> Result<(Vec<(NodeId, NodeId)>, Vec<(NodeId, NodeId)>), StreamError> {
    let mut counts: BTreeMap<(u32, u32), i64> = BTreeMap::new();
    for op in &stream.ops {
        if op.src == op.dst {
            return Err(StreamError::SelfLoop { node: op.src });
        }
        let slot = counts.entry((op.src.0, op.dst.0)).or_insert(0);
        *slot += match op.op {
            UpdateOp::Insert => 1,
            UpdateOp::Delete => -1,
        };
    }
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (&(s, d), &net) in &counts {
        let (src, dst) = (NodeId(s), NodeId(d));
        match net {
            0 => {}
            1 => {
                if g.has_edge(src, dst) {
                    return Err(StreamError::InsertPresent { src, dst });
                }
                plus.push((src, dst));
            }
            -1 => {
                if !g.has_edge(src, dst) {
                    return Err(StreamError::DeleteAbsent { src, dst });
                }
                minus.push((src, dst));
            }
            net => return Err(StreamError::NetCount { src, dst, net }),
        }
    }
    Ok((plus, minus))
}

/// A group of net updates sharing one sink and one op. `case` is the
/// structural class under the graph the block was partitioned against;
/// application re-derives it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SinkBlock {
    pub sink: NodeId,
    pub sources: Vec<NodeId>,
    pub op: UpdateOp,
    pub case: EdgeCaseTag,
}

impl SinkBlock {
    /// Number of edges in the block.
    pub fn delta(&self) -> usize {
        self.sources.len()
    }
}

fn insert_case(sink_live: bool, sources_live: bool) -> EdgeCaseTag {
    match (sources_live, sink_live) {
        (true, true) => EdgeCaseTag::BothLive,
        (true, false) => EdgeCaseTag::NewSink,
        (false, true) => EdgeCaseTag::NewSource,
        (false, false) => EdgeCaseTag::BothNew,
    }
}

/// Groups net updates into deterministically ordered sink blocks:
/// deletions first, then insertions, each in ascending sink id; within one
/// sink, the fresh-source block precedes the live-source block.
pub fn partition_blocks(
    plus: &[(NodeId, NodeId)],
    minus: &[(NodeId, NodeId)],
    g: &DynamicGraph,
) -> Vec<SinkBlock> {
    let mut by_sink_minus: BTreeMap<u32, Vec<NodeId>> = BTreeMap::new();
    for &(s, d) in minus {
        by_sink_minus.entry(d.0).or_default().push(s);
    }
    let mut by_sink_plus: BTreeMap<u32, Vec<NodeId>> = BTreeMap::new();
    for &(s, d) in plus {
        by_sink_plus.entry(d.0).or_default().push(s);
    }
    let mut blocks = Vec::new();
    for (sink, mut sources) in by_sink_minus {
        sources.sort_unstable();
        blocks.push(SinkBlock {
            sink: NodeId(sink),
            sources,
            op: UpdateOp::Delete,
            case: EdgeCaseTag::BothLive,
        });
    }
    for (sink, sources) in by_sink_plus {
        let sink = NodeId(sink);
        let sink_live = g.is_live(sink);
        let (mut fresh, mut live): (Vec<NodeId>, Vec<NodeId>) =
            sources.into_iter().partition(|&s| !g.is_live(s));
        fresh.sort_unstable();
        live.sort_unstable();
        if !fresh.is_empty() {
            blocks.push(SinkBlock {
                sink,
                sources: fresh,
                op: UpdateOp::Insert,
                case: insert_case(sink_live, false),
            });
        }
        if !live.is_empty() {
            blocks.push(SinkBlock {
                sink,
                sources: live,
                op: UpdateOp::Insert,
                case: insert_case(sink_live, true),
            });
        }
    }
    blocks
}

/// Applies one sink block to the store. Liveness is re-evaluated against
/// the store's current graph; a block whose sources meanwhile split into
/// both classes is divided (fresh first). Returns the blocks as actually
/// applied, with their final case tags.
pub fn apply_block(
    block: &SinkBlock,
    store: &mut SimStore,
    c: f64,
    k: u32,
) -> Result<Vec<SinkBlock>, StreamError> {
    debug_assert!(!block.sources.is_empty());
    if block.op == UpdateOp::Delete {
        let b = SinkBlock {
            case: EdgeCaseTag::BothLive,
            ..block.clone()
        };
        apply_uniform(&b, store, c, k)?;
        return Ok(vec![b]);
    }
    let g = store.graph();
    let sink_live = g.is_live(block.sink);
    let (mut fresh, mut live): (Vec<NodeId>, Vec<NodeId>) = block
        .sources
        .iter()
        .copied()
        .partition(|&s| !g.is_live(s));
    fresh.sort_unstable();
    live.sort_unstable();
    let mut applied = Vec::new();
    if !fresh.is_empty() {
        let b = SinkBlock {
            sink: block.sink,
            sources: fresh,
            op: UpdateOp::Insert,
            case: insert_case(sink_live, false),
        };
        apply_uniform(&b, store, c, k)?;
        applied.push(b);
    }
    if !live.is_empty() {
        // The sink may have just come alive through the fresh block.
        let sink_live = store.graph().is_live(block.sink);
        let b = SinkBlock {
            sink: block.sink,
            sources: live,
            op: UpdateOp::Insert,
            case: insert_case(sink_live, true),
        };
        apply_uniform(&b, store, c, k)?;
        applied.push(b);
    }
    Ok(applied)
}

/// Applies a liveness-uniform block.
fn apply_uniform(
    block: &SinkBlock,
    store: &mut SimStore,
    c: f64,
    k: u32,
) -> Result<(), StreamError> {
    match store {
        SimStore::Columns(cs) => {
            let (graph, q) = cs.parts_mut();
            mutate_edges(graph, q, block)?;
            Ok(())
        }
        SimStore::Dense(d) => {
            let mode = d.mode();
            let (graph, q, s) = d.parts_mut();
            let sink = block.sink;
            let delta = block.delta();
            match block.case {
                EdgeCaseTag::BothLive => {
                    let n = s.n();
                    let mut sum = vec![0.0; n];
                    let mut total = 0.0;
                    for &i in &block.sources {
                        let col = s.row(i.index());
                        for (sv, &cv) in sum.iter_mut().zip(col.iter()) {
                            *sv += cv;
                        }
                    }
                    for &a in &block.sources {
                        for &b in &block.sources {
                            total += s.get(a.index(), b.index());
                        }
                    }
                    let upd = update::prepare_block(
                        &*q,
                        &sum,
                        total,
                        s.row(sink.index()),
                        &block.sources,
                        sink,
                        c,
                        block.op,
                    )?;
                    let ds = match mode {
                        DenseMode::Full => update::apply_unit(&*q, &upd, c, k),
                        DenseMode::Pruned => {
                            let aff = update::affected_sets(
                                &*graph,
                                &*s,
                                &block.sources,
                                sink,
                                block.op,
                                k,
                            );
                            update::apply_unit_pruned(&*q, &upd, &aff, c, k)
                        }
                    };
                    ds.apply_to(s);
                    mutate_edges(graph, q, block)?;
                }
                EdgeCaseTag::NewSink => {
                    let n = s.n();
                    let mut sum = vec![0.0; n];
                    let mut total = 0.0;
                    for &i in &block.sources {
                        let col = s.row(i.index());
                        for (sv, &cv) in sum.iter_mut().zip(col.iter()) {
                            *sv += cv;
                        }
                    }
                    for &a in &block.sources {
                        for &b in &block.sources {
                            total += s.get(a.index(), b.index());
                        }
                    }
                    let bg = growth::grow_new_sink(&*q, &sum, total, delta, c);
                    let growth::Corner::Single(corner) = bg.corner else {
                        unreachable!("sink growth has a single corner")
                    };
                    let new_n = n.max(sink.index() + 1);
                    s.grow(new_n, 1.0 - c);
                    s.set_border(sink.index(), &bg.y, corner);
                    mutate_edges(graph, q, block)?;
                }
                EdgeCaseTag::NewSource => {
                    let (_, ds) =
                        growth::grow_new_source(&*q, s.row(sink.index()), sink, delta, c, k);
                    ds.apply_to(s);
                    let mut new_n = s.n();
                    for &i in &block.sources {
                        new_n = new_n.max(i.index() + 1);
                    }
                    s.grow(new_n, 1.0 - c);
                    for &i in &block.sources {
                        s.set_isolated(i.index(), 1.0 - c);
                    }
                    mutate_edges(graph, q, block)?;
                }
                EdgeCaseTag::BothNew => {
                    let (src_diag, sink_diag) = growth::detached_block_corners(delta, c);
                    let mut new_n = s.n().max(sink.index() + 1);
                    for &i in &block.sources {
                        new_n = new_n.max(i.index() + 1);
                    }
                    s.grow(new_n, 1.0 - c);
                    for &i in &block.sources {
                        s.set_isolated(i.index(), src_diag);
                    }
                    s.set_isolated(sink.index(), sink_diag);
                    mutate_edges(graph, q, block)?;
                }
            }
            debug_assert_eq!(s.n(), graph.node_count());
            Ok(())
        }
    }
}

/// Structural part of a block: graph edges plus the one transition row.
fn mutate_edges(
    graph: &mut DynamicGraph,
    q: &mut crate::transition::TransitionMatrix,
    block: &SinkBlock,
) -> Result<(), StreamError> {
    for &i in &block.sources {
        match block.op {
            UpdateOp::Insert => {
                graph.insert_edge(i, block.sink)?;
            }
            UpdateOp::Delete => {
                graph.delete_edge(i, block.sink)?;
            }
        }
    }
    if graph.node_count() > q.n() {
        q.grow(graph.node_count());
    }
    q.refresh_sink_row(block.sink.index(), graph.in_neighbors(block.sink));
    Ok(())
}

/// Summary of one batched stream application.
#[derive(Clone, Debug)]
pub struct BsrSummary {
    pub net_insertions: usize,
    pub net_deletions: usize,
    /// Blocks as partitioned up front.
    pub planned: Vec<SinkBlock>,
    /// Blocks as actually applied (after liveness re-splitting).
    pub applied: Vec<SinkBlock>,
}

/// Nets, partitions, and applies a whole stream against the store.
pub fn inc_bsr(
    stream: &UpdateStream,
    store: &mut SimStore,
    c: f64,
    k: u32,
) -> Result<BsrSummary, StreamError> {
    let (plus, minus) = net_updates(stream, store.graph())?;
    let planned = partition_blocks(&plus, &minus, store.graph());
    let mut applied = Vec::new();
    for block in &planned {
        applied.extend(apply_block(block, store, c, k)?);
    }
    Ok(BsrSummary {
        net_insertions: plus.len(),
        net_deletions: minus.len(),
        planned,
        applied,
    })
}

/// Applies the stream one op at a time, in order, without netting.
pub fn replay_units(
    stream: &UpdateStream,
    store: &mut SimStore,
) -> Result<Vec<UnitOutcome>, GraphError> {
    let mut outcomes = Vec::with_capacity(stream.ops.len());
    for op in &stream.ops {
        outcomes.push(store.apply_unit_op(op.op, op.src, op.dst)?);
    }
    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream_of(text: &str) -> UpdateStream {
        parse_update_stream(text).unwrap()
    }

    #[test]
    fn parse_and_net() {
        let g = DynamicGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let st = stream_of("# c\n+ 0 2\n- 1 2\n+ 2 1\n- 2 1\n");
        let (plus, minus) = net_updates(&st, &g).unwrap();
        assert_eq!(plus, vec![(NodeId(0), NodeId(2))]);
        assert_eq!(minus, vec![(NodeId(1), NodeId(2))]);
    }

    #[test]
    fn net_rejections() {
        let g = DynamicGraph::from_edges(3, [(0, 1)]).unwrap();
        let double = stream_of("+ 0 2\n+ 0 2\n");
        assert!(matches!(
            net_updates(&double, &g),
            Err(StreamError::NetCount { net: 2, .. })
        ));
        let present = stream_of("+ 0 1\n");
        assert!(matches!(
            net_updates(&present, &g),
            Err(StreamError::InsertPresent { .. })
        ));
        let absent = stream_of("- 1 0\n");
        assert!(matches!(
            net_updates(&absent, &g),
            Err(StreamError::DeleteAbsent { .. })
        ));
        let loops = stream_of("+ 1 1\n");
        assert!(matches!(
            net_updates(&loops, &g),
            Err(StreamError::SelfLoop { .. })
        ));
    }

    #[test]
    fn partition_orders_blocks() {
        // Graph: 0 -> 1 -> 2; stream nets to deletes into 1 and inserts
        // into sinks 2 (live+fresh sources) and 3 (fresh sink).
        let g = DynamicGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let st = stream_of("+ 0 2\n+ 5 2\n- 0 1\n+ 1 3\n");
        let (plus, minus) = net_updates(&st, &g).unwrap();
        let blocks = partition_blocks(&plus, &minus, &g);
        let shape: Vec<(u32, usize, UpdateOp, EdgeCaseTag)> = blocks
            .iter()
            .map(|b| (b.sink.0, b.delta(), b.op, b.case))
            .collect();
        assert_eq!(
            shape,
            vec![
                (1, 1, UpdateOp::Delete, EdgeCaseTag::BothLive),
                (2, 1, UpdateOp::Insert, EdgeCaseTag::NewSource),
                (2, 1, UpdateOp::Insert, EdgeCaseTag::BothLive),
                (3, 1, UpdateOp::Insert, EdgeCaseTag::NewSink),
            ]
        );
    }

    #[test]
    fn batched_stream_tracks_oracle() {
        use crate::store::DenseMode;
        use crate::tol::oracle_tol;
        let (c, k) = (0.6, 25);
        let g = DynamicGraph::from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let st = stream_of("+ 1 2\n- 0 1\n+ 3 5\n+ 2 5\n");
        let mut batched = SimStore::dense_from_graph(g.clone(), c, k, DenseMode::Full);
        inc_bsr(&st, &mut batched, c, k).unwrap();

        // Oracle: fresh batch on the final graph.
        let mut gf = g.clone();
        gf.insert_edge(NodeId(1), NodeId(2)).unwrap();
        gf.delete_edge(NodeId(0), NodeId(1)).unwrap();
        gf.insert_edge(NodeId(3), NodeId(5)).unwrap();
        gf.insert_edge(NodeId(2), NodeId(5)).unwrap();
        let oracle = crate::batch::batch_simrank(&gf.build_transition(), c, k);
        let diff = batched.scores().unwrap().max_abs_diff(&oracle);
        assert!(diff < oracle_tol(c, k), "batched vs oracle {diff}");
    }
}
