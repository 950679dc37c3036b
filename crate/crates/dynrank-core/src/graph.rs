//! Dynamic directed graph with dense ids and liveness-tagged insertions.
//!
//! Ids are dense `0..n`. Inserting an edge whose endpoint id is `>= n` grows
//! the id range; nodes are never removed, so an id stays valid once
//! allocated. A node is "live" while it has at least one incident edge;
//! liveness decides which structural case an insertion falls into, which in
//! turn decides how the similarity state is updated.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::transition::TransitionMatrix;

/// Dense node index. Display and parsing treat it as a plain integer.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

/// Structural class of an insertion `(src, dst)`, decided by endpoint
/// liveness immediately before the edge is added.
///
/// * `BothLive`: in-graph update, handled by a rank-one change of the
///   transition matrix.
/// * `NewSink`: `dst` is fresh, so the state grows by a bordered column.
/// * `NewSource`: `src` is fresh; the border is trivial but the old block
///   shifts because the sink's in-degree changes.
/// * `BothNew`: a detached two-node component; closed form.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EdgeCaseTag {
    BothLive,
    NewSink,
    NewSource,
    BothNew,
}

impl fmt::Display for EdgeCaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EdgeCaseTag::BothLive => "both-live",
            EdgeCaseTag::NewSink => "new-sink",
            EdgeCaseTag::NewSource => "new-source",
            EdgeCaseTag::BothNew => "both-new",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GraphError {
    /// The edge is already present; the edge set is a set.
    DuplicateEdge { src: NodeId, dst: NodeId },
    /// Deletion of an edge that is not present.
    MissingEdge { src: NodeId, dst: NodeId },
    /// Self-loops are outside the similarity model and are rejected.
    SelfLoop { node: NodeId },
    /// A node id at or beyond the current id range where an existing node
    /// was required.
    NodeOutOfRange { node: NodeId, nodes: usize },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::DuplicateEdge { src, dst } => {
                write!(f, "edge {src} -> {dst} already present")
            }
            GraphError::MissingEdge { src, dst } => {
                write!(f, "edge {src} -> {dst} not present")
            }
            GraphError::SelfLoop { node } => write!(f, "self-loop on node {node}"),
            GraphError::NodeOutOfRange { node, nodes } => {
                write!(f, "node {node} out of range (graph has {nodes} ids)")
            }
        }
    }
}

impl core::error::Error for GraphError {}

/// Directed graph as twin sorted adjacency lists.
///
/// Both directions are kept so that in-degrees (transition rows) and
/// out-neighbor expansion (affected-area propagation) are each O(degree).
#[derive(Clone, Debug, Default)]
pub struct DynamicGraph {
    in_nbrs: Vec<Vec<u32>>,
    out_nbrs: Vec<Vec<u32>>,
    edges: usize,
}

impl DynamicGraph {
    /// Empty graph over ids `0..n`.
    pub fn new(n: usize) -> Self {
        DynamicGraph {
            in_nbrs: vec![Vec::new(); n],
            out_nbrs: vec![Vec::new(); n],
            edges: 0,
        }
    }

    /// Builds from an edge list over ids `0..n`. Fails on duplicates,
    /// self-loops, and ids `>= n`.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self, GraphError> {
        let mut g = DynamicGraph::new(n);
        for (s, d) in edges {
            let (s, d) = (NodeId(s), NodeId(d));
            if s.index() >= n {
                return Err(GraphError::NodeOutOfRange { node: s, nodes: n });
            }
            if d.index() >= n {
                return Err(GraphError::NodeOutOfRange { node: d, nodes: n });
            }
            g.insert_edge(s, d)?;
        }
        Ok(g)
    }

    /// Number of allocated ids (live or not).
    pub fn node_count(&self) -> usize {
        self.in_nbrs.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// A node is live while at least one edge touches it.
    pub fn is_live(&self, v: NodeId) -> bool {
        let i = v.index();
        i < self.node_count() && (!self.in_nbrs[i].is_empty() || !self.out_nbrs[i].is_empty())
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_nbrs.get(v.index()).map_or(0, Vec::len)
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_nbrs.get(v.index()).map_or(0, Vec::len)
    }

    /// Sorted in-neighbors of `v` (sources of edges into `v`).
    pub fn in_neighbors(&self, v: NodeId) -> &[u32] {
        self.in_nbrs.get(v.index()).map_or(&[], Vec::as_slice)
    }

    /// Sorted out-neighbors of `v` (sinks of edges out of `v`).
    pub fn out_neighbors(&self, v: NodeId) -> &[u32] {
        self.out_nbrs.get(v.index()).map_or(&[], Vec::as_slice)
    }

    pub fn has_edge(&self, src: NodeId, dst: NodeId) -> bool {
        self.in_nbrs
            .get(dst.index())
            .is_some_and(|row| row.binary_search(&src.0).is_ok())
    }

    fn ensure_node(&mut self, v: NodeId) {
        if v.index() >= self.node_count() {
            self.in_nbrs.resize(v.index() + 1, Vec::new());
            self.out_nbrs.resize(v.index() + 1, Vec::new());
        }
    }

    /// Adds `src -> dst`, growing the id range if an endpoint is new, and
    /// reports which structural case applied (liveness is sampled before the
    /// edge lands).
    pub fn insert_edge(&mut self, src: NodeId, dst: NodeId) -> Result<EdgeCaseTag, GraphError> {
        if src == dst {
            return Err(GraphError::SelfLoop { node: src });
        }
        if self.has_edge(src, dst) {
            return Err(GraphError::DuplicateEdge { src, dst });
        }
        let tag = match (self.is_live(src), self.is_live(dst)) {
            (true, true) => EdgeCaseTag::BothLive,
            (true, false) => EdgeCaseTag::NewSink,
            (false, true) => EdgeCaseTag::NewSource,
            (false, false) => EdgeCaseTag::BothNew,
        };
        self.ensure_node(src);
        self.ensure_node(dst);
        let row = &mut self.in_nbrs[dst.index()];
        let pos = row.binary_search(&src.0).unwrap_err();
        row.insert(pos, src.0);
        let row = &mut self.out_nbrs[src.index()];
        let pos = row.binary_search(&dst.0).unwrap_err();
        row.insert(pos, dst.0);
        self.edges += 1;
        Ok(tag)
    }

    /// Removes `src -> dst`. Ids are never deallocated, so a node left
    /// without edges simply goes dead.
    pub fn delete_edge(&mut self, src: NodeId, dst: NodeId) -> Result<(), GraphError> {
        let missing = GraphError::MissingEdge { src, dst };
        let row = self.in_nbrs.get_mut(dst.index()).ok_or(missing)?;
        let pos = row.binary_search(&src.0).map_err(|_| missing)?;
        row.remove(pos);
        let row = &mut self.out_nbrs[src.index()];
        let pos = row
            .binary_search(&dst.0)
            .expect("adjacency lists out of sync");
        row.remove(pos);
        self.edges -= 1;
        Ok(())
    }

    /// Backward transition matrix of the current graph.
    pub fn build_transition(&self) -> TransitionMatrix {
        TransitionMatrix::from_graph(self)
    }
}

/// Error from the text formats, tagged with the 1-based source line.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ParseErrorKind {
    /// Wrong number of fields on a data line.
    FieldCount { found: usize, expected: usize },
    /// A field that should be a node id did not parse as one.
    BadNodeId,
    /// An op field that is neither `+` nor `-`.
    BadOp,
    /// The declared node count does not cover every id in the file.
    NodeCountTooSmall { need: usize, given: usize },
    /// Structural rejection while building the graph (duplicate, self-loop).
    Graph(GraphError),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: ", self.line)?;
        match self.kind {
            ParseErrorKind::FieldCount { found, expected } => {
                write!(f, "expected {expected} fields, found {found}")
            }
            ParseErrorKind::BadNodeId => f.write_str("node id is not a non-negative integer"),
            ParseErrorKind::BadOp => f.write_str("op must be '+' or '-'"),
            ParseErrorKind::NodeCountTooSmall { need, given } => {
                write!(f, "node count {given} too small for id {}", need - 1)
            }
            ParseErrorKind::Graph(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ParseError {}

/// Lines of non-comment text split into whitespace fields, with original
/// line numbers. Shared by the edge-list and update-stream formats.
pub(crate) fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            None
        } else {
            Some((i + 1, t))
        }
    })
}

pub(crate) fn parse_id(field: &str) -> Option<u32> {
    field.parse::<u32>().ok()
}

/// Parses the edge-list format: one `src<TAB>dst` pair per line, `#` starts
/// a comment. The node count is `1 + max id` unless `nodes` extends it.
pub fn parse_edge_list(text: &str, nodes: Option<usize>) -> Result<DynamicGraph, ParseError> {
    let mut edges: Vec<(usize, u32, u32)> = Vec::new();
    let mut max_id: Option<u32> = None;
    for (line, t) in data_lines(text) {
        let mut fields = t.split_whitespace();
        let a = fields.next();
        let b = fields.next();
        let extra = fields.count();
        let (a, b) = match (a, b, extra) {
            (Some(a), Some(b), 0) => (a, b),
            _ => {
                let found = t.split_whitespace().count();
                return Err(ParseError {
                    line,
                    kind: ParseErrorKind::FieldCount { found, expected: 2 },
                });
            }
        };
        let (src, dst) = match (parse_id(a), parse_id(b)) {
            (Some(s), Some(d)) => (s, d),
            _ => {
                return Err(ParseError {
                    line,
                    kind: ParseErrorKind::BadNodeId,
                })
            }
        };
        max_id = Some(max_id.map_or(src.max(dst), |m| m.max(src).max(dst)));
        edges.push((line, src, dst));
    }
    let need = max_id.map_or(0, |m| m as usize + 1);
    let n = match nodes {
        Some(given) if given < need => {
            return Err(ParseError {
                // Report against the first line that uses an overflowing id.
                line: edges
                    .iter()
                    .find(|(_, s, d)| *s as usize >= given || *d as usize >= given)
                    .map_or(0, |(l, _, _)| *l),
                kind: ParseErrorKind::NodeCountTooSmall { need, given },
            });
        }
        Some(given) => given,
        None => need,
    };
    let mut g = DynamicGraph::new(n);
    for (line, s, d) in edges {
        g.insert_edge(NodeId(s), NodeId(d)).map_err(|e| ParseError {
            line,
            kind: ParseErrorKind::Graph(e),
        })?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_tags_follow_liveness() {
        let mut g = DynamicGraph::new(2);
        assert_eq!(g.insert_edge(NodeId(0), NodeId(1)), Ok(EdgeCaseTag::BothNew));
        assert_eq!(g.insert_edge(NodeId(0), NodeId(2)), Ok(EdgeCaseTag::NewSink));
        assert_eq!(
            g.insert_edge(NodeId(3), NodeId(1)),
            Ok(EdgeCaseTag::NewSource)
        );
        assert_eq!(
            g.insert_edge(NodeId(3), NodeId(2)),
            Ok(EdgeCaseTag::BothLive)
        );
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 4);
    }

    #[test]
    fn structural_rejections() {
        let mut g = DynamicGraph::new(3);
        g.insert_edge(NodeId(0), NodeId(1)).unwrap();
        assert_eq!(
            g.insert_edge(NodeId(0), NodeId(1)),
            Err(GraphError::DuplicateEdge {
                src: NodeId(0),
                dst: NodeId(1)
            })
        );
        assert_eq!(
            g.insert_edge(NodeId(2), NodeId(2)),
            Err(GraphError::SelfLoop { node: NodeId(2) })
        );
        assert_eq!(
            g.delete_edge(NodeId(1), NodeId(0)),
            Err(GraphError::MissingEdge {
                src: NodeId(1),
                dst: NodeId(0)
            })
        );
    }

    #[test]
    fn deletion_leaves_dead_id_in_place() {
        let mut g = DynamicGraph::new(2);
        g.insert_edge(NodeId(0), NodeId(1)).unwrap();
        g.delete_edge(NodeId(0), NodeId(1)).unwrap();
        assert_eq!(g.node_count(), 2);
        assert!(!g.is_live(NodeId(0)));
        assert!(!g.is_live(NodeId(1)));
    }

    #[test]
    fn edge_list_parsing() {
        let g = parse_edge_list("# comment\n0\t1\n1\t2\n", None).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert!(g.has_edge(NodeId(1), NodeId(2)));

        let g = parse_edge_list("0\t1\n", Some(5)).unwrap();
        assert_eq!(g.node_count(), 5);

        let err = parse_edge_list("0\t1\n2\t2\n", None).unwrap_err();
        assert_eq!(err.line, 2);

        let err = parse_edge_list("0\tx\n", None).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::BadNodeId);

        let err = parse_edge_list("0\t7\n", Some(3)).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::NodeCountTooSmall { .. }));
    }
}
