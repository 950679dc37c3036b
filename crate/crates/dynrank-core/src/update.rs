//! Rank-one edge updates between live nodes.
//!
//! Inserting or deleting `(i, j)` changes only row `j` of the transition
//! matrix, so the new matrix is `Q + u v^T` with `u` supported on `j` alone.
//! The induced score change solves a discrete Sylvester equation whose
//! driving term is captured by a single vector `gamma` and a scalar
//! `lambda`; truncating its series at `K` steps gives a one-sided
//! accumulation `M` with `delta S = M + M^T` and tail error at most
//! `C^(K+1)` entrywise.
//!
//! Everything is written in block form over `delta` same-sink sources; the
//! single-edge entry points are the `delta = 1` instance of the same code,
//! so the unit and batched paths cannot drift apart.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::batch::SimMatrix;
use crate::graph::{DynamicGraph, GraphError, NodeId};
use crate::tol::fabs;
use crate::transition::TransitionMatrix;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum UpdateOp {
    Insert,
    Delete,
}

impl fmt::Display for UpdateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UpdateOp::Insert => "insert",
            UpdateOp::Delete => "delete",
        })
    }
}

/// Sparse vector as strictly increasing `(index, value)` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVec {
    entries: Vec<(u32, f64)>,
}

impl SparseVec {
    pub fn from_sorted(entries: Vec<(u32, f64)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        SparseVec { entries }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: u32) -> f64 {
        match self.entries.binary_search_by_key(&i, |e| e.0) {
            Ok(p) => self.entries[p].1,
            Err(_) => 0.0,
        }
    }

    /// `sum_i self[i] * x[i]`, accumulated in index order.
    pub fn dot(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for &(i, v) in &self.entries {
            acc += v * x[i as usize];
        }
        acc
    }

    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for &(i, v) in &self.entries {
            out[i as usize] = v;
        }
        out
    }
}

/// A prepared rank-one update: the `(u, v)` factors of the transition
/// change plus the `(gamma, lambda)` pair characterizing the score change.
/// `u` always has its single nonzero at the sink.
#[derive(Clone, Debug)]
pub struct RankOneUpdate {
    pub op: UpdateOp,
    pub sink: NodeId,
    pub sources: Vec<NodeId>,
    pub u: SparseVec,
    pub v: SparseVec,
    pub gamma: Vec<f64>,
    pub lambda: f64,
}

impl RankOneUpdate {
    /// The single nonzero of `u`.
    pub fn u_scale(&self) -> f64 {
        self.u.entries[0].1
    }

    /// Number of same-sink edges the update carries (1 for a unit update).
    pub fn width(&self) -> usize {
        self.sources.len()
    }
}

fn check_insert_block(
    q: &TransitionMatrix,
    sources: &[NodeId],
    sink: NodeId,
) -> Result<(), GraphError> {
    let (cols, _) = q.row(sink.index());
    for &i in sources {
        if i == sink {
            return Err(GraphError::SelfLoop { node: i });
        }
        if cols.binary_search(&i.0).is_ok() {
            return Err(GraphError::DuplicateEdge { src: i, dst: sink });
        }
    }
    Ok(())
}

fn check_delete_block(
    q: &TransitionMatrix,
    sources: &[NodeId],
    sink: NodeId,
) -> Result<(), GraphError> {
    let (cols, _) = q.row(sink.index());
    for &i in sources {
        if cols.binary_search(&i.0).is_err() {
            return Err(GraphError::MissingEdge { src: i, dst: sink });
        }
    }
    Ok(())
}

/// `(u, v)` for adding `delta` edges `{(i, sink) : i in sources}`.
///
/// With `d = in_deg(sink)` before the update: `d = 0` gives `u = e_sink`,
/// `v = e_I / delta`; otherwise `u = (delta / (d + delta)) e_sink`,
/// `v = e_I / delta - Q[sink, :]^T`, where `e_I` is the indicator sum over
/// the sources. Sources must be distinct, sorted, and absent from the row.
pub fn decompose_insert_block(
    q: &TransitionMatrix,
    sources: &[NodeId],
    sink: NodeId,
) -> Result<(SparseVec, SparseVec), GraphError> {
    check_insert_block(q, sources, sink)?;
    let d = q.row_len(sink.index());
    let dd = sources.len() as f64;
    let share = 1.0 / dd;
    let u_val = if d == 0 {
        1.0
    } else {
        dd / (d as f64 + dd)
    };
    let u = SparseVec::from_sorted(vec![(sink.0, u_val)]);
    let mut entries: Vec<(u32, f64)> = Vec::with_capacity(sources.len() + d);
    if d == 0 {
        entries.extend(sources.iter().map(|i| (i.0, share)));
    } else {
        // Merge the source indicators with the negated old row.
        let (cols, vals) = q.row(sink.index());
        let mut s_it = sources.iter().peekable();
        for (&c, &w) in cols.iter().zip(vals.iter()) {
            while let Some(&&i) = s_it.peek() {
                if i.0 < c {
                    entries.push((i.0, share));
                    s_it.next();
                } else {
                    break;
                }
            }
            entries.push((c, -w));
        }
        entries.extend(s_it.map(|i| (i.0, share)));
    }
    Ok((u, SparseVec::from_sorted(entries)))
}

/// `(u, v)` for removing `delta` edges `{(i, sink) : i in sources}`.
///
/// With `d = in_deg(sink)` before the update: `d = delta` gives
/// `u = e_sink`, `v = -e_I / delta`; otherwise
/// `u = (delta / (d - delta)) e_sink`, `v = Q[sink, :]^T - e_I / delta`.
pub fn decompose_delete_block(
    q: &TransitionMatrix,
    sources: &[NodeId],
    sink: NodeId,
) -> Result<(SparseVec, SparseVec), GraphError> {
    check_delete_block(q, sources, sink)?;
    let d = q.row_len(sink.index());
    let delta = sources.len();
    debug_assert!(d >= delta);
    let dd = delta as f64;
    let share = 1.0 / dd;
    let u_val = if d == delta {
        1.0
    } else {
        dd / (d as f64 - dd)
    };
    let u = SparseVec::from_sorted(vec![(sink.0, u_val)]);
    let entries: Vec<(u32, f64)> = if d == delta {
        sources.iter().map(|i| (i.0, -share)).collect()
    } else {
        let (cols, vals) = q.row(sink.index());
        cols.iter()
            .zip(vals.iter())
            .map(|(&c, &w)| {
                if sources.binary_search_by_key(&c, |i| i.0).is_ok() {
                    (c, w - share)
                } else {
                    (c, w)
                }
            })
            .collect()
    };
    Ok((u, SparseVec::from_sorted(entries)))
}

/// Single-edge insertion factors.
pub fn decompose_insert(
    q: &TransitionMatrix,
    src: NodeId,
    sink: NodeId,
) -> Result<(SparseVec, SparseVec), GraphError> {
    decompose_insert_block(q, &[src], sink)
}

/// Single-edge deletion factors.
pub fn decompose_delete(
    q: &TransitionMatrix,
    src: NodeId,
    sink: NodeId,
) -> Result<(SparseVec, SparseVec), GraphError> {
    decompose_delete_block(q, &[src], sink)
}

/// `(gamma, lambda)` for a block of `delta` same-sink updates.
///
/// `source_col_sum` is the sum of the old score columns of the sources,
/// `source_total` is the old score mass on sources x sources, and
/// `sink_col` is the old score column of the sink. All quantities are taken
/// before the update; the sink's in-degree is read off the (pre-update)
/// transition row.
pub fn compute_gamma_lambda_block(
    q: &TransitionMatrix,
    source_col_sum: &[f64],
    source_total: f64,
    sink_col: &[f64],
    sink: NodeId,
    delta: usize,
    c: f64,
    op: UpdateOp,
) -> (Vec<f64>, f64) {
    let n = q.n();
    let j = sink.index();
    let d = q.row_len(j);
    let dd = delta as f64;
    let df = d as f64;
    let s_jj = sink_col[j];
    let mut w = vec![0.0; n];
    q.matvec(source_col_sum, &mut w);
    let qj_dot = q.row_dot(j, source_col_sum);
    let lambda =
        source_total / (dd * dd) + s_jj / c - (2.0 / dd) * qj_dot - 1.0 / c + 1.0;
    let mut gamma = vec![0.0; n];
    match op {
        UpdateOp::Insert if d == 0 => {
            for (g, &wx) in gamma.iter_mut().zip(w.iter()) {
                *g = wx / dd;
            }
            gamma[j] += source_total / (2.0 * dd * dd);
        }
        UpdateOp::Insert => {
            let f = dd / (df + dd);
            let coef = lambda * dd / (2.0 * (df + dd)) + 1.0 / c - 1.0;
            for (x, g) in gamma.iter_mut().enumerate() {
                let mut t = w[x] / dd - sink_col[x] / c;
                if x == j {
                    t += coef;
                }
                *g = f * t;
            }
        }
        UpdateOp::Delete if d == delta => {
            for (g, &wx) in gamma.iter_mut().zip(w.iter()) {
                *g = -(wx / dd);
            }
            gamma[j] += source_total / (2.0 * dd * dd);
        }
        UpdateOp::Delete => {
            debug_assert!(d > delta);
            let f = dd / (df - dd);
            let coef = lambda * dd / (2.0 * (df - dd)) - 1.0 / c + 1.0;
            for (x, g) in gamma.iter_mut().enumerate() {
                let mut t = sink_col[x] / c - w[x] / dd;
                if x == j {
                    t += coef;
                }
                *g = f * t;
            }
        }
    }
    (gamma, lambda)
}

/// Single-edge `(gamma, lambda)` from the two old columns.
pub fn compute_gamma_lambda(
    q: &TransitionMatrix,
    src_col: &[f64],
    sink_col: &[f64],
    src: NodeId,
    sink: NodeId,
    c: f64,
    op: UpdateOp,
) -> (Vec<f64>, f64) {
    compute_gamma_lambda_block(
        q,
        src_col,
        src_col[src.index()],
        sink_col,
        sink,
        1,
        c,
        op,
    )
}

/// Decomposition plus change characterization for a same-sink block.
pub fn prepare_block(
    q: &TransitionMatrix,
    source_col_sum: &[f64],
    source_total: f64,
    sink_col: &[f64],
    sources: &[NodeId],
    sink: NodeId,
    c: f64,
    op: UpdateOp,
) -> Result<RankOneUpdate, GraphError> {
    let (u, v) = match op {
        UpdateOp::Insert => decompose_insert_block(q, sources, sink)?,
        UpdateOp::Delete => decompose_delete_block(q, sources, sink)?,
    };
    let (gamma, lambda) = compute_gamma_lambda_block(
        q,
        source_col_sum,
        source_total,
        sink_col,
        sink,
        sources.len(),
        c,
        op,
    );
    Ok(RankOneUpdate {
        op,
        sink,
        sources: sources.to_vec(),
        u,
        v,
        gamma,
        lambda,
    })
}

/// Single-edge preparation from the two old columns.
pub fn prepare_unit(
    q: &TransitionMatrix,
    src_col: &[f64],
    sink_col: &[f64],
    src: NodeId,
    sink: NodeId,
    c: f64,
    op: UpdateOp,
) -> Result<RankOneUpdate, GraphError> {
    prepare_block(
        q,
        src_col,
        src_col[src.index()],
        sink_col,
        &[src],
        sink,
        c,
        op,
    )
}

/// One propagation step of the corrected operator:
/// `out[a] = scale * (Q[a, :] . x + [a == pivot] * u_scale * (v . x))`.
///
/// With `scale = C` this advances the left series vector, with `scale = 1`
/// the right one. The pruned and column paths evaluate the identical
/// expression on a subset of rows, which keeps all three paths bit-equal
/// where they overlap.
pub fn step_corrected(
    q: &TransitionMatrix,
    v: &SparseVec,
    u_scale: f64,
    pivot: usize,
    scale: f64,
    x: &[f64],
    out: &mut [f64],
) {
    let vdot = v.dot(x);
    for (a, o) in out.iter_mut().enumerate() {
        let mut t = q.row_dot(a, x);
        if a == pivot {
            t += u_scale * vdot;
        }
        *o = scale * t;
    }
}

/// Dense square buffer; row-major.
#[derive(Clone, Debug)]
pub struct DenseMat {
    pub n: usize,
    pub values: Vec<f64>,
}

impl DenseMat {
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.n + b]
    }
}

/// The one-sided truncated correction `M = sum_{t=0..k} xi_t eta_t^T` with
/// `xi_0 = C e_sink`, `eta_0 = gamma`, advanced by [`step_corrected`]
/// against the pre-update matrix. `delta S = M + M^T`.
pub fn accumulate_correction(
    q_old: &TransitionMatrix,
    upd: &RankOneUpdate,
    c: f64,
    k: u32,
) -> DenseMat {
    let n = q_old.n();
    let j = upd.sink.index();
    let u_scale = upd.u_scale();
    let mut m = vec![0.0; n * n];
    let mut xi = vec![0.0; n];
    xi[j] = c;
    let mut eta = upd.gamma.clone();
    let mut xi_next = vec![0.0; n];
    let mut eta_next = vec![0.0; n];
    for step in 0..=k {
        if step > 0 {
            step_corrected(q_old, &upd.v, u_scale, j, c, &xi, &mut xi_next);
            step_corrected(q_old, &upd.v, u_scale, j, 1.0, &eta, &mut eta_next);
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
    DenseMat { n, values: m }
}

/// Score change of a rank-one update, dense form.
pub fn apply_unit(
    q_old: &TransitionMatrix,
    upd: &RankOneUpdate,
    c: f64,
    k: u32,
) -> DeltaS {
    let m = accumulate_correction(q_old, upd, c, k);
    let n = m.n;
    let mut values = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            values[a * n + b] = m.values[a * n + b] + m.values[b * n + a];
        }
    }
    DeltaS::Dense { n, values }
}

/// Index sets outside which the truncated correction is exactly zero.
///
/// `seed_cols` collects the support of the driving vector: out-neighbors
/// (in the pre-update graph) of every node similar to a source, the numeric
/// support of the sink's old column when the residual row term is present,
/// and the sink itself. Each later step expands both sets through
/// out-neighbors of everything reached so far, taken in the graph that
/// still contains the touched edges (post-update for insertions,
/// pre-update for deletions); that orientation also absorbs the float
/// residue a deletion's decomposed cancellation can leave at the pivot.
#[derive(Clone, Debug)]
pub struct AffectedArea {
    pub f1: Vec<u32>,
    pub f2: Vec<u32>,
    /// Row seed: the sink alone.
    pub seed_rows: Vec<u32>,
    /// Column seed: `f1 | f2 | {sink}`.
    pub seed_cols: Vec<u32>,
    /// `(rows, cols)` per step, truncated once either side dies out.
    pub steps: Vec<(Vec<u32>, Vec<u32>)>,
}

impl AffectedArea {
    /// Upper bound on affected cells of the one-sided correction.
    pub fn cell_bound(&self) -> usize {
        let mut cells = self.seed_rows.len() * self.seed_cols.len();
        for (a, b) in &self.steps {
            cells += a.len() * b.len();
        }
        cells
    }
}

fn expand<F: Fn(u32) -> bool>(
    g: &DynamicGraph,
    acc: &BTreeSet<u32>,
    sources_hit_sink: &F,
    sink: u32,
) -> BTreeSet<u32> {
    let mut out = BTreeSet::new();
    for &x in acc {
        out.extend(g.out_neighbors(NodeId(x)).iter().copied());
        if sources_hit_sink(x) {
            out.insert(sink);
        }
    }
    out
}

/// Affected index sets for a (possibly block) rank-one update. `g` and
/// `s_old` are the pre-update graph and scores.
pub fn affected_sets(
    g: &DynamicGraph,
    s_old: &SimMatrix,
    sources: &[NodeId],
    sink: NodeId,
    op: UpdateOp,
    k: u32,
) -> AffectedArea {
    let n = g.node_count();
    let delta = sources.len();
    let d = g.in_degree(sink);
    let mut f1 = BTreeSet::new();
    for &i in sources {
        let col = s_old.row(i.index());
        for (y, &v) in col.iter().enumerate().take(n) {
            if v != 0.0 {
                f1.extend(g.out_neighbors(NodeId(y as u32)).iter().copied());
            }
        }
    }
    let row_term = match op {
        UpdateOp::Insert => d > 0,
        UpdateOp::Delete => d > delta,
    };
    let mut f2 = BTreeSet::new();
    if row_term {
        for (y, &v) in s_old.row(sink.index()).iter().enumerate().take(n) {
            if v != 0.0 {
                f2.insert(y as u32);
            }
        }
    }
    let mut seed_cols: BTreeSet<u32> = f1.union(&f2).copied().collect();
    seed_cols.insert(sink.0);
    // Steps expand in the graph that contains the touched edges: for an
    // insertion that is the post-update graph (pre-update out-neighbors
    // plus source -> sink), for a deletion the pre-update graph itself.
    let virtual_edge = |x: u32| {
        op == UpdateOp::Insert && sources.binary_search_by_key(&x, |i| i.0).is_ok()
    };
    let mut rows_acc: BTreeSet<u32> = [sink.0].into_iter().collect();
    let mut cols_acc = seed_cols.clone();
    let mut steps = Vec::new();
    for _ in 1..=k {
        let a = expand(g, &rows_acc, &virtual_edge, sink.0);
        let b = expand(g, &cols_acc, &virtual_edge, sink.0);
        if a.is_empty() || b.is_empty() {
            break;
        }
        rows_acc.extend(a.iter().copied());
        cols_acc.extend(b.iter().copied());
        steps.push((a.into_iter().collect(), b.into_iter().collect()));
    }
    AffectedArea {
        f1: f1.into_iter().collect(),
        f2: f2.into_iter().collect(),
        seed_rows: vec![sink.0],
        seed_cols: seed_cols.into_iter().collect(),
        steps,
    }
}

/// Score change evaluated only on the affected sets; sparse result.
///
/// Computes the identical expressions as the dense path restricted to the
/// predicted rows and columns, so wherever both paths write, the values
/// agree bit for bit, and outside the sets the dense path is exactly zero.
pub fn apply_unit_pruned(
    q_old: &TransitionMatrix,
    upd: &RankOneUpdate,
    aff: &AffectedArea,
    c: f64,
    k: u32,
) -> DeltaS {
    let n = q_old.n();
    let j = upd.sink.index();
    let u_scale = upd.u_scale();
    let mut xi = vec![0.0; n];
    let mut eta = vec![0.0; n];
    let mut xi_next = vec![0.0; n];
    let mut eta_next = vec![0.0; n];
    xi[j] = c;
    for (x, (e, &g)) in eta.iter_mut().zip(upd.gamma.iter()).enumerate() {
        debug_assert!(
            g == 0.0 || aff.seed_cols.binary_search(&(x as u32)).is_ok(),
            "driving vector support escapes the column seed"
        );
        *e = g;
    }
    let mut m: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    let xj = xi[j];
    for &b in &aff.seed_cols {
        let p = xj * eta[b as usize];
        if p != 0.0 {
            m.insert((j as u32, b), p);
        }
    }
    let mut rows_prev: &[u32] = &aff.seed_rows;
    let mut cols_prev: &[u32] = &aff.seed_cols;
    for (rows, cols) in aff.steps.iter().take(k as usize) {
        let vdot_xi = upd.v.dot(&xi);
        let vdot_eta = upd.v.dot(&eta);
        for &a in rows {
            let a = a as usize;
            let mut t = q_old.row_dot(a, &xi);
            if a == j {
                t += u_scale * vdot_xi;
            }
            xi_next[a] = c * t;
        }
        for &b in cols {
            let b = b as usize;
            let mut t = q_old.row_dot(b, &eta);
            if b == j {
                t += u_scale * vdot_eta;
            }
            eta_next[b] = 1.0 * t;
        }
        // Clear the previous supports so the swapped-in buffers are clean.
        for &a in rows_prev {
            xi[a as usize] = 0.0;
        }
        for &b in cols_prev {
            eta[b as usize] = 0.0;
        }
        core::mem::swap(&mut xi, &mut xi_next);
        core::mem::swap(&mut eta, &mut eta_next);
        rows_prev = rows;
        cols_prev = cols;
        for &a in rows {
            let xa = xi[a as usize];
            if xa == 0.0 {
                continue;
            }
            for &b in cols {
                let p = xa * eta[b as usize];
                if p != 0.0 {
                    *m.entry((a, b)).or_insert(0.0) += p;
                }
            }
        }
    }
    let mut cells: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for (&(a, b), &val) in &m {
        *cells.entry((a, b)).or_insert(0.0) += val;
        *cells.entry((b, a)).or_insert(0.0) += val;
    }
    DeltaS::Pairs { n, cells }
}

/// A symmetric score change, dense or as explicit cells.
#[derive(Clone, Debug)]
pub enum DeltaS {
    Dense { n: usize, values: Vec<f64> },
    Pairs {
        n: usize,
        cells: BTreeMap<(u32, u32), f64>,
    },
}

impl DeltaS {
    pub fn n(&self) -> usize {
        match self {
            DeltaS::Dense { n, .. } | DeltaS::Pairs { n, .. } => *n,
        }
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        match self {
            DeltaS::Dense { n, values } => values[a * n + b],
            DeltaS::Pairs { cells, .. } => {
                cells.get(&(a as u32, b as u32)).copied().unwrap_or(0.0)
            }
        }
    }

    /// Number of explicitly touched cells (nonzero cells for the dense
    /// form); this is the affected area a pruned update reports.
    pub fn affected_cells(&self) -> usize {
        match self {
            DeltaS::Dense { values, .. } => values.iter().filter(|v| **v != 0.0).count(),
            DeltaS::Pairs { cells, .. } => cells.len(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            DeltaS::Dense { values, .. } => {
                values.iter().fold(0.0, |w, &v| if fabs(v) > w { fabs(v) } else { w })
            }
            DeltaS::Pairs { cells, .. } => cells
                .values()
                .fold(0.0, |w, &v| if fabs(v) > w { fabs(v) } else { w }),
        }
    }

    /// Largest entrywise gap against another change of the same size.
    pub fn max_abs_diff(&self, other: &DeltaS) -> f64 {
        let n = self.n();
        assert_eq!(n, other.n());
        let mut worst = 0.0;
        for a in 0..n {
            for b in 0..n {
                let d = fabs(self.get(a, b) - other.get(a, b));
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Adds the change into a score matrix of the same size.
    pub fn apply_to(&self, s: &mut SimMatrix) {
        assert_eq!(self.n(), s.n());
        match self {
            DeltaS::Dense { n, values } => {
                for a in 0..*n {
                    for b in 0..*n {
                        let v = values[a * n + b];
                        if v != 0.0 {
                            s.add(a, b, v);
                        }
                    }
                }
            }
            DeltaS::Pairs { cells, .. } => {
                for (&(a, b), &v) in cells {
                    s.add(a as usize, b as usize, v);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::batch::batch_simrank;
    use crate::graph::DynamicGraph;

    #[test]
    fn sparse_vec_basics() {
        let v = SparseVec::from_sorted(vec![(1, 2.0), (3, -1.0)]);
        assert_eq!(v.get(1), 2.0);
        assert_eq!(v.get(2), 0.0);
        assert_eq!(v.dot(&[10.0, 20.0, 30.0, 40.0]), 0.0);
        assert_eq!(v.to_dense(4), vec![0.0, 2.0, 0.0, -1.0]);
    }

    #[test]
    fn insert_decomposition_reconstructs_new_row() {
        // 0 -> 2, 1 -> 2; insert 3 -> 2.
        let mut g = DynamicGraph::from_edges(4, [(0, 2), (1, 2)]).unwrap();
        let q = g.build_transition();
        let (u, v) = decompose_insert(&q, NodeId(3), NodeId(2)).unwrap();
        g.insert_edge(NodeId(3), NodeId(2)).unwrap();
        let q_new = g.build_transition();
        let us = u.get(2);
        for col in 0..4u32 {
            let old = q.row(2)
                .0
                .binary_search(&col)
                .map(|p| q.row(2).1[p])
                .unwrap_or(0.0);
            let rebuilt = old + us * v.get(col);
            let target = q_new
                .row(2)
                .0
                .binary_search(&col)
                .map(|p| q_new.row(2).1[p])
                .unwrap_or(0.0);
            assert!(fabs(rebuilt - target) < 1e-15, "col {col}");
        }
    }

    #[test]
    fn isolated_source_over_parentless_sink_gives_half_self_score() {
        // With fresh-start scores (1 - C) I and an edgeless source, gamma
        // for an insertion into an in-degree-0 sink is ((1 - C)/2) e_sink:
        // the source's column cannot propagate through any transition row.
        let g = DynamicGraph::from_edges(3, [(0, 1)]).unwrap();
        let q = g.build_transition();
        let c = 0.8;
        let s = SimMatrix::identity_scaled(3, c, 0);
        let (gamma, _) = compute_gamma_lambda(
            &q,
            s.row(2),
            s.row(0),
            NodeId(2),
            NodeId(0),
            c,
            UpdateOp::Insert,
        );
        for (x, &gv) in gamma.iter().enumerate() {
            let want = if x == 0 { (1.0 - c) / 2.0 } else { 0.0 };
            assert!(fabs(gv - want) < 1e-15, "entry {x}");
        }
    }

    #[test]
    fn delete_is_the_inverse_of_insert() {
        let g = DynamicGraph::from_edges(4, [(0, 2), (1, 2), (2, 3), (3, 0)]).unwrap();
        let c = 0.6;
        let k = 25;
        let q = g.build_transition();
        let s0 = batch_simrank(&q, c, k);

        let mut g2 = g.clone();
        g2.insert_edge(NodeId(1), NodeId(3)).unwrap();
        let upd = prepare_unit(&q, s0.row(1), s0.row(3), NodeId(1), NodeId(3), c, UpdateOp::Insert)
            .unwrap();
        let ds = apply_unit(&q, &upd, c, k);
        let mut s1 = s0.clone();
        ds.apply_to(&mut s1);

        // Now delete the same edge from the updated state.
        let q2 = g2.build_transition();
        let upd2 =
            prepare_unit(&q2, s1.row(1), s1.row(3), NodeId(1), NodeId(3), c, UpdateOp::Delete)
                .unwrap();
        let ds2 = apply_unit(&q2, &upd2, c, k);
        let mut s2 = s1.clone();
        ds2.apply_to(&mut s2);
        assert!(s2.max_abs_diff(&s0) < crate::tol::oracle_tol(c, k));
    }
}
