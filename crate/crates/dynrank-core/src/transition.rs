//! Backward transition matrix in CSR form.
//!
//! Row `j` holds `1/in_deg(j)` at the (sorted) in-neighbor columns of `j`;
//! a node without in-edges has an empty row. The matrix is row-stochastic on
//! rows of live sinks and is the only linear operator the update machinery
//! applies, so the row-gather kernel here is shared by every code path that
//! must agree bitwise (dense, pruned, and column-at-a-time iterations).

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::DynamicGraph;

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    data: Vec<f64>,
}

impl TransitionMatrix {
    pub fn from_graph(g: &DynamicGraph) -> Self {
        let n = g.node_count();
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::with_capacity(g.edge_count());
        let mut data = Vec::with_capacity(g.edge_count());
        indptr.push(0);
        for j in 0..n {
            let nbrs = g.in_neighbors(crate::graph::NodeId(j as u32));
            if !nbrs.is_empty() {
                let w = 1.0 / nbrs.len() as f64;
                for &s in nbrs {
                    indices.push(s);
                    data.push(w);
                }
            }
            indptr.push(indices.len());
        }
        TransitionMatrix {
            n,
            indptr,
            indices,
            data,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    /// In-degree of `j` as recorded by the matrix (its row length).
    pub fn row_len(&self, j: usize) -> usize {
        self.indptr[j + 1] - self.indptr[j]
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (lo, hi) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[lo..hi], &self.data[lo..hi])
    }

    /// The shared gather kernel: `sum_p Q[i,p] * x[p]`, accumulated in
    /// column order. Every iteration in this crate reaches `Q` through this
    /// function so that restricted (pruned, per-column) evaluations
    /// reproduce the dense ones bit for bit.
    #[inline]
    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let (cols, vals) = self.row(i);
        let mut acc = 0.0;
        for (&c, &w) in cols.iter().zip(vals.iter()) {
            acc += w * x[c as usize];
        }
        acc
    }

    /// `out = Q * x`.
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row_dot(i, x);
        }
    }

    /// `out = Q^T * x`.
    pub fn tr_matvec(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        out.fill(0.0);
        for i in 0..self.n {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            let (cols, vals) = self.row(i);
            for (&c, &w) in cols.iter().zip(vals.iter()) {
                out[c as usize] += w * xi;
            }
        }
    }

    /// Extends the id range; new rows are empty.
    pub fn grow(&mut self, new_n: usize) {
        debug_assert!(new_n >= self.n);
        self.indptr.resize(new_n + 1, *self.indptr.last().unwrap());
        self.n = new_n;
    }

    /// Replaces row `j` after the in-neighborhood of `j` changed. `in_nbrs`
    /// must be sorted; each entry gets weight `1/len`. This is the only
    /// mutation an edge update needs, because inserting or deleting
    /// `(i, j)` touches row `j` alone.
    pub fn refresh_sink_row(&mut self, j: usize, in_nbrs: &[u32]) {
        let (lo, hi) = (self.indptr[j], self.indptr[j + 1]);
        let new_len = in_nbrs.len();
        let w = if new_len == 0 {
            0.0
        } else {
            1.0 / new_len as f64
        };
        self.indices.splice(lo..hi, in_nbrs.iter().copied());
        self.data.splice(lo..hi, core::iter::repeat(w).take(new_len));
        let shift = new_len as isize - (hi - lo) as isize;
        if shift != 0 {
            for p in self.indptr[j + 1..].iter_mut() {
                *p = (*p as isize + shift) as usize;
            }
        }
    }

    /// Sum of each row; live-sink rows must sum to 1 (up to rounding).
    pub fn row_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n];
        for (j, s) in sums.iter_mut().enumerate() {
            let (_, vals) = self.row(j);
            *s = vals.iter().sum();
        }
        sums
    }
}
