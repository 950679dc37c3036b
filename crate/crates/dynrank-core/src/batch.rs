//! From-scratch truncated SimRank and the linear-memory column procedure.
//!
//! The truncated scores are defined by `S_0 = (1 - C) I` and
//! `S_{t+1} = C * Q * S_t * Q^T + (1 - C) I`; entries increase monotonically
//! in `t` toward the fixed point, and the tail beyond `K` steps is bounded
//! by `C^(K+1)` entrywise. `batch_simrank` is the oracle every incremental
//! path is tested against; `partial_sim_column` produces one column in
//! `O(K (m + n))` time and `O(K n)` memory, which is what the column store
//! and the column-at-a-time update path build on.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::NodeId;
use crate::tol::fabs;
use crate::transition::TransitionMatrix;

/// Dense symmetric score matrix with the parameters it was built under.
#[derive(Clone, Debug)]
pub struct SimMatrix {
    n: usize,
    damping: f64,
    iters: u32,
    data: Vec<f64>,
}

impl SimMatrix {
    /// `(1 - C) I`, the zero-iteration scores.
    pub fn identity_scaled(n: usize, c: f64, k: u32) -> Self {
        let mut data = vec![0.0; n * n];
        for a in 0..n {
            data[a * n + a] = 1.0 - c;
        }
        SimMatrix {
            n,
            damping: c,
            iters: k,
            data,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }

    pub fn iters(&self) -> u32 {
        self.iters
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.n + b]
    }

    #[inline]
    pub fn set_sym(&mut self, a: usize, b: usize, v: f64) {
        self.data[a * self.n + b] = v;
        self.data[b * self.n + a] = v;
    }

    #[inline]
    pub fn add(&mut self, a: usize, b: usize, dv: f64) {
        self.data[a * self.n + b] += dv;
    }

    /// Row `a`; by symmetry also column `a`.
    pub fn row(&self, a: usize) -> &[f64] {
        &self.data[a * self.n..(a + 1) * self.n]
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    /// Largest entrywise gap against `other` (same shape required).
    pub fn max_abs_diff(&self, other: &SimMatrix) -> f64 {
        assert_eq!(self.n, other.n);
        crate::tol::max_abs_diff(&self.data, &other.data)
    }

    /// Extends to `new_n` ids. New rows and columns are zero except the
    /// diagonal, which gets `diag_fill` (the self-similarity of a node with
    /// no in-edges). Old entries are moved, not recomputed, so the old
    /// block is preserved bit for bit.
    pub fn grow(&mut self, new_n: usize, diag_fill: f64) {
        debug_assert!(new_n >= self.n);
        if new_n == self.n {
            return;
        }
        let old_n = self.n;
        let mut data = vec![0.0; new_n * new_n];
        for a in 0..old_n {
            data[a * new_n..a * new_n + old_n]
                .copy_from_slice(&self.data[a * old_n..(a + 1) * old_n]);
        }
        for a in old_n..new_n {
            data[a * new_n + a] = diag_fill;
        }
        self.n = new_n;
        self.data = data;
    }

    /// Zeroes row and column `x` and pins the diagonal, the state of a node
    /// that currently has no in-edges and no live similarity.
    pub fn set_isolated(&mut self, x: usize, diag: f64) {
        let n = self.n;
        for b in 0..n {
            self.data[x * n + b] = 0.0;
            self.data[b * n + x] = 0.0;
        }
        self.data[x * n + x] = diag;
    }

    /// Writes a bordered column: row and column `x` get `border` over the
    /// old ids and `corner` on the diagonal.
    pub fn set_border(&mut self, x: usize, border: &[f64], corner: f64) {
        let n = self.n;
        for (b, &v) in border.iter().enumerate() {
            self.data[x * n + b] = v;
            self.data[b * n + x] = v;
        }
        self.data[x * n + x] = corner;
    }
}

/// Runs `k` truncation steps and returns the scores.
///
/// Two row-major passes per step: `T = Q * S` by row accumulation, then
/// `S' = C * T * Q^T + (1 - C) I` computed on the upper triangle and
/// mirrored, so symmetry is exact by construction. Cost per step is
/// `O(m n)`; memory is the two `n^2` buffers.
pub fn batch_simrank(q: &TransitionMatrix, c: f64, k: u32) -> SimMatrix {
    let n = q.n();
    let mut s = SimMatrix::identity_scaled(n, c, k);
    let mut t = vec![0.0; n * n];
    for _ in 0..k {
        for a in 0..n {
            let trow = &mut t[a * n..(a + 1) * n];
            trow.fill(0.0);
            let (cols, vals) = q.row(a);
            for (&p, &w) in cols.iter().zip(vals.iter()) {
                let srow = s.row(p as usize);
                for (tv, sv) in trow.iter_mut().zip(srow.iter()) {
                    *tv += w * sv;
                }
            }
        }
        for a in 0..n {
            let trow = &t[a * n..(a + 1) * n];
            for b in a..n {
                let mut v = c * q.row_dot(b, trow);
                if a == b {
                    v += 1.0 - c;
                }
                s.set_sym(a, b, v);
            }
        }
    }
    s
}

/// One column of the score matrix.
#[derive(Clone, Debug)]
pub struct SimColumn {
    pub owner: NodeId,
    pub values: Vec<f64>,
}

impl SimColumn {
    pub fn max_abs_diff(&self, other: &[f64]) -> f64 {
        crate::tol::max_abs_diff(&self.values, other)
    }
}

/// Column `query` of the `k`-truncated scores without any `n^2` buffer.
///
/// Forward pass stores `x_t = (Q^T)^t e_query` for `t = 0..k`; the backward
/// pass folds them as `y <- x_{k-t} + C * Q * y`, which reproduces the
/// truncated series exactly (same associativity as the dense recurrence up
/// to the final `1 - C` scaling).
pub fn partial_sim_column(q: &TransitionMatrix, query: NodeId, c: f64, k: u32) -> SimColumn {
    let n = q.n();
    assert!(query.index() < n, "query node out of range");
    let k = k as usize;
    let mut powers: Vec<Vec<f64>> = Vec::with_capacity(k + 1);
    let mut e = vec![0.0; n];
    e[query.index()] = 1.0;
    powers.push(e);
    for t in 0..k {
        let mut next = vec![0.0; n];
        q.tr_matvec(&powers[t], &mut next);
        powers.push(next);
    }
    let mut y = powers[k].clone();
    let mut tmp = vec![0.0; n];
    for t in 1..=k {
        q.matvec(&y, &mut tmp);
        let base = &powers[k - t];
        for ((yv, &bv), &tv) in y.iter_mut().zip(base.iter()).zip(tmp.iter()) {
            *yv = bv + c * tv;
        }
    }
    for v in y.iter_mut() {
        *v *= 1.0 - c;
    }
    SimColumn {
        owner: query,
        values: y,
    }
}

/// Entrywise check that `b` dominates `a` up to `slack`; the truncated
/// scores are monotone in the iteration count.
pub fn dominates(a: &SimMatrix, b: &SimMatrix, slack: f64) -> bool {
    a.n == b.n
        && a.data
            .iter()
            .zip(b.data.iter())
            .all(|(&x, &y)| y + slack >= x)
}

/// Symmetry defect; exact zero for anything `batch_simrank` produces.
pub fn symmetry_defect(s: &SimMatrix) -> f64 {
    let mut worst = 0.0;
    for a in 0..s.n {
        for b in (a + 1)..s.n {
            let d = fabs(s.get(a, b) - s.get(b, a));
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}
