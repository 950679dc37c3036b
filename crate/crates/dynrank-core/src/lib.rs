//! Incremental SimRank maintenance over dynamic directed graphs.
//!
//! The crate keeps the truncated SimRank fixed point
//! `S = C * Q * S * Q^T + (1 - C) * I` current while edges arrive and leave,
//! without recomputing the whole matrix. `Q` is the backward transition
//! matrix: row `j` spreads weight `1/in_deg(j)` over the in-neighbors of `j`.
//!
//! Structure:
//!
//! * [`graph`]: the dynamic graph, id allocation, liveness, edge-case tags.
//! * [`transition`]: the sparse `Q` in CSR form, maintained in place.
//! * [`batch`]: the from-scratch oracle and a linear-memory single-column
//!   procedure.
//! * [`update`]: rank-one in-graph edge updates (decomposition, the
//!   `gamma`/`lambda` change characterization, the truncated correction
//!   series, affected-area pruning).
//! * [`growth`]: bordered growth when an endpoint is a fresh node.
//! * [`stream`]: net effect of an update stream and its same-sink blocks.
//! * [`store`]: the maintained state, dense or column-on-demand.
//! * [`columnwise`]: post-update columns without materializing any matrix.
//!
//! Everything here is `no_std` + `alloc`; file formats and the CLI live in
//! the companion crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod batch;
pub mod columnwise;
pub mod graph;
pub mod growth;
pub mod store;
pub mod stream;
pub mod tol;
pub mod transition;
pub mod update;

pub use batch::{batch_simrank, partial_sim_column, SimColumn, SimMatrix};
pub use graph::{DynamicGraph, EdgeCaseTag, GraphError, NodeId};
pub use store::SimStore;
pub use transition::TransitionMatrix;
pub use update::{DeltaS, RankOneUpdate, UpdateOp};
