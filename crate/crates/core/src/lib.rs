//! Pauli correlation encoding (PCE) for budget-constrained MinCut.
//!
//! Binary node labels are encoded in the signs of Pauli-string expectation
//! values on a small parameterized quantum state. The state is simulated
//! exactly, the relaxed penalty loss is minimized with Nelder-Mead, and the
//! iterative-α schedule drives the relaxed labels toward ±1 until every one
//! of them is saturated.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the benchmark
//! harness and the command line live in the companion `pce` crate.
//!
//! Module map:
//!
//! - [`graph`]: weighted graphs, cut assignments, instance generation
//! - [`encoding`]: Pauli-string families and register sizing
//! - [`quantum`]: brickwork ansatz statevector and Pauli expectations
//! - [`objective`]: constrained loss, β_c heuristic, decoding
//! - [`optimize`]: Nelder-Mead minimizer
//! - [`solver`]: fixed-α and iterative-α PCE
//! - [`oracles`]: exhaustive and simulated-annealing baselines
//! - [`metrics`]: constraint success ratio and binarization

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod encoding;
mod error;
pub mod graph;
pub mod metrics;
pub mod objective;
pub mod optimize;
pub mod oracles;
pub mod quantum;
pub mod solver;

pub use error::{Error, Result};
