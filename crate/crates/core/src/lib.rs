//! Quantum speed limits from state-space geometry and multipartite
//! entanglement on small qubit registers.
// `!(x >= 0.0)` style checks are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod entangle;
pub mod error;
pub mod evolve;
pub mod hamiltonian;
pub mod linalg;
pub mod metrics;
pub mod oracle;
pub mod qstate;
pub mod selftest;
pub mod sweeps;

pub use error::{Error, Result};
