//! Cluster mean-field eigensolver for Pauli spin Hamiltonians, with an
//! exact-diagonalization oracle and small-register state-preparation tools.

pub mod dense;
pub mod engine;
pub mod error;
pub mod pauli;
pub mod report;
pub mod stateprep;

pub use error::{CmfError, Result};
