//! Dense linear algebra for small spin systems: the Jacobi eigensolver that
//! serves both as exact-diagonalization oracle and as the cluster
//! diagonalizer, statevectors, fidelity, Z-moment statistics and exact time
//! propagation.

mod eigen;
mod matrix;
mod state;

pub use eigen::{
    eigh, ground_state, lowest_states, propagate, EigenDecomposition, Propagator,
    HERMITIAN_TOL, MAX_DIM, MAX_SWEEPS, OFF_DIAGONAL_TOL,
};
pub use matrix::{inner, norm, DenseMatrix};
pub use state::{embed_product, fidelity, z_moment_distribution, MomentHistogram, StateVector};
