//! Cluster mean-field eigensolver.
//!
//! A system is split into clusters `A` and `B`. Each cluster is diagonalized
//! after averaging the full Hamiltonian over a state of the other cluster,
//! alternating a few times. The surviving products `|φ_A⟩ ⊗ |φ_B⟩` from all
//! partitions are orthonormalized into a compressed space, and the
//! Hamiltonian projected into that space is diagonalized. Clusters larger
//! than `max_cluster_size` are solved the same way, recursively.

mod config;
mod effective;
mod schmidt;
mod solve;
mod stage;

pub use config::{
    chain_partitions, three_spin_partitions, CmfConfig, InitEnv, Partition, Pruning,
    SubPartitionRule,
};
pub use effective::{build_effective, EffectiveHamiltonian};
pub use schmidt::{projection_residual, schmidt_orthogonalize, CompressedBasis, Provenance};
pub use solve::{
    multilayer_subsolver, solve_cmf, ClusterSolver, CmfResult, Diagnostics, Oracle,
};
pub use stage::{index_label, lineage_label, stage_iterate, LabeledEigenstate, ProductPair};
