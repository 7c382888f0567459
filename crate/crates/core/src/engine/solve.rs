use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{expand_partitions, CmfConfig, Partition};
use super::effective::{build_effective, EffectiveHamiltonian};
use super::schmidt::{schmidt_orthogonalize, CompressedBasis};
use super::stage::{stage_iterate, LabeledEigenstate, ProductPair};
use crate::dense::{fidelity, ground_state, lowest_states, EigenDecomposition, StateVector};
use crate::error::{CmfError, Result};
use crate::pauli::SpinHamiltonian;

/// How many cluster Hamiltonians were diagonalized, by cluster size.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Dense diagonalizations of reduced Hamiltonians.
    pub dense_solves: BTreeMap<usize, usize>,
    /// Reduced Hamiltonians too large for a dense solve, handled by recursion.
    pub recursive_solves: BTreeMap<usize, usize>,
}

impl Diagnostics {
    pub fn merge(&mut self, other: &Diagnostics) {
        for (k, v) in &other.dense_solves {
            *self.dense_solves.entry(*k).or_default() += v;
        }
        for (k, v) in &other.recursive_solves {
            *self.recursive_solves.entry(*k).or_default() += v;
        }
    }

    pub fn dense_total(&self) -> usize {
        self.dense_solves.values().sum()
    }
}

/// Produces the lowest eigenstates of cluster Hamiltonians: dense at or below
/// `max_cluster_size`, a nested CMF solve above it.
pub struct ClusterSolver<'a> {
    config: &'a CmfConfig,
    depth: usize,
    diagnostics: Diagnostics,
}

impl<'a> ClusterSolver<'a> {
    pub fn new(config: &'a CmfConfig, depth: usize) -> Self {
        Self {
            config,
            depth,
            diagnostics: Diagnostics::default(),
        }
    }

    pub fn diagnostics(&self) -> &Diagnostics {
        &self.diagnostics
    }

    pub fn into_diagnostics(self) -> Diagnostics {
        self.diagnostics
    }

    pub fn lowest(&mut self, h: &SpinHamiltonian, count: usize) -> Result<Vec<(f64, StateVector)>> {
        let n = h.n_sites();
        if n <= self.config.max_cluster_size {
            *self.diagnostics.dense_solves.entry(n).or_default() += 1;
            return lowest_states(h, count);
        }
        *self.diagnostics.recursive_solves.entry(n).or_default() += 1;
        let (states, diag) = multilayer_inner(h, self.config, count, self.depth + 1)?;
        self.diagnostics.merge(&diag);
        Ok(states
            .into_iter()
            .map(|s| (s.energy, s.state))
            .collect())
    }
}

/// Exact reference for fidelity and energy comparisons.
#[derive(Debug, Clone)]
pub struct Oracle {
    pub energy: f64,
    pub state: StateVector,
}

impl Oracle {
    pub fn exact(h: &SpinHamiltonian) -> Result<Self> {
        let (energy, state) = ground_state(h)?;
        Ok(Self { energy, state })
    }
}

/// Outcome of a CMF solve.
#[derive(Debug, Clone)]
pub struct CmfResult {
    pub energy: f64,
    pub state: StateVector,
    pub oracle_energy: Option<f64>,
    pub fidelity_vs_oracle: Option<f64>,
    pub diagnostics: Diagnostics,
    pub basis_dim: usize,
    /// Products pooled before orthogonalization, per partition run.
    pub products_per_partition: Vec<usize>,
    pub partitions: Vec<Partition>,
    pub effective: EffectiveHamiltonian,
    pub spectrum: EigenDecomposition,
}

impl CmfResult {
    /// The `k`-th eigenvector of the effective Hamiltonian lifted to the full
    /// space, with its energy.
    pub fn excited_state(&self, k: usize) -> Result<(f64, StateVector)> {
        if k >= self.spectrum.dim() {
            return Err(CmfError::EmptySelection {
                requested: k + 1,
                available: self.spectrum.dim(),
            });
        }
        let state = self.effective.basis.lift(&self.spectrum.vectors[k])?;
        Ok((self.spectrum.values[k], state))
    }

    pub fn relative_energy_error(&self) -> Option<f64> {
        self.oracle_energy
            .map(|e| (self.energy - e).abs() / e.abs().max(f64::MIN_POSITIVE))
    }

    /// Basis indices ordered by descending weight in the CMF ground state.
    pub fn overlap_order(&self) -> Vec<usize> {
        let weights: Vec<f64> = self.spectrum.vectors[0].iter().map(|c| c.norm_sqr()).collect();
        let mut order: Vec<usize> = (0..weights.len()).collect();
        order.sort_by(|&i, &j| weights[j].total_cmp(&weights[i]).then(i.cmp(&j)));
        order
    }

    /// Ground state of `H_eff` restricted to its `k` most heavily weighted
    /// basis vectors.
    pub fn truncated(&self, k: usize) -> Result<(f64, StateVector)> {
        if k == 0 || k > self.basis_dim {
            return Err(CmfError::EmptySelection {
                requested: k,
                available: self.basis_dim,
            });
        }
        let order = self.overlap_order();
        self.effective.restricted_ground_state(&order[..k])
    }
}

struct Pipeline {
    effective: EffectiveHamiltonian,
    spectrum: EigenDecomposition,
    products_per_partition: Vec<usize>,
    diagnostics: Diagnostics,
}

fn run_pipeline(
    h: &SpinHamiltonian,
    partitions: &[Partition],
    config: &CmfConfig,
    depth: usize,
) -> Result<Pipeline> {
    let per_partition: Vec<Result<(Vec<ProductPair>, Diagnostics)>> = partitions
        .par_iter()
        .enumerate()
        .map(|(idx, p)| {
            let mut solver = ClusterSolver::new(config, depth);
            let pairs = stage_iterate(h, p, config, &mut solver).map_err(|e| e.with_partition(idx))?;
            Ok((pairs, solver.into_diagnostics()))
        })
        .collect();

    let mut diagnostics = Diagnostics::default();
    let mut products = Vec::new();
    let mut tags = Vec::new();
    let mut products_per_partition = Vec::new();
    for (idx, outcome) in per_partition.into_iter().enumerate() {
        let (pairs, diag) = outcome?;
        diagnostics.merge(&diag);
        products_per_partition.push(pairs.len());
        for pair in pairs {
            products.push(pair.product_state()?);
            tags.push((idx, pair.a.label(), pair.b.label()));
        }
    }
    let mut basis: CompressedBasis = schmidt_orthogonalize(&products, config.schmidt_tol)?;
    for prov in &mut basis.provenance {
        let (idx, a, b) = &tags[prov.source];
        prov.partition = Some(*idx);
        prov.a_label = Some(a.clone());
        prov.b_label = Some(b.clone());
    }
    let effective = build_effective(h, basis)?;
    let spectrum = effective.diagonalize()?;
    Ok(Pipeline {
        effective,
        spectrum,
        products_per_partition,
        diagnostics,
    })
}

/// A lone site cannot be split; its compressed space is the full space.
fn single_site_pipeline(h: &SpinHamiltonian) -> Result<Pipeline> {
    let basis = schmidt_orthogonalize(&[StateVector::basis(1, 0), StateVector::basis(1, 1)], 0.0)?;
    let effective = build_effective(h, basis)?;
    let spectrum = effective.diagonalize()?;
    Ok(Pipeline {
        effective,
        spectrum,
        products_per_partition: Vec::new(),
        diagnostics: Diagnostics::default(),
    })
}

/// Full CMF pipeline: stage iteration on every partition, pooling,
/// Schmidt orthogonalization, and diagonalization of the effective
/// Hamiltonian. The lowest eigenvector is lifted back to the full space.
/// A single site is solved in its full two-dimensional space.
pub fn solve_cmf(
    h: &SpinHamiltonian,
    config: &CmfConfig,
    oracle: Option<&Oracle>,
) -> Result<CmfResult> {
    config.validate()?;
    let (partitions, pipeline) = if h.n_sites() == 1 && config.partitions.is_empty() {
        (Vec::new(), single_site_pipeline(h)?)
    } else {
        let partitions = config.resolved_partitions(h.n_sites())?;
        let pipeline = run_pipeline(h, &partitions, config, 0)?;
        (partitions, pipeline)
    };
    let state = pipeline.effective.basis.lift(&pipeline.spectrum.vectors[0])?;
    let energy = pipeline.spectrum.values[0];
    let fidelity_vs_oracle = oracle
        .map(|o| fidelity(&o.state, &state))
        .transpose()?;
    Ok(CmfResult {
        energy,
        state,
        oracle_energy: oracle.map(|o| o.energy),
        fidelity_vs_oracle,
        diagnostics: pipeline.diagnostics,
        basis_dim: pipeline.effective.dim(),
        products_per_partition: pipeline.products_per_partition,
        partitions,
        effective: pipeline.effective,
        spectrum: pipeline.spectrum,
    })
}

fn multilayer_inner(
    h: &SpinHamiltonian,
    config: &CmfConfig,
    count: usize,
    depth: usize,
) -> Result<(Vec<LabeledEigenstate>, Diagnostics)> {
    let n = h.n_sites();
    let sites: Vec<usize> = (0..n).collect();
    if n <= config.max_cluster_size {
        let mut diagnostics = Diagnostics::default();
        diagnostics.dense_solves.insert(n, 1);
        let states = lowest_states(h, count)?
            .into_iter()
            .enumerate()
            .map(|(i, (energy, state))| LabeledEigenstate {
                sites: sites.clone(),
                lineage: vec![i],
                state,
                energy,
            })
            .collect();
        return Ok((states, diagnostics));
    }
    if depth > config.max_depth {
        return Err(CmfError::RecursionDepth(config.max_depth));
    }
    let partitions = expand_partitions(
        config.sub_partition_rule.partitions(n)?,
        config.mirror_roles,
        n,
    )?;
    let pipeline = run_pipeline(h, &partitions, config, depth)?;
    if pipeline.spectrum.dim() < count {
        return Err(CmfError::EmptySelection {
            requested: count,
            available: pipeline.spectrum.dim(),
        });
    }
    let states = (0..count)
        .map(|k| {
            Ok(LabeledEigenstate {
                sites: sites.clone(),
                lineage: vec![k],
                state: pipeline.effective.basis.lift(&pipeline.spectrum.vectors[k])?,
                energy: pipeline.spectrum.values[k],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((states, pipeline.diagnostics))
}

/// The `J` lowest approximate eigenstates of a cluster Hamiltonian, by nested
/// CMF when the cluster exceeds `max_cluster_size` and dense diagonalization
/// otherwise.
pub fn multilayer_subsolver(
    h_cluster: &SpinHamiltonian,
    config: &CmfConfig,
) -> Result<(Vec<LabeledEigenstate>, Diagnostics)> {
    config.validate()?;
    multilayer_inner(h_cluster, config, config.states_per_cluster, 1)
}
