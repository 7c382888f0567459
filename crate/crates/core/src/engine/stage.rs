use serde::{Deserialize, Serialize};

use super::config::{CmfConfig, Partition, Pruning};
use super::solve::ClusterSolver;
use crate::dense::{embed_product, StateVector};
use crate::error::{CmfError, Result};
use crate::pauli::{SiteMap, SpinHamiltonian};

/// A cluster eigenstate together with the chain of indices that produced it.
///
/// `lineage[k]` is the eigenstate index chosen at stage `k + 1`; `"g_e"` reads
/// as "first excited state computed against the environment built from a
/// ground state".
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabeledEigenstate {
    pub sites: Vec<usize>,
    pub lineage: Vec<usize>,
    pub state: StateVector,
    pub energy: f64,
}

impl LabeledEigenstate {
    pub fn label(&self) -> String {
        lineage_label(&self.lineage)
    }
}

pub fn index_label(i: usize) -> String {
    match i {
        0 => "g".to_string(),
        1 => "e".to_string(),
        k => format!("e{k}"),
    }
}

pub fn lineage_label(lineage: &[usize]) -> String {
    lineage
        .iter()
        .map(|&i| index_label(i))
        .collect::<Vec<_>>()
        .join("_")
}

/// A retained product `|φ_A⟩ ⊗ |φ_B⟩`.
#[derive(Debug, Clone)]
pub struct ProductPair {
    pub a: LabeledEigenstate,
    pub b: LabeledEigenstate,
}

impl ProductPair {
    /// The product on the sorted union of both clusters' sites.
    pub fn product_state(&self) -> Result<StateVector> {
        Ok(embed_product(&self.a.state, &self.a.sites, &self.b.state, &self.b.sites)?.0)
    }
}

fn keep(lineage: &[usize], pruning: Pruning) -> bool {
    let d = lineage.len();
    if d < 3 {
        return true;
    }
    let reference = match pruning {
        Pruning::Lineage => lineage[d - 3],
        Pruning::Diagonal => lineage[d - 2],
    };
    lineage[d - 1] == reference
}

/// Alternating reduced-Hamiltonian iteration on one partition.
///
/// Stage one reduces over the starting environment on `B` and keeps the lowest
/// states of cluster `A`; every later stage swaps roles and reduces over each
/// state produced by the previous stage. From stage three on, states failing
/// the pruning rule are discarded. The final stage's states are paired with
/// the environment states they were computed against.
pub fn stage_iterate(
    h: &SpinHamiltonian,
    partition: &Partition,
    config: &CmfConfig,
    solver: &mut ClusterSolver<'_>,
) -> Result<Vec<ProductPair>> {
    let n = h.n_sites();
    partition.validate_for(n)?;
    let map_a = SiteMap::new(partition.a_sites().to_vec(), n)?;
    let map_b = SiteMap::new(partition.b_sites().to_vec(), n)?;
    let wrap = |stage: usize| move |e: CmfError| CmfError::Stage {
        partition: 0,
        stage,
        source: Box::new(e),
    };

    let initial = LabeledEigenstate {
        sites: partition.b_sites().to_vec(),
        lineage: Vec::new(),
        state: config.init_env.state(partition.b_sites().len()).map_err(wrap(1))?,
        energy: f64::NAN,
    };
    let mut envs = vec![initial];
    let mut on_a = true;
    let mut pairs = Vec::new();
    for stage in 1..=config.stage_count {
        let map = if on_a { &map_a } else { &map_b };
        let count = if stage == 1 {
            config.first_stage()
        } else {
            config.states_per_cluster
        };
        let mut next = Vec::new();
        let mut parents = Vec::new();
        for (parent, env) in envs.iter().enumerate() {
            let reduced = h.reduce(map, &env.state).map_err(wrap(stage))?;
            let states = solver.lowest(&reduced, count).map_err(wrap(stage))?;
            for (i, (energy, state)) in states.into_iter().enumerate() {
                let mut lineage = env.lineage.clone();
                lineage.push(i);
                if !keep(&lineage, config.pruning) {
                    continue;
                }
                next.push(LabeledEigenstate {
                    sites: map.cluster_sites.clone(),
                    lineage,
                    state,
                    energy,
                });
                parents.push(parent);
            }
        }
        if next.is_empty() {
            return Err(wrap(stage)(CmfError::EmptySelection {
                requested: count,
                available: 0,
            }));
        }
        if stage == config.stage_count {
            for (state, parent) in next.into_iter().zip(parents) {
                let env = envs[parent].clone();
                pairs.push(if on_a {
                    ProductPair { a: state, b: env }
                } else {
                    ProductPair { a: env, b: state }
                });
            }
            break;
        }
        envs = next;
        on_a = !on_a;
    }
    Ok(pairs)
}
