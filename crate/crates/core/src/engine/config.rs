use serde::{Deserialize, Serialize};

use crate::dense::StateVector;
use crate::error::{CmfError, Result};

/// Split of a site set into the cluster solved first (`a_sites`) and its
/// environment (`b_sites`). Sites are zero-based and kept sorted.
///
/// Serialized with one-based site numbers: `{ a = [1, 2], b = [3] }`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PartitionRecord", into = "PartitionRecord")]
pub struct Partition {
    a_sites: Vec<usize>,
    b_sites: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartitionRecord {
    a: Vec<usize>,
    b: Vec<usize>,
}

impl TryFrom<PartitionRecord> for Partition {
    type Error = CmfError;

    fn try_from(plan: PartitionRecord) -> Result<Self> {
        Partition::from_one_based(&plan.a, &plan.b)
    }
}

impl From<Partition> for PartitionRecord {
    fn from(p: Partition) -> Self {
        PartitionRecord {
            a: p.a_sites.iter().map(|s| s + 1).collect(),
            b: p.b_sites.iter().map(|s| s + 1).collect(),
        }
    }
}

impl Partition {
    pub fn new(mut a_sites: Vec<usize>, mut b_sites: Vec<usize>) -> Result<Self> {
        if a_sites.is_empty() || b_sites.is_empty() {
            return Err(CmfError::InvalidPartition(
                "both clusters must be non-empty".into(),
            ));
        }
        a_sites.sort_unstable();
        b_sites.sort_unstable();
        for w in a_sites.windows(2).chain(b_sites.windows(2)) {
            if w[0] == w[1] {
                return Err(CmfError::OverlappingSites(w[0]));
            }
        }
        if let Some(&s) = a_sites.iter().find(|s| b_sites.binary_search(s).is_ok()) {
            return Err(CmfError::OverlappingSites(s));
        }
        Ok(Self { a_sites, b_sites })
    }

    pub fn from_one_based(a: &[usize], b: &[usize]) -> Result<Self> {
        let shift = |v: &[usize]| -> Result<Vec<usize>> {
            v.iter()
                .map(|&s| {
                    s.checked_sub(1).ok_or_else(|| {
                        CmfError::InvalidPartition("site numbers start at 1".into())
                    })
                })
                .collect()
        };
        Self::new(shift(a)?, shift(b)?)
    }

    pub fn a_sites(&self) -> &[usize] {
        &self.a_sites
    }

    pub fn b_sites(&self) -> &[usize] {
        &self.b_sites
    }

    pub fn n_sites(&self) -> usize {
        self.a_sites.len() + self.b_sites.len()
    }

    /// Same split with the stage-one role handed to the other cluster.
    pub fn reversed(&self) -> Self {
        Self {
            a_sites: self.b_sites.clone(),
            b_sites: self.a_sites.clone(),
        }
    }

    /// Checks the two clusters cover exactly `0..n_sites`.
    pub fn validate_for(&self, n_sites: usize) -> Result<()> {
        let mut all: Vec<usize> = self.a_sites.iter().chain(&self.b_sites).copied().collect();
        all.sort_unstable();
        if all != (0..n_sites).collect::<Vec<_>>() {
            return Err(CmfError::InvalidPartition(format!(
                "{self} does not cover sites 1..={n_sites}"
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let fmt = |v: &[usize]| {
            v.iter()
                .map(|s| format!("s{}", s + 1))
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{{{}}}|{{{}}}", fmt(&self.a_sites), fmt(&self.b_sites))
    }
}

/// The two chain splits: first two sites against the rest, and the rest
/// against the last two. A two-site system has the single split `{1}|{2}`.
pub fn chain_partitions(n_sites: usize) -> Result<Vec<Partition>> {
    match n_sites {
        0 | 1 => Err(CmfError::InvalidPartition(format!(
            "cannot split {n_sites} site(s)"
        ))),
        2 => Ok(vec![Partition::new(vec![0], vec![1])?]),
        n => {
            let first = Partition::new(vec![0, 1], (2..n).collect())?;
            let last = Partition::new((0..n - 2).collect(), vec![n - 2, n - 1])?;
            let mut out = vec![first];
            if !out.contains(&last) {
                out.push(last);
            }
            Ok(out)
        }
    }
}

/// Starting environment for the first stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitEnv {
    /// `∏ (|0⟩+|1⟩)/√2`, the +1 eigenstate of every `X`.
    UniformX,
    /// A computational basis state, e.g. `"1"`.
    ComputationalBasis(String),
}

impl InitEnv {
    pub fn state(&self, n_sites: usize) -> Result<StateVector> {
        if n_sites == 0 {
            return Err(CmfError::InvalidPartition("empty environment".into()));
        }
        match self {
            InitEnv::UniformX => Ok(StateVector::uniform(n_sites)),
            InitEnv::ComputationalBasis(bits) => {
                if bits.chars().count() != n_sites {
                    return Err(CmfError::InvalidConfig(format!(
                        "initial bitstring {bits:?} has length {}, environment has {n_sites} sites",
                        bits.chars().count()
                    )));
                }
                StateVector::from_bitstring(bits)
            }
        }
    }
}

/// Which stage-three products survive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pruning {
    /// Keep a cluster state whose index matches the index the same cluster had
    /// one round earlier, e.g. `(g, g_g)`, `(g, g_e)`, `(e, e_g)`, `(e, e_e)`.
    Lineage,
    /// Keep a cluster state whose index matches the index of the environment
    /// state it was computed against, e.g. `(g, g_g)` and `(e, g_e)`.
    Diagonal,
}

/// How clusters larger than `max_cluster_size` are split when recursing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubPartitionRule {
    /// First-two/rest and rest/last-two, as at the top level of a chain.
    ChainEnds,
    /// First-two/rest only.
    FirstTwo,
}

impl SubPartitionRule {
    pub fn partitions(self, n_sites: usize) -> Result<Vec<Partition>> {
        match self {
            SubPartitionRule::ChainEnds => chain_partitions(n_sites),
            SubPartitionRule::FirstTwo => {
                chain_partitions(n_sites).map(|mut v| {
                    v.truncate(1);
                    v
                })
            }
        }
    }
}

fn default_j() -> usize {
    2
}
fn default_max_cluster() -> usize {
    4
}
fn default_stages() -> usize {
    3
}
fn default_schmidt_tol() -> f64 {
    1e-8
}
fn default_max_depth() -> usize {
    8
}
fn default_init_env() -> InitEnv {
    InitEnv::UniformX
}
fn default_pruning() -> Pruning {
    Pruning::Lineage
}
fn default_sub_rule() -> SubPartitionRule {
    SubPartitionRule::ChainEnds
}

/// Settings of one CMF run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CmfConfig {
    /// Splits to run; empty means [`chain_partitions`] of the Hamiltonian.
    #[serde(default)]
    pub partitions: Vec<Partition>,
    /// Eigenstates kept per cluster diagonalization (`J`).
    #[serde(default = "default_j")]
    pub states_per_cluster: usize,
    /// Override of `J` for the first stage only.
    #[serde(default)]
    pub first_stage_states: Option<usize>,
    #[serde(default = "default_pruning")]
    pub pruning: Pruning,
    /// Also run every partition with the roles of its clusters swapped.
    #[serde(default)]
    pub mirror_roles: bool,
    /// Largest cluster diagonalized densely; bigger ones recurse.
    #[serde(default = "default_max_cluster")]
    pub max_cluster_size: usize,
    #[serde(default = "default_init_env")]
    pub init_env: InitEnv,
    #[serde(default = "default_stages")]
    pub stage_count: usize,
    #[serde(default = "default_schmidt_tol")]
    pub schmidt_tol: f64,
    #[serde(default = "default_max_depth")]
    pub max_depth: usize,
    #[serde(default = "default_sub_rule")]
    pub sub_partition_rule: SubPartitionRule,
}

impl Default for CmfConfig {
    fn default() -> Self {
        Self {
            partitions: Vec::new(),
            states_per_cluster: default_j(),
            first_stage_states: None,
            pruning: default_pruning(),
            mirror_roles: false,
            max_cluster_size: default_max_cluster(),
            init_env: default_init_env(),
            stage_count: default_stages(),
            schmidt_tol: default_schmidt_tol(),
            max_depth: default_max_depth(),
            sub_partition_rule: default_sub_rule(),
        }
    }
}

impl CmfConfig {
    /// Open chain of `n` sites: both chain splits, each run in both role
    /// orders, uniform-X starting environment, `J = 2`.
    pub fn chain(n_sites: usize) -> Result<Self> {
        Ok(Self {
            partitions: chain_partitions(n_sites)?,
            mirror_roles: true,
            ..Self::default()
        })
    }

    /// Three-spin network on the splits `{1,2}|{3}` and `{2,3}|{1}`, starting
    /// from `|1⟩`, `J = 2` with diagonal pruning.
    pub fn three_spin() -> Self {
        Self {
            partitions: three_spin_partitions(),
            init_env: InitEnv::ComputationalBasis("1".into()),
            pruning: Pruning::Diagonal,
            ..Self::default()
        }
    }

    /// Three-spin protocol that keeps only the ground state in the first stage
    /// and the diagonal products afterwards: two products per split, a
    /// four-dimensional compressed space.
    pub fn three_spin_experiment() -> Self {
        Self {
            first_stage_states: Some(1),
            ..Self::three_spin()
        }
    }

    pub fn first_stage(&self) -> usize {
        self.first_stage_states.unwrap_or(self.states_per_cluster)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(CmfError::InvalidConfig(msg.into()));
        if self.states_per_cluster == 0 {
            return bad("states_per_cluster must be at least 1");
        }
        if self.first_stage() == 0 {
            return bad("first_stage_states must be at least 1");
        }
        if self.stage_count == 0 {
            return bad("stage_count must be at least 1");
        }
        if self.max_cluster_size < 2 {
            return bad("max_cluster_size must be at least 2");
        }
        if !(self.schmidt_tol > 0.0 && self.schmidt_tol.is_finite()) {
            return bad("schmidt_tol must be positive");
        }
        Ok(())
    }

    /// Partitions to run on an `n_sites` Hamiltonian, with mirrored roles
    /// appended when requested and duplicates removed.
    pub fn resolved_partitions(&self, n_sites: usize) -> Result<Vec<Partition>> {
        let base = if self.partitions.is_empty() {
            chain_partitions(n_sites)?
        } else {
            self.partitions.clone()
        };
        expand_partitions(base, self.mirror_roles, n_sites)
    }
}

pub(crate) fn expand_partitions(
    base: Vec<Partition>,
    mirror: bool,
    n_sites: usize,
) -> Result<Vec<Partition>> {
    let mut out: Vec<Partition> = Vec::new();
    for p in &base {
        p.validate_for(n_sites)?;
        if !out.contains(p) {
            out.push(p.clone());
        }
    }
    if mirror {
        for p in &base {
            let r = p.reversed();
            if !out.contains(&r) {
                out.push(r);
            }
        }
    }
    Ok(out)
}

pub fn three_spin_partitions() -> Vec<Partition> {
    vec![
        Partition::new(vec![0, 1], vec![2]).expect("static partition"),
        Partition::new(vec![1, 2], vec![0]).expect("static partition"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_environment_states() {
        let u2 = InitEnv::UniformX.state(2).unwrap();
        assert!(u2.amplitudes().iter().all(|a| (a.re - 0.5).abs() < 1e-15));
        let u1 = InitEnv::UniformX.state(1).unwrap();
        assert!((u1.amplitudes()[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let down = InitEnv::ComputationalBasis("1".into()).state(1).unwrap();
        assert_eq!(down, StateVector::basis(1, 1));
        assert!(InitEnv::ComputationalBasis("1".into()).state(2).is_err());
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![], vec![0]).is_err());
        assert!(Partition::new(vec![0, 1], vec![1]).is_err());
        let p = Partition::new(vec![2, 0], vec![1]).unwrap();
        assert_eq!(p.a_sites(), &[0, 2]);
        p.validate_for(3).unwrap();
        assert!(p.validate_for(4).is_err());
        assert_eq!(p.to_string(), "{s1,s3}|{s2}");
    }

    #[test]
    fn chain_splits() {
        let p4 = chain_partitions(4).unwrap();
        // {1,2}|{3,4} appears once
        assert_eq!(p4.len(), 1);
        let p6 = chain_partitions(6).unwrap();
        assert_eq!(p6[0].a_sites(), &[0, 1]);
        assert_eq!(p6[1].b_sites(), &[4, 5]);
        let mirrored = CmfConfig::chain(4).unwrap().resolved_partitions(4).unwrap();
        assert_eq!(mirrored.len(), 2);
        assert_eq!(mirrored[1].a_sites(), &[2, 3]);
    }

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = CmfConfig::three_spin_experiment();
        let text = toml::to_string(&cfg).unwrap();
        assert!(text.contains("a = [1, 2]"), "{text}");
        let back: CmfConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn config_defaults_from_sparse_toml() {
        let cfg: CmfConfig = toml::from_str(
            "init_env = { computational_basis = \"1\" }\npartitions = [{ a = [1, 2], b = [3] }]",
        )
        .unwrap();
        assert_eq!(cfg.states_per_cluster, 2);
        assert_eq!(cfg.stage_count, 3);
        assert_eq!(cfg.partitions[0].b_sites(), &[2]);
        assert!(toml::from_str::<CmfConfig>("partitions = [{ a = [0], b = [1] }]").is_err());
    }
}
