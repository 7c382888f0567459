use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dense::StateVector;
use crate::engine::CmfConfig;
use crate::error::{CmfError, Result};
use crate::pauli::{SiteMap, SpinHamiltonian, MAX_DENSE_SITES};
use crate::stateprep::{DragSchedule, VqeConfig};

/// Everything a command may read from a `--config` file.
///
/// ```toml
/// [cmf]
/// partitions = [{ a = [1, 2], b = [3] }, { a = [2, 3], b = [1] }]
/// init_env = { computational_basis = "1" }
///
/// [truncate]
/// keep_dims = [4, 3, 2]
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Absent means the command's own preset.
    pub cmf: Option<CmfConfig>,
    pub scan: Option<ScanPlan>,
    pub truncate: TruncateSettings,
    pub drag: DragSettings,
    pub vqe: VqeConfig,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CmfError::InvalidConfig(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CmfError::InvalidConfig(e.to_string()))
    }

    pub fn cmf_or(&self, preset: impl FnOnce() -> CmfConfig) -> CmfConfig {
        self.cmf.clone().unwrap_or_else(preset)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanVariable {
    /// Chain length.
    N,
    G2,
    G3,
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn tenth() -> f64 {
    0.1
}

/// A one-dimensional sweep. Couplings are in units of `g1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanPlan {
    pub variable: ScanVariable,
    pub values: Vec<f64>,
    #[serde(default = "one")]
    pub g1: f64,
    #[serde(default = "two")]
    pub g2: f64,
    #[serde(default = "tenth")]
    pub g3: f64,
}

impl ScanPlan {
    /// `N = 3..=8` at `g2/g1 = 2`.
    pub fn chain_default() -> Self {
        Self {
            variable: ScanVariable::N,
            values: (3..=8).map(f64::from).collect(),
            g1: 1.0,
            g2: 2.0,
            g3: 0.0,
        }
    }

    /// `g2/g1 ∈ {0.1, 1, 2}` at `g3/g1 = 0.1`.
    pub fn g2_sweep() -> Self {
        Self {
            variable: ScanVariable::G2,
            values: vec![0.1, 1.0, 2.0],
            g1: 1.0,
            g2: 1.0,
            g3: 0.1,
        }
    }

    /// `g3/g1 ∈ {0.1, 1, 2}` at `g2/g1 = 2`.
    pub fn g3_sweep() -> Self {
        Self {
            variable: ScanVariable::G3,
            values: vec![0.1, 1.0, 2.0],
            g1: 1.0,
            g2: 2.0,
            g3: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CmfError::InvalidConfig(msg));
        if self.values.is_empty() {
            return bad("scan values must be non-empty".into());
        }
        let fixed = [self.g1, self.g2, self.g3];
        if self.values.iter().chain(&fixed).any(|v| !v.is_finite()) {
            return bad("scan values and couplings must be finite".into());
        }
        if self.variable == ScanVariable::N {
            for &v in &self.values {
                if v.fract() != 0.0 || !(2.0..=MAX_DENSE_SITES as f64).contains(&v) {
                    return bad(format!("chain length {v} must be an integer in 2..={MAX_DENSE_SITES}"));
                }
            }
        }
        Ok(())
    }

    /// Chain lengths of an `N` scan.
    pub fn sizes(&self) -> Result<Vec<usize>> {
        self.validate()?;
        if self.variable != ScanVariable::N {
            return Err(CmfError::InvalidConfig("expected a scan over n".into()));
        }
        Ok(self.values.iter().map(|&v| v as usize).collect())
    }

    /// `(g2, g3)` at every point of a coupling scan.
    pub fn couplings(&self) -> Result<Vec<(f64, f64)>> {
        self.validate()?;
        match self.variable {
            ScanVariable::G2 => Ok(self.values.iter().map(|&v| (v, self.g3)).collect()),
            ScanVariable::G3 => Ok(self.values.iter().map(|&v| (self.g2, v)).collect()),
            ScanVariable::N => Err(CmfError::InvalidConfig(
                "expected a scan over g2 or g3".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TruncateSettings {
    /// Subspace sizes to evaluate; empty means every size from full down to 1.
    pub keep_dims: Vec<usize>,
}

/// Which cluster Hamiltonian to drag, and along which path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DragSettings {
    /// One-based cluster sites; empty drags the whole Hamiltonian.
    pub cluster: Vec<usize>,
    /// Bitstring of the environment the cluster Hamiltonian is reduced over.
    pub env: Option<String>,
    pub waypoints: Vec<(f64, f64)>,
    pub steps_per_segment: usize,
    pub dt: f64,
}

impl Default for DragSettings {
    fn default() -> Self {
        let s = DragSchedule::default();
        Self {
            cluster: Vec::new(),
            env: None,
            waypoints: s.waypoints,
            steps_per_segment: s.steps_per_segment,
            dt: s.dt,
        }
    }
}

impl DragSettings {
    pub fn schedule(&self) -> DragSchedule {
        DragSchedule {
            waypoints: self.waypoints.clone(),
            steps_per_segment: self.steps_per_segment,
            dt: self.dt,
        }
    }

    /// The Hamiltonian being dragged: `h` itself, or its reduction onto
    /// `cluster` over the `env` bitstring.
    pub fn cluster_hamiltonian(&self, h: &SpinHamiltonian) -> Result<SpinHamiltonian> {
        if self.cluster.is_empty() {
            return Ok(h.clone());
        }
        let sites = self
            .cluster
            .iter()
            .map(|&s| {
                s.checked_sub(1)
                    .ok_or_else(|| CmfError::InvalidConfig("site numbers start at 1".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let map = SiteMap::new(sites, h.n_sites())?;
        let env_bits = self.env.as_deref().ok_or_else(|| {
            CmfError::InvalidConfig("drag.env is required when drag.cluster is set".into())
        })?;
        let env = StateVector::from_bitstring(env_bits)?;
        h.reduce(&map, &env)
    }
}
