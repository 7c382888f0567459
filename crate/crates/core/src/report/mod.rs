//! Experiment drivers behind the `cmf` binary, and their JSON/CSV output.
//!
//! Every command returns a typed summary; [`execute`] wraps it into a
//! [`RunReport`] together with the CSV table for `--format csv`.

mod config;

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use config::{DragSettings, RunConfig, ScanPlan, ScanVariable, TruncateSettings};

use crate::dense::{eigh, fidelity, ground_state, z_moment_distribution, MomentHistogram, StateVector};
use crate::engine::{solve_cmf, CmfConfig, Diagnostics, Oracle, Provenance};
use crate::error::{CmfError, Result};
use crate::pauli::{SpinHamiltonian, MAX_DENSE_SITES};
use crate::stateprep::{adiabatic_drag, vqe_compressed, DragDecomposition, EnergyTrace};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Couplings and energies are expressed in units of `g1`.
pub const ENERGY_UNIT: &str = "g1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Oracle,
    ChainScan,
    ThreespinScan,
    Truncate,
    Drag,
    Vqe,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Oracle => "oracle",
            Command::ChainScan => "chain-scan",
            Command::ThreespinScan => "threespin-scan",
            Command::Truncate => "truncate",
            Command::Drag => "drag",
            Command::Vqe => "vqe",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Timing {
    pub wall_clock_seconds: f64,
}

/// Schema-versioned record of one command run. All fields except `timing`
/// are reproducible from the inputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub run_id: String,
    pub hamiltonian_digest: Option<String>,
    pub energy_unit: String,
    pub seedless: bool,
    pub config: RunConfig,
    pub results: serde_json::Value,
    pub timing: Timing,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| CmfError::InvalidConfig(e.to_string()))
    }
}

/// A report plus the table written for `--format csv`.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub report: RunReport,
    pub csv: String,
}

fn run_id(command: Command, digest: Option<&str>, config: &RunConfig) -> String {
    let mut hasher = Sha256::new();
    hasher.update(command.name());
    hasher.update([0]);
    hasher.update(digest.unwrap_or(""));
    hasher.update([0]);
    hasher.update(serde_json::to_string(config).unwrap_or_default());
    hex::encode(hasher.finalize())[..16].to_string()
}

fn to_value<T: Serialize>(v: &T) -> Result<serde_json::Value> {
    serde_json::to_value(v).map_err(|e| CmfError::InvalidConfig(e.to_string()))
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| CmfError::InvalidConfig(e.to_string()))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CmfError::InvalidConfig(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn require(h: Option<&SpinHamiltonian>, command: Command) -> Result<&SpinHamiltonian> {
    h.ok_or_else(|| {
        CmfError::InvalidConfig(format!("{} needs --hamiltonian", command.name()))
    })
}

/// Runs `command` and packages its result.
pub fn execute(
    command: Command,
    hamiltonian: Option<&SpinHamiltonian>,
    config: &RunConfig,
    seedless: bool,
) -> Result<CommandOutput> {
    let start = Instant::now();
    let (results, csv) = match command {
        Command::Solve => {
            let s = cmd_solve(require(hamiltonian, command)?, config)?;
            (to_value(&s)?, to_csv(&[s.csv_row()])?)
        }
        Command::Oracle => {
            let s = cmd_oracle(require(hamiltonian, command)?)?;
            (to_value(&s)?, to_csv(&[s.csv_row()])?)
        }
        Command::ChainScan => {
            let s = cmd_chain_scan(config)?;
            (to_value(&s)?, to_csv(&s.rows)?)
        }
        Command::ThreespinScan => {
            let s = cmd_threespin_scan(config)?;
            let rows: Vec<_> = s.rows.iter().map(ThreeSpinRow::csv_row).collect();
            (to_value(&s)?, to_csv(&rows)?)
        }
        Command::Truncate => {
            let s = cmd_subspace_truncation(require(hamiltonian, command)?, config)?;
            (to_value(&s)?, to_csv(&s.rows)?)
        }
        Command::Drag => {
            let s = cmd_drag(require(hamiltonian, command)?, config)?;
            (to_value(&s)?, to_csv(&s.trace.points)?)
        }
        Command::Vqe => {
            let s = cmd_vqe(require(hamiltonian, command)?, config)?;
            (to_value(&s)?, to_csv(&s.trace.points)?)
        }
    };
    let digest = hamiltonian.map(SpinHamiltonian::digest);
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        command: command.name().to_string(),
        run_id: run_id(command, digest.as_deref(), config),
        hamiltonian_digest: digest,
        energy_unit: ENERGY_UNIT.to_string(),
        seedless,
        config: config.clone(),
        results,
        timing: Timing {
            wall_clock_seconds: start.elapsed().as_secs_f64(),
        },
    };
    Ok(CommandOutput { report, csv })
}

fn histogram_string(h: &MomentHistogram) -> String {
    h.bins
        .iter()
        .map(|(m, p)| format!("{m}:{p:.6}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn counts_string(counts: &BTreeMap<usize, usize>) -> String {
    counts
        .iter()
        .map(|(k, v)| format!("{k}:{v}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn oracle_for(h: &SpinHamiltonian) -> Result<Option<Oracle>> {
    if h.n_sites() <= MAX_DENSE_SITES {
        Oracle::exact(h).map(Some)
    } else {
        Ok(None)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveSummary {
    pub n_sites: usize,
    pub energy: f64,
    pub oracle_energy: Option<f64>,
    pub fidelity: Option<f64>,
    pub relative_energy_error: Option<f64>,
    pub basis_dim: usize,
    pub partitions: Vec<String>,
    pub products_per_partition: Vec<usize>,
    pub diagnostics: Diagnostics,
    pub provenance: Vec<Provenance>,
    pub effective_spectrum: Vec<f64>,
    pub mz_cmf: MomentHistogram,
    pub mz_exact: Option<MomentHistogram>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveCsvRow {
    pub n_sites: usize,
    pub energy: f64,
    pub oracle_energy: Option<f64>,
    pub fidelity: Option<f64>,
    pub basis_dim: usize,
    pub dense_solves: String,
}

impl SolveSummary {
    pub fn csv_row(&self) -> SolveCsvRow {
        SolveCsvRow {
            n_sites: self.n_sites,
            energy: self.energy,
            oracle_energy: self.oracle_energy,
            fidelity: self.fidelity,
            basis_dim: self.basis_dim,
            dense_solves: counts_string(&self.diagnostics.dense_solves),
        }
    }
}

/// CMF solve of `h` with the configured settings (chain splits by default),
/// compared with exact diagonalization when the system is small enough.
pub fn cmd_solve(h: &SpinHamiltonian, config: &RunConfig) -> Result<SolveSummary> {
    let cmf = config.cmf_or(CmfConfig::default);
    let oracle = oracle_for(h)?;
    let r = solve_cmf(h, &cmf, oracle.as_ref())?;
    Ok(SolveSummary {
        n_sites: h.n_sites(),
        energy: r.energy,
        oracle_energy: r.oracle_energy,
        fidelity: r.fidelity_vs_oracle,
        relative_energy_error: r.relative_energy_error(),
        basis_dim: r.basis_dim,
        partitions: r.partitions.iter().map(ToString::to_string).collect(),
        products_per_partition: r.products_per_partition.clone(),
        diagnostics: r.diagnostics.clone(),
        provenance: r.effective.basis.provenance.clone(),
        effective_spectrum: r.spectrum.values.clone(),
        mz_cmf: z_moment_distribution(&r.state),
        mz_exact: oracle.as_ref().map(|o| z_moment_distribution(&o.state)),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleSummary {
    pub n_sites: usize,
    pub energy: f64,
    pub state: StateVector,
    pub mz: MomentHistogram,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleCsvRow {
    pub n_sites: usize,
    pub energy: f64,
    pub mz_mean: f64,
    pub mz_variance: f64,
    pub mz: String,
}

impl OracleSummary {
    pub fn csv_row(&self) -> OracleCsvRow {
        OracleCsvRow {
            n_sites: self.n_sites,
            energy: self.energy,
            mz_mean: self.mz.mean(),
            mz_variance: self.mz.variance(),
            mz: histogram_string(&self.mz),
        }
    }
}

/// Exact ground state by dense diagonalization.
pub fn cmd_oracle(h: &SpinHamiltonian) -> Result<OracleSummary> {
    let (energy, state) = ground_state(h)?;
    Ok(OracleSummary {
        n_sites: h.n_sites(),
        energy,
        mz: z_moment_distribution(&state),
        state,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainRow {
    pub n: usize,
    pub e_cmf: f64,
    pub e_exact: f64,
    pub fidelity: f64,
    pub relative_error: f64,
    pub basis_dim: usize,
    pub dense_solves: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(x, y)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(CmfError::InvalidConfig("a line fit needs two or more points".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(CmfError::InvalidConfig("a line fit needs distinct x values".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainScanSummary {
    pub g1: f64,
    pub g2: f64,
    pub rows: Vec<ChainRow>,
    /// `E_cmf` against `N`.
    pub energy_fit: Option<LinearFit>,
}

/// Open transverse-field chains over a range of lengths.
pub fn cmd_chain_scan(config: &RunConfig) -> Result<ChainScanSummary> {
    let plan = config.scan.clone().unwrap_or_else(ScanPlan::chain_default);
    let sizes = plan.sizes()?;
    let rows = sizes
        .par_iter()
        .map(|&n| {
            let h = SpinHamiltonian::chain(n, plan.g1, plan.g2)?;
            let cmf = config.cmf_or(|| CmfConfig::chain(n).expect("valid chain length"));
            let oracle = Oracle::exact(&h)?;
            let r = solve_cmf(&h, &cmf, Some(&oracle))?;
            Ok(ChainRow {
                n,
                e_cmf: r.energy,
                e_exact: oracle.energy,
                fidelity: r.fidelity_vs_oracle.unwrap_or(f64::NAN),
                relative_error: r.relative_energy_error().unwrap_or(f64::NAN),
                basis_dim: r.basis_dim,
                dense_solves: counts_string(&r.diagnostics.dense_solves),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.e_cmf).collect();
    Ok(ChainScanSummary {
        g1: plan.g1,
        g2: plan.g2,
        energy_fit: linear_fit(&xs, &ys).ok(),
        rows,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThreeSpinRow {
    pub g2: f64,
    pub g3: f64,
    pub fidelity: f64,
    pub e_cmf: f64,
    pub e_exact: f64,
    pub basis_dim: usize,
    pub mz_cmf: MomentHistogram,
    pub mz_exact: MomentHistogram,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThreeSpinCsvRow {
    pub g2: f64,
    pub g3: f64,
    pub fidelity: f64,
    pub e_cmf: f64,
    pub e_exact: f64,
    pub basis_dim: usize,
    pub mz_exact_variance: f64,
    pub mz_exact_entropy: f64,
    pub mz_cmf: String,
    pub mz_exact: String,
}

impl ThreeSpinRow {
    pub fn csv_row(&self) -> ThreeSpinCsvRow {
        ThreeSpinCsvRow {
            g2: self.g2,
            g3: self.g3,
            fidelity: self.fidelity,
            e_cmf: self.e_cmf,
            e_exact: self.e_exact,
            basis_dim: self.basis_dim,
            mz_exact_variance: self.mz_exact.variance(),
            mz_exact_entropy: self.mz_exact.entropy(),
            mz_cmf: histogram_string(&self.mz_cmf),
            mz_exact: histogram_string(&self.mz_exact),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThreeSpinScanSummary {
    pub g1: f64,
    pub rows: Vec<ThreeSpinRow>,
}

/// `ZII + IZI + IIZ` field, `XXI + IXX` pair and `XXX` triple couplings,
/// swept over `g2` or `g3`.
pub fn cmd_threespin_scan(config: &RunConfig) -> Result<ThreeSpinScanSummary> {
    let plan = config.scan.clone().unwrap_or_else(ScanPlan::g2_sweep);
    let cmf = config.cmf_or(CmfConfig::three_spin);
    let rows = plan
        .couplings()?
        .par_iter()
        .map(|&(g2, g3)| {
            let h = SpinHamiltonian::three_spin(plan.g1, g2, g3);
            let oracle = Oracle::exact(&h)?;
            let r = solve_cmf(&h, &cmf, Some(&oracle))?;
            Ok(ThreeSpinRow {
                g2,
                g3,
                fidelity: r.fidelity_vs_oracle.unwrap_or(f64::NAN),
                e_cmf: r.energy,
                e_exact: oracle.energy,
                basis_dim: r.basis_dim,
                mz_cmf: z_moment_distribution(&r.state),
                mz_exact: z_moment_distribution(&oracle.state),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ThreeSpinScanSummary { g1: plan.g1, rows })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TruncationRow {
    pub k: usize,
    /// Basis indices kept, space separated.
    pub kept: String,
    pub energy: f64,
    pub fidelity: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TruncationSummary {
    pub full_dim: usize,
    /// Basis indices by descending weight in the CMF ground state.
    pub overlap_order: Vec<usize>,
    pub rows: Vec<TruncationRow>,
}

/// Re-solves `H_eff` on its `k` most heavily weighted basis vectors for each
/// requested `k`. Defaults to the four-dimensional three-spin protocol.
pub fn cmd_subspace_truncation(h: &SpinHamiltonian, config: &RunConfig) -> Result<TruncationSummary> {
    let cmf = config.cmf_or(CmfConfig::three_spin_experiment);
    let oracle = oracle_for(h)?;
    let r = solve_cmf(h, &cmf, oracle.as_ref())?;
    let full_dim = r.basis_dim;
    let keep: Vec<usize> = if config.truncate.keep_dims.is_empty() {
        (1..=full_dim).rev().collect()
    } else {
        config.truncate.keep_dims.clone()
    };
    if let Some(&k) = keep.iter().find(|&&k| k == 0 || k > full_dim) {
        return Err(CmfError::InvalidConfig(format!(
            "keep_dims entry {k} is outside 1..={full_dim}"
        )));
    }
    let order = r.overlap_order();
    let rows = keep
        .iter()
        .map(|&k| {
            let (energy, state) = r.truncated(k)?;
            Ok(TruncationRow {
                k,
                kept: order[..k]
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" "),
                energy,
                fidelity: oracle
                    .as_ref()
                    .map(|o| fidelity(&o.state, &state))
                    .transpose()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TruncationSummary {
        full_dim,
        overlap_order: order,
        rows,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DragSummary {
    /// The dragged Hamiltonian in file format.
    pub cluster_hamiltonian: String,
    pub total_steps: usize,
    pub total_time: f64,
    pub endpoint_fidelity: f64,
    pub final_energy: f64,
    pub endpoint_ground_energy: f64,
    pub max_norm_drift: f64,
    pub trace: EnergyTrace,
}

/// Drags the ground state of the diagonal part of the configured cluster
/// Hamiltonian to the ground state of the full one.
pub fn cmd_drag(h: &SpinHamiltonian, config: &RunConfig) -> Result<DragSummary> {
    let target_h = config.drag.cluster_hamiltonian(h)?;
    let schedule = config.drag.schedule();
    schedule.validate()?;
    let decomp = DragDecomposition::split(&target_h)?;
    let (l1, l2) = schedule.waypoints[0];
    let (_, initial) = ground_state(&decomp.extended_hamiltonian(l1, l2)?)?;
    let (l1, l2) = *schedule.waypoints.last().expect("validated schedule");
    let (end_energy, end_state) = ground_state(&decomp.extended_hamiltonian(l1, l2)?)?;
    let out = adiabatic_drag(&decomp, &schedule, &initial, Some(&end_state))?;
    Ok(DragSummary {
        cluster_hamiltonian: target_h.to_text(),
        total_steps: schedule.total_steps(),
        total_time: schedule.total_time(),
        endpoint_fidelity: out.endpoint_fidelity,
        final_energy: out.trace.points.last().map_or(f64::NAN, |p| p.energy),
        endpoint_ground_energy: end_energy,
        max_norm_drift: out.max_norm_drift,
        trace: out.trace,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VqeSummary {
    pub dim: usize,
    pub energy: f64,
    pub min_eigenvalue: f64,
    pub energy_error: f64,
    pub iterations: usize,
    pub converged: bool,
    pub monotone: bool,
    pub coeffs: Vec<Complex64>,
    pub trace: EnergyTrace,
}

/// Variational minimization in the compressed space of a CMF run, with trace
/// fidelities against the exact lowest eigenvector of `H_eff`.
pub fn cmd_vqe(h: &SpinHamiltonian, config: &RunConfig) -> Result<VqeSummary> {
    let cmf = config.cmf_or(CmfConfig::three_spin_experiment);
    let r = solve_cmf(h, &cmf, None)?;
    let exact = eigh(&r.effective.matrix)?;
    let out = vqe_compressed(&r.effective.matrix, &config.vqe, Some(&exact.vectors[0]))?;
    Ok(VqeSummary {
        dim: r.basis_dim,
        energy: out.energy,
        min_eigenvalue: exact.values[0],
        energy_error: out.energy - exact.values[0],
        iterations: out.iterations,
        converged: out.converged,
        monotone: out.trace.is_non_increasing(0.0),
        coeffs: out.coeffs,
        trace: out.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_fit_exact() {
        let fit = linear_fit(&[1.0, 2.0, 3.0], &[1.0, 3.0, 5.0]).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept + 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(linear_fit(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn single_spin_solve_is_exact() {
        let h = SpinHamiltonian::parse("1 Z\n").unwrap();
        let cfg = RunConfig::default();
        let out = cmd_oracle(&h).unwrap();
        assert_eq!(out.energy, -1.0);
        assert_eq!(out.mz.probability(-1), 1.0);
        let s = cmd_solve(&h, &cfg).unwrap();
        assert_eq!(s.energy, -1.0);
        assert!((s.fidelity.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn execute_is_deterministic() {
        let h = SpinHamiltonian::three_spin(1.0, 1.0, 0.1);
        let cfg = RunConfig {
            cmf: Some(CmfConfig::three_spin_experiment()),
            ..RunConfig::default()
        };
        let a = execute(Command::Solve, Some(&h), &cfg, true).unwrap();
        let b = execute(Command::Solve, Some(&h), &cfg, true).unwrap();
        assert_eq!(a.report.run_id, b.report.run_id);
        assert_eq!(a.report.results, b.report.results);
        assert_eq!(a.csv, b.csv);
        let f = a.report.results["fidelity"].as_f64().unwrap();
        assert!((f - 0.993).abs() < 0.002, "{f}");
    }

    #[test]
    fn missing_hamiltonian_is_input_error() {
        let err = execute(Command::Solve, None, &RunConfig::default(), false).unwrap_err();
        assert!(err.is_input_error());
    }
}
