//! Classical emulation of cluster state preparation: digitized adiabatic
//! dragging through a two-parameter family of cluster Hamiltonians, and a
//! variational minimization inside the compressed space.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::{fidelity, ground_state, inner, DenseMatrix, Propagator, StateVector};
use crate::error::{CmfError, Result};
use crate::pauli::{PauliAxis, SpinHamiltonian};

/// `H(λ₁, λ₂) = H⁰ + λ₁·term₁ + λ₂·term₂`.
///
/// `H⁰` holds the diagonal (`I`/`Z`-only) terms, `term₁` the off-diagonal
/// single-site terms and `term₂` the off-diagonal many-site terms.
#[derive(Debug, Clone, PartialEq)]
pub struct DragDecomposition {
    pub h0: SpinHamiltonian,
    pub term1: SpinHamiltonian,
    pub term2: SpinHamiltonian,
}

impl DragDecomposition {
    pub fn new(h0: SpinHamiltonian, term1: SpinHamiltonian, term2: SpinHamiltonian) -> Result<Self> {
        for part in [&term1, &term2] {
            if part.n_sites() != h0.n_sites() {
                return Err(CmfError::DimensionMismatch {
                    expected: h0.n_sites(),
                    found: part.n_sites(),
                });
            }
        }
        Ok(Self { h0, term1, term2 })
    }

    /// Splits `h` by Pauli structure.
    pub fn split(h: &SpinHamiltonian) -> Result<Self> {
        let n = h.n_sites();
        let (mut h0, mut t1, mut t2) = (Vec::new(), Vec::new(), Vec::new());
        for term in h.terms() {
            let flips = term
                .axes
                .iter()
                .filter(|a| matches!(a, PauliAxis::X | PauliAxis::Y))
                .count();
            let weight = term.axes.iter().filter(|a| **a != PauliAxis::I).count();
            match (flips, weight) {
                (0, _) => h0.push(term.clone()),
                (_, 1) => t1.push(term.clone()),
                _ => t2.push(term.clone()),
            }
        }
        Self::new(
            SpinHamiltonian::new(n, h0)?,
            SpinHamiltonian::new(n, t1)?,
            SpinHamiltonian::new(n, t2)?,
        )
    }

    pub fn n_sites(&self) -> usize {
        self.h0.n_sites()
    }

    pub fn extended_hamiltonian(&self, lambda1: f64, lambda2: f64) -> Result<SpinHamiltonian> {
        self.h0
            .add(&self.term1.scaled(lambda1))?
            .add(&self.term2.scaled(lambda2))
    }
}

/// Piecewise-linear path through `(λ₁, λ₂)` waypoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DragSchedule {
    pub waypoints: Vec<(f64, f64)>,
    pub steps_per_segment: usize,
    pub dt: f64,
}

impl Default for DragSchedule {
    fn default() -> Self {
        Self {
            waypoints: vec![(0.0, 0.0), (0.0, 0.1), (0.0, 0.5), (1.0, 1.0)],
            steps_per_segment: 100,
            dt: 0.05,
        }
    }
}

impl DragSchedule {
    pub fn with_steps(steps_per_segment: usize) -> Self {
        Self {
            steps_per_segment,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(CmfError::InvalidConfig(msg.into()));
        if self.waypoints.len() < 2 {
            return bad("drag schedule needs at least two waypoints");
        }
        if self.waypoints[0] != (0.0, 0.0) {
            return bad("drag schedule must start at (0, 0)");
        }
        if self.waypoints.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return bad("drag waypoints must be finite");
        }
        if self.steps_per_segment == 0 {
            return bad("steps_per_segment must be at least 1");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive");
        }
        Ok(())
    }

    pub fn total_steps(&self) -> usize {
        (self.waypoints.len() - 1) * self.steps_per_segment
    }

    pub fn total_time(&self) -> f64 {
        self.total_steps() as f64 * self.dt
    }

    /// `(λ₁, λ₂)` at every step, excluding the starting waypoint.
    pub fn path(&self) -> Vec<(f64, f64)> {
        let steps = self.steps_per_segment;
        self.waypoints
            .windows(2)
            .flat_map(|w| {
                let ((a1, a2), (b1, b2)) = (w[0], w[1]);
                (1..=steps).map(move |s| {
                    let f = s as f64 / steps as f64;
                    (a1 + (b1 - a1) * f, a2 + (b2 - a2) * f)
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub step: usize,
    pub energy: f64,
    pub fidelity: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyTrace {
    pub points: Vec<TracePoint>,
}

impl EnergyTrace {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.energy).collect()
    }

    pub fn is_non_increasing(&self, tol: f64) -> bool {
        self.points.windows(2).all(|w| w[1].energy <= w[0].energy + tol)
    }
}

#[derive(Debug, Clone)]
pub struct DragOutcome {
    pub final_state: StateVector,
    pub trace: EnergyTrace,
    /// Fidelity of the final state with the ground state at the last waypoint.
    pub endpoint_fidelity: f64,
    /// Largest `| ‖ψ‖ − 1 |` seen along the drag.
    pub max_norm_drift: f64,
}

/// Fidelity an initial drag state must have with the first waypoint's ground state.
pub const DRAG_START_FIDELITY: f64 = 0.999;

/// Evolves `initial` under the piecewise-constant Hamiltonian
/// `H(λ₁(t), λ₂(t))`, exactly for `dt` at each step. Trace fidelities are
/// taken against `target` when given.
pub fn adiabatic_drag(
    decomp: &DragDecomposition,
    schedule: &DragSchedule,
    initial: &StateVector,
    target: Option<&StateVector>,
) -> Result<DragOutcome> {
    schedule.validate()?;
    if initial.n_sites() != decomp.n_sites() {
        return Err(CmfError::DimensionMismatch {
            expected: decomp.n_sites(),
            found: initial.n_sites(),
        });
    }
    let (l1, l2) = schedule.waypoints[0];
    let h_start = decomp.extended_hamiltonian(l1, l2)?;
    let (_, start_ground) = ground_state(&h_start)?;
    let start_fid = fidelity(&start_ground, initial)?;
    if start_fid < DRAG_START_FIDELITY {
        return Err(CmfError::InvalidConfig(format!(
            "initial state has fidelity {start_fid:.6} with the starting ground state"
        )));
    }
    let fid_of = |s: &StateVector| target.map(|t| fidelity(t, s)).transpose();

    let mut state = initial.clone();
    let mut trace = EnergyTrace::default();
    trace.points.push(TracePoint {
        step: 0,
        energy: h_start.expectation(&state)?,
        fidelity: fid_of(&state)?,
    });
    let mut max_norm_drift = (state.norm() - 1.0).abs();
    let mut h_last = h_start;
    for (step, (l1, l2)) in schedule.path().into_iter().enumerate() {
        let h = decomp.extended_hamiltonian(l1, l2)?;
        state = Propagator::new(&h)?.apply(schedule.dt, &state)?;
        max_norm_drift = max_norm_drift.max((state.norm() - 1.0).abs());
        trace.points.push(TracePoint {
            step: step + 1,
            energy: h.expectation(&state)?,
            fidelity: fid_of(&state)?,
        });
        h_last = h;
    }
    let (_, end_ground) = ground_state(&h_last)?;
    Ok(DragOutcome {
        endpoint_fidelity: fidelity(&end_ground, &state)?,
        final_state: state,
        trace,
        max_norm_drift,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VqeConfig {
    pub max_iters: usize,
    /// Finite-difference step for the gradient.
    pub step_size: f64,
    /// Converged once a step lowers the energy by less than this and the
    /// gradient norm is below it too.
    pub convergence_tol: f64,
    /// First trial step length of the line search.
    pub learning_rate: f64,
}

impl Default for VqeConfig {
    fn default() -> Self {
        Self {
            max_iters: 200,
            step_size: 1e-6,
            convergence_tol: 1e-8,
            learning_rate: 0.5,
        }
    }
}

impl VqeConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.step_size, self.convergence_tol, self.learning_rate]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite());
        if self.max_iters == 0 || !positive {
            return Err(CmfError::InvalidConfig(
                "vqe settings must all be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct VqeOutcome {
    /// Optimized unit vector in compressed coordinates.
    pub coeffs: Vec<Complex64>,
    pub energy: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: EnergyTrace,
}

pub const MAX_HALVINGS: usize = 30;
/// Fraction of the first-order predicted decrease a step must realize.
const ARMIJO: f64 = 1e-4;
const START_ANGLE: f64 = std::f64::consts::FRAC_PI_4;

/// Unit vector from hyperspherical angles. Component 0 is the product of all
/// sines, so coordinates stay well scaled near the leading basis vector.
/// With `complex`, the trailing `d − 1` parameters are phases of components
/// `1..d`.
fn unit_vector(params: &[f64], d: usize, complex: bool) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); d];
    let mut radius = 1.0;
    for k in 0..d - 1 {
        out[d - 1 - k] = Complex64::new(radius * params[k].cos(), 0.0);
        radius *= params[k].sin();
    }
    out[0] = Complex64::new(radius, 0.0);
    if complex {
        for k in 1..d {
            out[k] *= Complex64::from_polar(1.0, params[d - 2 + k]);
        }
    }
    out
}

fn rayleigh(h: &DenseMatrix, v: &[Complex64]) -> f64 {
    inner(v, &h.mul_vec(v)).re
}

/// Minimizes `⟨v|H|v⟩` over unit vectors by finite-difference gradient
/// descent. Each step starts from a Barzilai-Borwein length and is halved
/// until it passes an Armijo decrease test. A run that hits `max_iters` is
/// returned with `converged = false`.
pub fn vqe_compressed(
    h: &DenseMatrix,
    config: &VqeConfig,
    target: Option<&[Complex64]>,
) -> Result<VqeOutcome> {
    config.validate()?;
    let d = h.dim();
    if d == 0 {
        return Err(CmfError::EmptySelection {
            requested: 1,
            available: 0,
        });
    }
    let deviation = h.hermitian_deviation();
    if deviation > crate::dense::HERMITIAN_TOL * h.frobenius_norm().max(1.0) {
        return Err(CmfError::NotHermitian { deviation });
    }
    if let Some(t) = target {
        if t.len() != d {
            return Err(CmfError::DimensionMismatch {
                expected: d,
                found: t.len(),
            });
        }
    }
    let complex = !h.is_real();
    let n_params = if complex { 2 * d - 2 } else { d - 1 };
    let energy_of = |p: &[f64]| rayleigh(h, &unit_vector(p, d, complex));
    let fid_of = |v: &[Complex64]| target.map(|t| inner(t, v).norm_sqr() / crate::dense::norm(t).powi(2));

    let mut params = vec![START_ANGLE; n_params];
    let mut v = unit_vector(&params, d, complex);
    let mut energy = rayleigh(h, &v);
    let mut trace = EnergyTrace::default();
    trace.points.push(TracePoint {
        step: 0,
        energy,
        fidelity: fid_of(&v),
    });
    if n_params == 0 {
        return Ok(VqeOutcome {
            coeffs: v,
            energy,
            iterations: 0,
            converged: true,
            trace,
        });
    }

    let gradient = |p: &[f64]| -> Vec<f64> {
        (0..n_params)
            .map(|k| {
                let mut plus = p.to_vec();
                let mut minus = p.to_vec();
                plus[k] += config.step_size;
                minus[k] -= config.step_size;
                (energy_of(&plus) - energy_of(&minus)) / (2.0 * config.step_size)
            })
            .collect()
    };
    let mut rate = config.learning_rate;
    let mut converged = false;
    let mut iterations = 0;
    let mut previous: Option<(Vec<f64>, Vec<f64>)> = None;
    while iterations < config.max_iters {
        iterations += 1;
        let grad = gradient(&params);
        let grad_sq: f64 = grad.iter().map(|g| g * g).sum();
        // Barzilai-Borwein trial step from the last accepted move
        if let Some((p_old, g_old)) = &previous {
            let s: Vec<f64> = params.iter().zip(p_old).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = grad.iter().zip(g_old).map(|(a, b)| a - b).collect();
            let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
            let ss: f64 = s.iter().map(|a| a * a).sum();
            if sy > 0.0 && (ss / sy).is_finite() {
                rate = ss / sy;
            }
        }
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = params.iter().zip(&grad).map(|(p, g)| p - rate * g).collect();
            let e = energy_of(&trial);
            if e < energy && energy - e >= ARMIJO * rate * grad_sq {
                accepted = Some((trial, e));
                break;
            }
            rate *= 0.5;
        }
        let stationary = grad_sq.sqrt() < config.convergence_tol;
        let Some((trial, e)) = accepted else {
            converged = stationary;
            break;
        };
        let change = energy - e;
        previous = Some((std::mem::replace(&mut params, trial), grad));
        energy = e;
        v = unit_vector(&params, d, complex);
        trace.points.push(TracePoint {
            step: iterations,
            energy,
            fidelity: fid_of(&v),
        });
        if change < config.convergence_tol && stationary {
            converged = true;
            break;
        }
    }
    Ok(VqeOutcome {
        coeffs: v,
        energy,
        iterations,
        converged,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::eigh;

    fn experiment_ha() -> SpinHamiltonian {
        SpinHamiltonian::parse("-1 II\n1 ZI\n1 IZ\n1 XX\n").unwrap()
    }

    #[test]
    fn split_by_structure() {
        let h = SpinHamiltonian::parse("0.5 II\n1 ZI\n2 XI\n3 XX\n4 ZZ\n").unwrap();
        let d = DragDecomposition::split(&h).unwrap();
        assert_eq!(d.h0.terms().len(), 3);
        assert_eq!(d.term1.coefficient("XI"), 2.0);
        assert_eq!(d.term2.coefficient("XX"), 3.0);
    }

    #[test]
    fn extended_endpoints() {
        let h = experiment_ha();
        let d = DragDecomposition::split(&h).unwrap();
        assert_eq!(d.extended_hamiltonian(0.0, 0.0).unwrap(), d.h0);
        assert_eq!(d.extended_hamiltonian(1.0, 1.0).unwrap(), h);
        let mid = d.extended_hamiltonian(0.0, 0.1).unwrap();
        assert!((mid.coefficient("XX") - 0.1).abs() < 1e-15);
    }

    #[test]
    fn mismatched_sites_rejected() {
        let a = SpinHamiltonian::parse("1 Z\n").unwrap();
        let b = SpinHamiltonian::parse("1 XX\n").unwrap();
        assert!(DragDecomposition::new(a.clone(), b, SpinHamiltonian::zero(1)).is_err());
    }

    #[test]
    fn schedule_validation() {
        assert!(DragSchedule::default().validate().is_ok());
        let mut s = DragSchedule::default();
        s.dt = 0.0;
        assert!(s.validate().is_err());
        let mut s = DragSchedule::default();
        s.waypoints[0] = (0.1, 0.0);
        assert!(s.validate().is_err());
        assert_eq!(DragSchedule::with_steps(7).path().len(), 21);
        assert_eq!(*DragSchedule::default().path().last().unwrap(), (1.0, 1.0));
    }

    #[test]
    fn drag_reaches_endpoint_ground_state() {
        let d = DragDecomposition::split(&experiment_ha()).unwrap();
        let (_, start) = ground_state(&d.h0).unwrap();
        let out = adiabatic_drag(&d, &DragSchedule::with_steps(400), &start, None).unwrap();
        assert!(out.endpoint_fidelity >= 0.999, "{}", out.endpoint_fidelity);
        assert!(out.max_norm_drift < 1e-9);
        assert_eq!(out.trace.len(), 1201);
    }

    #[test]
    fn sudden_limit_keeps_initial_state() {
        let d = DragDecomposition::split(&experiment_ha()).unwrap();
        let (_, start) = ground_state(&d.h0).unwrap();
        let schedule = DragSchedule {
            waypoints: vec![(0.0, 0.0), (1.0, 1.0)],
            steps_per_segment: 1,
            dt: 1e-9,
        };
        let out = adiabatic_drag(&d, &schedule, &start, None).unwrap();
        assert!(fidelity(&start, &out.final_state).unwrap() > 1.0 - 1e-12);
        assert!(out.endpoint_fidelity < 1.0 - 1e-3);
    }

    #[test]
    fn drag_rejects_excited_start() {
        let d = DragDecomposition::split(&experiment_ha()).unwrap();
        let excited = StateVector::from_bitstring("00").unwrap();
        assert!(adiabatic_drag(&d, &DragSchedule::default(), &excited, None).is_err());
    }

    #[test]
    fn vqe_trivial_dimension() {
        let h = DenseMatrix::from_real_rows(&[vec![2.5]]).unwrap();
        let out = vqe_compressed(&h, &VqeConfig::default(), None).unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.energy, 2.5);
    }

    #[test]
    fn vqe_two_level_closed_form() {
        let h = DenseMatrix::from_real_rows(&[vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let out = vqe_compressed(&h, &VqeConfig::default(), None).unwrap();
        assert!(out.converged);
        assert!(out.energy.abs() < 1e-6);
        assert!(out.trace.is_non_increasing(0.0));
    }

    #[test]
    fn vqe_complex_hermitian() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let h = DenseMatrix::from_row_major(vec![
            one * 0.3, i * 0.7, one * 0.1,
            -i * 0.7, one * -0.2, one * 0.4 + i * 0.2,
            one * 0.1, one * 0.4 - i * 0.2, one * 0.5,
        ])
        .unwrap();
        let exact = eigh(&h).unwrap().values[0];
        let out = vqe_compressed(&h, &VqeConfig::default(), None).unwrap();
        assert!(out.energy >= exact - 1e-9);
        assert!(out.energy - exact < 1e-6, "{} vs {}", out.energy, exact);
    }
}
