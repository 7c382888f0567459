//! Variational minimization over unit vectors of the four-dimensional
//! compressed space, compared with its exact lowest eigenvalue.

use cmf::dense::eigh;
use cmf::engine::{solve_cmf, CmfConfig};
use cmf::pauli::SpinHamiltonian;
use cmf::stateprep::{vqe_compressed, VqeConfig};

fn main() -> cmf::Result<()> {
    let h = SpinHamiltonian::three_spin(1.0, 1.0, 0.1);
    let r = solve_cmf(&h, &CmfConfig::three_spin_experiment(), None)?;
    let exact = eigh(&r.effective.matrix)?;
    let out = vqe_compressed(&r.effective.matrix, &VqeConfig::default(), Some(&exact.vectors[0]))?;
    for p in out.trace.points.iter().step_by(5) {
        println!("{:>4} {:>14.10} {:>9.6}", p.step, p.energy, p.fidelity.unwrap_or(f64::NAN));
    }
    println!(
        "{} iterations, converged = {}, E = {:.10}, min eig = {:.10}",
        out.iterations, out.converged, out.energy, exact.values[0]
    );
    Ok(())
}
