//! Drags the ground state of the diagonal part of the cluster Hamiltonian
//! `H_A = -1 + Z1 + Z2 + X1X2` through `(λ1, λ2)` waypoints to its full
//! ground state, at three schedule lengths.

use cmf::dense::ground_state;
use cmf::pauli::SpinHamiltonian;
use cmf::stateprep::{adiabatic_drag, DragDecomposition, DragSchedule};

fn main() -> cmf::Result<()> {
    let h = SpinHamiltonian::three_spin(1.0, 1.0, 0.1);
    let map = cmf::pauli::SiteMap::new(vec![0, 1], 3)?;
    let ha = h.reduce(&map, &cmf::dense::StateVector::from_bitstring("1")?)?;
    let decomp = DragDecomposition::split(&ha)?;
    println!("H0:\n{}term1:\n{}term2:\n{}", decomp.h0, decomp.term1, decomp.term2);

    let (_, start) = ground_state(&decomp.h0)?;
    let (e_end, target) = ground_state(&ha)?;
    for steps in [10, 100, 400] {
        let schedule = DragSchedule::with_steps(steps);
        let out = adiabatic_drag(&decomp, &schedule, &start, Some(&target))?;
        println!(
            "{steps:>4} steps/segment, T = {:>5.1}: F = {:.6}, E = {:.6} (ground {:.6})",
            schedule.total_time(),
            out.endpoint_fidelity,
            out.trace.points.last().map_or(f64::NAN, |p| p.energy),
            e_end
        );
    }
    Ok(())
}
