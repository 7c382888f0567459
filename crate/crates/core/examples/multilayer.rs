//! The eight-site chain: its six-site clusters exceed the dense limit and
//! are solved by nested CMF. Prints how many cluster Hamiltonians of each
//! size were diagonalized.

use cmf::engine::{multilayer_subsolver, solve_cmf, CmfConfig, Oracle};
use cmf::pauli::SpinHamiltonian;

fn main() -> cmf::Result<()> {
    let h = SpinHamiltonian::parse(include_str!("data/chain8.txt"))?;
    let cfg = CmfConfig::chain(8)?;
    let oracle = Oracle::exact(&h)?;
    let r = solve_cmf(&h, &cfg, Some(&oracle))?;
    println!(
        "E = {:.8} (exact {:.8}), F = {:.6}, dim {}",
        r.energy,
        oracle.energy,
        r.fidelity_vs_oracle.unwrap_or(f64::NAN),
        r.basis_dim
    );
    println!("dense solves by cluster size: {:?}", r.diagnostics.dense_solves);
    println!("nested solves by cluster size: {:?}", r.diagnostics.recursive_solves);

    let six = SpinHamiltonian::chain(6, 1.0, 2.0)?;
    let (states, _) = multilayer_subsolver(&six, &cfg)?;
    let exact = cmf::dense::lowest_states(&six, 2)?;
    for (s, (e, _)) in states.iter().zip(&exact) {
        println!("six-site state {}: E = {:.8} (exact {:.8})", s.label(), s.energy, e);
    }
    Ok(())
}
