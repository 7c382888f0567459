//! Ground state of the four-dimensional effective Hamiltonian restricted to
//! its `k` most heavily weighted basis vectors.

use cmf::pauli::SpinHamiltonian;
use cmf::report::{cmd_subspace_truncation, RunConfig};

fn main() -> cmf::Result<()> {
    let h = SpinHamiltonian::parse(include_str!("data/three_spin.txt"))?;
    let cfg = RunConfig::from_toml_str(include_str!("data/three_spin_experiment.toml"))?;
    let out = cmd_subspace_truncation(&h, &cfg)?;
    println!("full dimension {}, weight order {:?}", out.full_dim, out.overlap_order);
    for row in &out.rows {
        println!(
            "k = {}  kept [{}]  E = {:.8}  F = {:.5}",
            row.k,
            row.kept,
            row.energy,
            row.fidelity.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
