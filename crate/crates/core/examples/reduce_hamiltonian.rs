//! Averages the three-spin Hamiltonian over site 3 in `|1⟩` and prints the
//! two-site cluster Hamiltonian that remains.

use cmf::dense::StateVector;
use cmf::pauli::{SiteMap, SpinHamiltonian};

fn main() -> cmf::Result<()> {
    let h = SpinHamiltonian::parse(include_str!("data/three_spin.txt"))?;
    println!("full Hamiltonian ({} sites):\n{h}", h.n_sites());

    let map = SiteMap::new(vec![0, 1], h.n_sites())?;
    let env = StateVector::from_bitstring("1")?;
    let reduced = h.reduce(&map, &env)?;
    println!("cluster {{1,2}} over |1>:\n{reduced}");

    let uniform = h.reduce(&map, &StateVector::uniform(1))?;
    println!("cluster {{1,2}} over |+>:\n{uniform}");
    Ok(())
}
