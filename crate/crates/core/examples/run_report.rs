//! The JSON report `cmf solve` writes, built through the library.

use cmf::pauli::SpinHamiltonian;
use cmf::report::{execute, Command, RunConfig};

fn main() -> cmf::Result<()> {
    let h = SpinHamiltonian::parse(include_str!("data/three_spin.txt"))?;
    let cfg = RunConfig::from_toml_str(include_str!("data/three_spin_experiment.toml"))?;
    let out = execute(Command::Solve, Some(&h), &cfg, true)?;
    println!("{}", out.report.to_json()?);
    print!("{}", out.csv);
    Ok(())
}
