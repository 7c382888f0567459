//! Three-spin network over both coupling sweeps, under the `J = 2` protocol
//! and the four-dimensional one that keeps only the stage-one ground state.

use cmf::engine::{solve_cmf, CmfConfig, Oracle};
use cmf::pauli::SpinHamiltonian;

fn main() -> cmf::Result<()> {
    let points = [(0.1, 0.1), (1.0, 0.1), (2.0, 0.1), (2.0, 1.0), (2.0, 2.0)];
    let protocols = [
        ("J=2", CmfConfig::three_spin()),
        ("4-D", CmfConfig::three_spin_experiment()),
    ];
    println!("{:>5} {:>5}  {:>8} {:>4}  {:>8} {:>4}", "g2", "g3", "F(J=2)", "dim", "F(4-D)", "dim");
    for (g2, g3) in points {
        let h = SpinHamiltonian::three_spin(1.0, g2, g3);
        let oracle = Oracle::exact(&h)?;
        let mut line = format!("{g2:>5} {g3:>5}");
        for (_, cfg) in &protocols {
            let r = solve_cmf(&h, cfg, Some(&oracle))?;
            line += &format!("  {:>8.5} {:>4}", r.fidelity_vs_oracle.unwrap_or(f64::NAN), r.basis_dim);
        }
        println!("{line}");
    }

    let h = SpinHamiltonian::three_spin(1.0, 1.0, 0.1);
    let r = solve_cmf(&h, &CmfConfig::three_spin_experiment(), None)?;
    println!("\ncompressed basis at g2 = 1, g3 = 0.1:");
    for p in &r.effective.basis.provenance {
        println!(
            "  partition {} A={} B={}",
            p.partition.unwrap_or(0),
            p.a_label.as_deref().unwrap_or("-"),
            p.b_label.as_deref().unwrap_or("-")
        );
    }
    Ok(())
}
