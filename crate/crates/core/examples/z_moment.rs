//! Distribution of `M_Z = Σ Z_i` over exact three-spin ground states, from
//! the weak-coupling limit to strong pair and triple couplings.

use cmf::dense::{ground_state, z_moment_distribution};
use cmf::pauli::SpinHamiltonian;

fn main() -> cmf::Result<()> {
    let points = [(0.01, 0.0), (0.1, 0.1), (1.0, 0.1), (2.0, 0.1), (2.0, 1.0), (2.0, 2.0)];
    println!("{:>5} {:>5}  {:>7} {:>7} {:>7} {:>7}  {:>8} {:>8}", "g2", "g3", "-3", "-1", "+1", "+3", "var", "entropy");
    for (g2, g3) in points {
        let (_, psi) = ground_state(&SpinHamiltonian::three_spin(1.0, g2, g3))?;
        let hist = z_moment_distribution(&psi);
        println!(
            "{g2:>5} {g3:>5}  {:>7.4} {:>7.4} {:>7.4} {:>7.4}  {:>8.4} {:>8.4}",
            hist.probability(-3),
            hist.probability(-1),
            hist.probability(1),
            hist.probability(3),
            hist.variance(),
            hist.entropy()
        );
    }
    Ok(())
}
