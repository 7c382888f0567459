//! Jacobi diagonalization of a small complex Hermitian matrix and exact
//! time evolution of a single spin.

use cmf::dense::{eigh, propagate, DenseMatrix, StateVector};
use cmf::pauli::SpinHamiltonian;
use num_complex::Complex64;

fn main() -> cmf::Result<()> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let a = DenseMatrix::from_row_major(vec![
        c(2.0, 0.0), c(0.0, 1.0), c(0.5, 0.0),
        c(0.0, -1.0), c(1.0, 0.0), c(0.0, 0.0),
        c(0.5, 0.0), c(0.0, 0.0), c(-1.0, 0.0),
    ])?;
    let eig = eigh(&a)?;
    println!("eigenvalues {:?}", eig.values);
    println!("reconstruction error {:.2e}", eig.reconstruct().max_abs_diff(&a));

    let x = SpinHamiltonian::parse("1 X\n")?;
    let up = StateVector::from_bitstring("0")?;
    for t in [0.0, 0.25, 0.5, 0.75] {
        let t = t * std::f64::consts::PI;
        let psi = propagate(&x, t, &up)?;
        println!("t = {t:.3}: P(|1>) = {:.4}", psi.probabilities()[1]);
    }
    Ok(())
}
