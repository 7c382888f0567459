use num_complex::Complex64;

use super::schmidt::CompressedBasis;
use crate::dense::{eigh, inner, DenseMatrix, EigenDecomposition, StateVector, HERMITIAN_TOL};
use crate::error::{CmfError, Result};
use crate::pauli::SpinHamiltonian;

/// `H` projected onto a compressed basis: `H_γγ' = ⟨ψ_γ|H|ψ_γ'⟩`.
#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian {
    pub matrix: DenseMatrix,
    pub basis: CompressedBasis,
}

pub fn build_effective(h: &SpinHamiltonian, basis: CompressedBasis) -> Result<EffectiveHamiltonian> {
    if basis.n_sites() != h.n_sites() {
        return Err(CmfError::DimensionMismatch {
            expected: h.n_sites(),
            found: basis.n_sites(),
        });
    }
    let images = basis
        .vectors
        .iter()
        .map(|v| h.apply(v.amplitudes()))
        .collect::<Result<Vec<_>>>()?;
    let raw = DenseMatrix::from_fn(basis.dim(), |i, j| {
        inner(basis.vectors[i].amplitudes(), &images[j])
    });
    let deviation = raw.hermitian_deviation();
    if deviation > HERMITIAN_TOL * raw.frobenius_norm().max(1.0) {
        return Err(CmfError::NotHermitian { deviation });
    }
    // remove rounding asymmetry before diagonalizing
    let matrix = DenseMatrix::from_fn(raw.dim(), |i, j| {
        if i == j {
            Complex64::new(raw[(i, i)].re, 0.0)
        } else {
            (raw[(i, j)] + raw[(j, i)].conj()) * 0.5
        }
    });
    Ok(EffectiveHamiltonian { matrix, basis })
}

impl EffectiveHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn diagonalize(&self) -> Result<EigenDecomposition> {
        eigh(&self.matrix)
    }

    /// Lowest eigenpair of the block spanned by the basis vectors in `indices`,
    /// lifted to the full space.
    pub fn restricted_ground_state(&self, indices: &[usize]) -> Result<(f64, StateVector)> {
        if indices.is_empty() {
            return Err(CmfError::EmptySelection {
                requested: 0,
                available: self.dim(),
            });
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.dim()) {
            return Err(CmfError::EmptySelection {
                requested: bad + 1,
                available: self.dim(),
            });
        }
        let eig = eigh(&self.matrix.submatrix(indices))?;
        let state = self.basis.lift_subset(indices, &eig.vectors[0])?;
        Ok((eig.values[0], state))
    }
}
