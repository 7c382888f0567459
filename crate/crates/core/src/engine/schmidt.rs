use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::{inner, norm, DenseMatrix, StateVector};
use crate::error::{CmfError, Result};

/// Where a compressed-basis vector came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Position in the list handed to [`schmidt_orthogonalize`].
    pub source: usize,
    pub partition: Option<usize>,
    pub a_label: Option<String>,
    pub b_label: Option<String>,
}

/// Orthonormal vectors on the full system spanning the retained products.
#[derive(Debug, Clone)]
pub struct CompressedBasis {
    pub vectors: Vec<StateVector>,
    pub provenance: Vec<Provenance>,
}

impl CompressedBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn n_sites(&self) -> usize {
        self.vectors.first().map_or(0, StateVector::n_sites)
    }

    pub fn gram(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.dim(), |i, j| {
            inner(self.vectors[i].amplitudes(), self.vectors[j].amplitudes())
        })
    }

    /// Largest entrywise deviation of the Gram matrix from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        self.gram()
            .max_abs_diff(&DenseMatrix::identity(self.dim()))
    }

    /// `Σ_γ c_γ |ψ_γ⟩`, normalized.
    pub fn lift(&self, coeffs: &[Complex64]) -> Result<StateVector> {
        if coeffs.len() != self.dim() {
            return Err(CmfError::DimensionMismatch {
                expected: self.dim(),
                found: coeffs.len(),
            });
        }
        self.lift_subset(&(0..self.dim()).collect::<Vec<_>>(), coeffs)
    }

    /// Lift coefficients given on the basis vectors listed in `indices`.
    pub fn lift_subset(&self, indices: &[usize], coeffs: &[Complex64]) -> Result<StateVector> {
        let n_sites = self.n_sites();
        let mut out = vec![Complex64::new(0.0, 0.0); 1 << n_sites];
        for (&idx, c) in indices.iter().zip(coeffs) {
            for (o, a) in out.iter_mut().zip(self.vectors[idx].amplitudes()) {
                *o += c * a;
            }
        }
        Ok(StateVector::normalized(n_sites, out)?.canonical())
    }
}

/// Modified Gram–Schmidt in input order with one re-orthogonalization pass.
///
/// A vector whose residual norm after projecting out the accepted ones falls
/// below `tol` is dropped.
pub fn schmidt_orthogonalize(vectors: &[StateVector], tol: f64) -> Result<CompressedBasis> {
    let Some(first) = vectors.first() else {
        return Err(CmfError::DegenerateBasis);
    };
    let n_sites = first.n_sites();
    let mut accepted: Vec<Vec<Complex64>> = Vec::new();
    let mut provenance = Vec::new();
    for (idx, v) in vectors.iter().enumerate() {
        if v.n_sites() != n_sites {
            return Err(CmfError::DimensionMismatch {
                expected: n_sites,
                found: v.n_sites(),
            });
        }
        let mut w = v.amplitudes().to_vec();
        let floor = tol * norm(&w).max(1.0);
        project_out(&accepted, &mut w);
        if norm(&w) < floor {
            continue;
        }
        // second pass restores orthogonality lost to cancellation
        project_out(&accepted, &mut w);
        let residual = norm(&w);
        for wi in &mut w {
            *wi /= residual;
        }
        accepted.push(w);
        provenance.push(Provenance {
            source: idx,
            partition: None,
            a_label: None,
            b_label: None,
        });
    }
    if accepted.is_empty() {
        return Err(CmfError::DegenerateBasis);
    }
    let vectors = accepted
        .into_iter()
        .map(|amps| StateVector::normalized(n_sites, amps))
        .collect::<Result<Vec<_>>>()?;
    Ok(CompressedBasis {
        vectors,
        provenance,
    })
}

fn project_out<V: AsRef<[Complex64]>>(basis: &[V], w: &mut [Complex64]) {
    for u in basis {
        let u = u.as_ref();
        let proj = inner(u, w);
        for (wi, ui) in w.iter_mut().zip(u) {
            *wi -= proj * ui;
        }
    }
}

/// Norm of the part of `v` outside the span of `basis`.
pub fn projection_residual(basis: &CompressedBasis, v: &StateVector) -> f64 {
    let mut w = v.amplitudes().to_vec();
    let vecs: Vec<&[Complex64]> = basis.vectors.iter().map(StateVector::amplitudes).collect();
    project_out(&vecs, &mut w);
    norm(&w)
}
