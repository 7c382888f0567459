use std::cmp::Ordering;

use num_complex::Complex64;

use super::matrix::DenseMatrix;
use super::state::{canonicalize_phase, StateVector};
use crate::error::{CmfError, Result};
use crate::pauli::SpinHamiltonian;

/// Cyclic Jacobi sweep cap.
pub const MAX_SWEEPS: usize = 100;
/// Stop once the off-diagonal Frobenius norm drops below this fraction of `‖A‖_F`.
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;
/// Accepted deviation from Hermiticity on input.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Largest matrix handed to the dense solver (`2^12`).
pub const MAX_DIM: usize = 1 << 12;

/// Full spectrum of a Hermitian matrix, ascending, with canonical-phase
/// eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// The `k`-th eigenvector as a state on `n_sites` spins.
    pub fn state(&self, k: usize, n_sites: usize) -> Result<StateVector> {
        StateVector::from_amplitudes(n_sites, self.vectors[k].clone())
    }

    /// `V·diag(values)·V†`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.dim();
        DenseMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.vectors[k][i] * self.values[k] * self.vectors[k][j].conj())
                .sum()
        })
    }
}

/// Dense Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Eigenvalues come back ascending. Each eigenvector carries the canonical
/// phase (largest amplitude real positive); eigenvalues equal to within
/// `1e-10·max(1, ‖A‖_F)` are ordered lexicographically by amplitude so the
/// output is reproducible.
pub fn eigh(a: &DenseMatrix) -> Result<EigenDecomposition> {
    let n = a.dim();
    if n > MAX_DIM {
        return Err(CmfError::DimensionCap {
            n_sites: n.trailing_zeros() as usize,
            cap: MAX_DIM.trailing_zeros() as usize,
        });
    }
    let scale = a.frobenius_norm();
    let deviation = a.hermitian_deviation();
    if deviation > HERMITIAN_TOL * scale.max(1.0) {
        return Err(CmfError::NotHermitian { deviation });
    }
    let (values, columns) = if a.is_real() {
        jacobi_real(a, scale)?
    } else {
        jacobi_complex(a, scale)?
    };

    let mut pairs: Vec<(f64, Vec<Complex64>)> = values
        .into_iter()
        .zip(columns)
        .map(|(v, mut col)| {
            canonicalize_phase(&mut col);
            (v, col)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let tie = 1e-10 * scale.max(1.0);
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].0 - pairs[end - 1].0 <= tie {
            end += 1;
        }
        pairs[start..end].sort_by(|x, y| lexicographic(&x.1, &y.1));
        start = end;
    }
    let (values, vectors) = pairs.into_iter().unzip();
    Ok(EigenDecomposition { values, vectors })
}

/// Larger leading amplitudes first (real part, then imaginary part).
fn lexicographic(a: &[Complex64], b: &[Complex64]) -> Ordering {
    const EPS: f64 = 1e-9;
    for (x, y) in a.iter().zip(b) {
        if (x.re - y.re).abs() > EPS {
            return y.re.total_cmp(&x.re);
        }
        if (x.im - y.im).abs() > EPS {
            return y.im.total_cmp(&x.im);
        }
    }
    Ordering::Equal
}

fn off_diagonal_norm<T: Copy>(data: &[T], n: usize, sq: impl Fn(T) -> f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += sq(data[i * n + j]);
            }
        }
    }
    acc.sqrt()
}

fn jacobi_real(a: &DenseMatrix, scale: f64) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let n = a.dim();
    let mut m: Vec<f64> = a.as_slice().iter().map(|z| z.re).collect();
    // columns of V stored as rows for contiguous updates
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let target = OFF_DIAGONAL_TOL * scale;
    let skip = 1e-3 * target / (n as f64).max(1.0);
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&m, n, |x| x * x);
        if off <= target {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(CmfError::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq.abs() <= skip {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A ← A·R on columns p, q
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                // A ← Rᵀ·A on rows p, q
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for k in 0..n {
                    let vp = v[p * n + k];
                    let vq = v[q * n + k];
                    v[p * n + k] = c * vp - s * vq;
                    v[q * n + k] = s * vp + c * vq;
                }
            }
        }
    }
    let values = (0..n).map(|i| m[i * n + i]).collect();
    let vectors = v
        .chunks(n.max(1))
        .take(n)
        .map(|col| col.iter().map(|&x| Complex64::new(x, 0.0)).collect())
        .collect();
    Ok((values, vectors))
}

fn jacobi_complex(a: &DenseMatrix, scale: f64) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let n = a.dim();
    let mut m: Vec<Complex64> = a.as_slice().to_vec();
    let zero = Complex64::new(0.0, 0.0);
    let mut v = vec![zero; n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
    }
    let target = OFF_DIAGONAL_TOL * scale;
    let skip = 1e-3 * target / (n as f64).max(1.0);
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&m, n, |z| z.norm_sqr());
        if off <= target {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(CmfError::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                let r = apq.norm();
                if r <= skip {
                    continue;
                }
                // U = diag(1, e^{-iφ})·R zeroes the (p, q) entry of U†AU
                let phase = (apq / r).conj();
                let app = m[p * n + p].re;
                let aqq = m[q * n + q].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let u_pp = Complex64::new(c, 0.0);
                let u_pq = Complex64::new(s, 0.0);
                let u_qp = -phase * s;
                let u_qq = phase * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = akp * u_pp + akq * u_qp;
                    m[k * n + q] = akp * u_pq + akq * u_qq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    m[q * n + k] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                m[p * n + q] = zero;
                m[q * n + p] = zero;
                m[p * n + p].im = 0.0;
                m[q * n + q].im = 0.0;
                for k in 0..n {
                    let vp = v[p * n + k];
                    let vq = v[q * n + k];
                    v[p * n + k] = vp * u_pp + vq * u_qp;
                    v[q * n + k] = vp * u_pq + vq * u_qq;
                }
            }
        }
    }
    let values = (0..n).map(|i| m[i * n + i].re).collect();
    let vectors = v.chunks(n.max(1)).take(n).map(<[Complex64]>::to_vec).collect();
    Ok((values, vectors))
}

/// Lowest eigenpair of `h` by dense diagonalization.
pub fn ground_state(h: &SpinHamiltonian) -> Result<(f64, StateVector)> {
    let eig = eigh(&h.to_dense()?)?;
    let state = eig.state(0, h.n_sites())?;
    Ok((eig.values[0], state))
}

/// The `count` lowest eigenpairs of `h`.
pub fn lowest_states(h: &SpinHamiltonian, count: usize) -> Result<Vec<(f64, StateVector)>> {
    let eig = eigh(&h.to_dense()?)?;
    if count > eig.dim() {
        return Err(CmfError::EmptySelection {
            requested: count,
            available: eig.dim(),
        });
    }
    (0..count)
        .map(|k| Ok((eig.values[k], eig.state(k, h.n_sites())?)))
        .collect()
}

/// Exact `e^{-iHt}` built from one eigendecomposition, reusable across times.
#[derive(Debug, Clone)]
pub struct Propagator {
    n_sites: usize,
    eig: EigenDecomposition,
}

impl Propagator {
    pub fn new(h: &SpinHamiltonian) -> Result<Self> {
        Ok(Self {
            n_sites: h.n_sites(),
            eig: eigh(&h.to_dense()?)?,
        })
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eig
    }

    pub fn apply(&self, t: f64, state: &StateVector) -> Result<StateVector> {
        if state.n_sites() != self.n_sites {
            return Err(CmfError::DimensionMismatch {
                expected: self.n_sites,
                found: state.n_sites(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); state.dim()];
        for (value, vec) in self.eig.values.iter().zip(&self.eig.vectors) {
            let overlap = super::matrix::inner(vec, state.amplitudes());
            let weight = overlap * Complex64::from_polar(1.0, -value * t);
            for (o, x) in out.iter_mut().zip(vec) {
                *o += weight * x;
            }
        }
        StateVector::normalized(self.n_sites, out)
    }
}

/// `e^{-iHt}|state⟩`.
pub fn propagate(h: &SpinHamiltonian, t: f64, state: &StateVector) -> Result<StateVector> {
    Propagator::new(h)?.apply(t, state)
}
