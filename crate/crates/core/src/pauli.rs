//! Weighted Pauli-string Hamiltonians.
//!
//! A [`SpinHamiltonian`] is a real linear combination of Pauli strings on a
//! fixed number of sites. The text format is one term per line,
//! `<coeff> <axes>`, where `axes` is a string over `IXYZ` whose first
//! character acts on the first site:
//!
//! ```text
//! # three-spin network, g1 = 1, g2 = 2, g3 = 0.1
//! 1.0 ZII
//! 1.0 IZI
//! 1.0 IIZ
//! 2.0 XXI
//! 2.0 IXX
//! 0.1 XXX
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dense::{DenseMatrix, StateVector};
use crate::error::{CmfError, Result};

/// Default cap on the number of sites realized as a dense matrix.
pub const MAX_DENSE_SITES: usize = 12;
/// Merged coefficients below this magnitude are dropped.
pub const MERGE_TOL: f64 = 1e-14;
/// Largest imaginary residual tolerated in an expectation value.
pub const IMAG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PauliAxis {
    I,
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Self::I),
            'X' => Some(Self::X),
            'Y' => Some(Self::Y),
            'Z' => Some(Self::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Self::I => 'I',
            Self::X => 'X',
            Self::Y => 'Y',
            Self::Z => 'Z',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coeff: f64,
    pub axes: Vec<PauliAxis>,
}

impl PauliTerm {
    pub fn new(coeff: f64, axes: Vec<PauliAxis>) -> Self {
        Self { coeff, axes }
    }

    /// `coeff` times the Pauli string spelled by `axes`, e.g. `"XXI"`.
    pub fn from_str_axes(coeff: f64, axes: &str) -> Result<Self> {
        let axes = parse_axes(axes).map_err(|msg| CmfError::Parse { line: 0, msg })?;
        Ok(Self { coeff, axes })
    }

    pub fn axes_string(&self) -> String {
        self.axes.iter().map(|a| a.as_char()).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.axes.iter().all(|&a| a == PauliAxis::I)
    }
}

fn parse_axes(s: &str) -> std::result::Result<Vec<PauliAxis>, String> {
    s.chars()
        .map(|c| PauliAxis::from_char(c).ok_or_else(|| format!("invalid Pauli axis {c:?}")))
        .collect()
}

/// Bit masks describing how a Pauli string acts on computational basis states:
/// `P|b⟩ = i^{n_y} (-1)^{popcount(b & z)} |b ^ x⟩`.
#[derive(Debug, Clone, Copy)]
struct PauliMasks {
    x: usize,
    z: usize,
    y_phase: Complex64,
}

impl PauliMasks {
    fn new(axes: &[PauliAxis]) -> Self {
        let n = axes.len();
        let (mut x, mut z, mut ny) = (0usize, 0usize, 0u32);
        for (site, axis) in axes.iter().enumerate() {
            let bit = 1usize << (n - 1 - site);
            match axis {
                PauliAxis::I => {}
                PauliAxis::X => x |= bit,
                PauliAxis::Z => z |= bit,
                PauliAxis::Y => {
                    x |= bit;
                    z |= bit;
                    ny += 1;
                }
            }
        }
        let y_phase = match ny % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        Self { x, z, y_phase }
    }

    #[inline]
    fn phase(&self, b: usize) -> Complex64 {
        if (b & self.z).count_ones() % 2 == 0 {
            self.y_phase
        } else {
            -self.y_phase
        }
    }

    fn expectation(&self, amps: &[Complex64]) -> Complex64 {
        amps.iter()
            .enumerate()
            .map(|(b, a)| amps[b ^ self.x].conj() * self.phase(b) * a)
            .sum()
    }
}

/// Ordered subset of global sites forming a cluster, plus its complement.
///
/// Sites are zero-based here; files and the CLI use one-based numbering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteMap {
    pub cluster_sites: Vec<usize>,
    pub env_sites: Vec<usize>,
}

impl SiteMap {
    /// `cluster_sites` must be distinct and below `n_sites`; the environment is
    /// the ascending complement.
    pub fn new(cluster_sites: Vec<usize>, n_sites: usize) -> Result<Self> {
        let mut seen = vec![false; n_sites];
        for &s in &cluster_sites {
            if s >= n_sites {
                return Err(CmfError::InvalidPartition(format!(
                    "site {s} outside 0..{n_sites}"
                )));
            }
            if std::mem::replace(&mut seen[s], true) {
                return Err(CmfError::OverlappingSites(s));
            }
        }
        if cluster_sites.is_empty() {
            return Err(CmfError::InvalidPartition("empty cluster".into()));
        }
        let env_sites = (0..n_sites).filter(|&s| !seen[s]).collect();
        Ok(Self {
            cluster_sites,
            env_sites,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.cluster_sites.len() + self.env_sites.len()
    }
}

/// Real combination of Pauli strings with merged, sorted terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinHamiltonian {
    n_sites: usize,
    terms: Vec<PauliTerm>,
}

impl SpinHamiltonian {
    pub fn new(n_sites: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        if n_sites == 0 {
            return Err(CmfError::InvalidConfig("hamiltonian needs at least one site".into()));
        }
        let mut merged: BTreeMap<Vec<PauliAxis>, f64> = BTreeMap::new();
        for term in terms {
            if term.axes.len() != n_sites {
                return Err(CmfError::DimensionMismatch {
                    expected: n_sites,
                    found: term.axes.len(),
                });
            }
            if !term.coeff.is_finite() {
                return Err(CmfError::InvalidConfig(format!(
                    "non-finite coefficient on {}",
                    term.axes_string()
                )));
            }
            *merged.entry(term.axes).or_insert(0.0) += term.coeff;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| c.abs() >= MERGE_TOL)
            .map(|(axes, coeff)| PauliTerm { coeff, axes })
            .collect();
        Ok(Self { n_sites, terms })
    }

    /// The zero operator on `n_sites`.
    pub fn zero(n_sites: usize) -> Self {
        Self {
            n_sites,
            terms: Vec::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut n_sites: Option<usize> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| CmfError::Parse { line: line_no, msg };
            let mut fields = line.split_whitespace();
            let (Some(coeff), Some(axes), None) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(err(format!("expected `<coeff> <axes>`, got {line:?}")));
            };
            let coeff: f64 = coeff
                .parse()
                .map_err(|_| err(format!("invalid coefficient {coeff:?}")))?;
            if !coeff.is_finite() {
                return Err(err(format!("non-finite coefficient {coeff}")));
            }
            let axes = parse_axes(axes).map_err(err)?;
            match n_sites {
                None => n_sites = Some(axes.len()),
                Some(n) if n != axes.len() => {
                    return Err(err(format!(
                        "axes string has length {}, earlier terms have {n}",
                        axes.len()
                    )))
                }
                _ => {}
            }
            terms.push(PauliTerm { coeff, axes });
        }
        let n_sites = n_sites.ok_or(CmfError::NoTerms)?;
        Self::new(n_sites, terms)
    }

    /// Canonical text form: terms sorted by axes string, 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for term in &self.terms {
            out.push_str(&format!("{:.16e} {}\n", term.coeff, term.axes_string()));
        }
        out
    }

    /// SHA-256 of the canonical text form, hex encoded.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(format!("n_sites={}\n", self.n_sites).as_bytes());
        hasher.update(self.to_text().as_bytes());
        hex::encode(hasher.finalize())
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// Coefficient of the given axes pattern (zero when absent).
    pub fn coefficient(&self, axes: &str) -> f64 {
        let Ok(axes) = parse_axes(axes) else {
            return 0.0;
        };
        self.terms
            .iter()
            .find(|t| t.axes == axes)
            .map_or(0.0, |t| t.coeff)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(
            self.n_sites,
            self.terms
                .iter()
                .map(|t| PauliTerm::new(t.coeff * factor, t.axes.clone()))
                .collect(),
        )
        .expect("scaling keeps the site count")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n_sites != other.n_sites {
            return Err(CmfError::DimensionMismatch {
                expected: self.n_sites,
                found: other.n_sites,
            });
        }
        Self::new(
            self.n_sites,
            self.terms.iter().chain(&other.terms).cloned().collect(),
        )
    }

    /// Dense matrix with the default cap of [`MAX_DENSE_SITES`].
    pub fn to_dense(&self) -> Result<DenseMatrix> {
        self.to_dense_capped(MAX_DENSE_SITES)
    }

    pub fn to_dense_capped(&self, max_sites: usize) -> Result<DenseMatrix> {
        if self.n_sites > max_sites {
            return Err(CmfError::DimensionCap {
                n_sites: self.n_sites,
                cap: max_sites,
            });
        }
        let dim = 1usize << self.n_sites;
        let mut m = DenseMatrix::zeros(dim);
        for term in &self.terms {
            let masks = PauliMasks::new(&term.axes);
            for b in 0..dim {
                m[(b ^ masks.x, b)] += masks.phase(b) * term.coeff;
            }
        }
        Ok(m)
    }

    /// `H|ψ⟩` without building the matrix.
    pub fn apply(&self, amps: &[Complex64]) -> Result<Vec<Complex64>> {
        let dim = 1usize << self.n_sites;
        if amps.len() != dim {
            return Err(CmfError::DimensionMismatch {
                expected: dim,
                found: amps.len(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for term in &self.terms {
            let masks = PauliMasks::new(&term.axes);
            for (b, a) in amps.iter().enumerate() {
                out[b ^ masks.x] += masks.phase(b) * term.coeff * a;
            }
        }
        Ok(out)
    }

    /// `⟨ψ|H|ψ⟩`, after checking the imaginary residual is below [`IMAG_TOL`].
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        if state.n_sites() != self.n_sites {
            return Err(CmfError::DimensionMismatch {
                expected: self.n_sites,
                found: state.n_sites(),
            });
        }
        let amps = state.amplitudes();
        let value: Complex64 = self
            .terms
            .iter()
            .map(|t| PauliMasks::new(&t.axes).expectation(amps) * t.coeff)
            .sum();
        if value.im.abs() > IMAG_TOL {
            return Err(CmfError::ImaginaryResidual(value.im));
        }
        Ok(value.re)
    }

    /// Partial average `⟨φ_env|H|φ_env⟩` over the environment sites, leaving a
    /// Hamiltonian on the cluster sites (in `map.cluster_sites` order). Pure
    /// environment terms collect into the identity coefficient.
    pub fn reduce(&self, map: &SiteMap, env_state: &StateVector) -> Result<Self> {
        if map.n_sites() != self.n_sites {
            return Err(CmfError::DimensionMismatch {
                expected: self.n_sites,
                found: map.n_sites(),
            });
        }
        if env_state.n_sites() != map.env_sites.len() {
            return Err(CmfError::DimensionMismatch {
                expected: map.env_sites.len(),
                found: env_state.n_sites(),
            });
        }
        let amps = env_state.amplitudes();
        let mut env_cache: HashMap<Vec<PauliAxis>, f64> = HashMap::new();
        let mut out = Vec::with_capacity(self.terms.len());
        for term in &self.terms {
            let cluster: Vec<PauliAxis> = map.cluster_sites.iter().map(|&s| term.axes[s]).collect();
            let env: Vec<PauliAxis> = map.env_sites.iter().map(|&s| term.axes[s]).collect();
            let factor = if env.iter().all(|&a| a == PauliAxis::I) {
                1.0
            } else if let Some(&f) = env_cache.get(&env) {
                f
            } else {
                let value = PauliMasks::new(&env).expectation(amps);
                if value.im.abs() > IMAG_TOL {
                    return Err(CmfError::ImaginaryResidual(value.im));
                }
                env_cache.insert(env, value.re);
                value.re
            };
            out.push(PauliTerm::new(term.coeff * factor, cluster));
        }
        Self::new(map.cluster_sites.len(), out)
    }

    /// `Σ g1 Z_i + Σ g2 X_i X_{i+1}` on an open chain of `n` sites.
    pub fn chain(n: usize, g1: f64, g2: f64) -> Result<Self> {
        let mut terms = Vec::new();
        for i in 0..n {
            terms.push(PauliTerm::new(g1, single(n, &[(i, PauliAxis::Z)])));
        }
        for i in 0..n.saturating_sub(1) {
            terms.push(PauliTerm::new(
                g2,
                single(n, &[(i, PauliAxis::X), (i + 1, PauliAxis::X)]),
            ));
        }
        Self::new(n, terms)
    }

    /// `g1(Z1+Z2+Z3) + g2(X1X2 + X2X3) + g3 X1X2X3`.
    pub fn three_spin(g1: f64, g2: f64, g3: f64) -> Self {
        use PauliAxis::{I, X, Z};
        Self::new(
            3,
            vec![
                PauliTerm::new(g1, vec![Z, I, I]),
                PauliTerm::new(g1, vec![I, Z, I]),
                PauliTerm::new(g1, vec![I, I, Z]),
                PauliTerm::new(g2, vec![X, X, I]),
                PauliTerm::new(g2, vec![I, X, X]),
                PauliTerm::new(g3, vec![X, X, X]),
            ],
        )
        .expect("three-spin template is well formed")
    }
}

fn single(n: usize, ops: &[(usize, PauliAxis)]) -> Vec<PauliAxis> {
    let mut axes = vec![PauliAxis::I; n];
    for &(site, axis) in ops {
        axes[site] = axis;
    }
    axes
}

impl fmt::Display for SpinHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
