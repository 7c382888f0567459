use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{inner, norm};
use crate::error::{CmfError, Result};

pub(crate) const NORM_TOL: f64 = 1e-10;

/// Unit-norm amplitude vector over the computational basis of `n_sites` spins.
///
/// Basis index bit `n_sites - 1 - k` holds site `k`, so the first site is the
/// most significant bit. `|0⟩` is spin up (`Z = +1`), `|1⟩` spin down.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    n_sites: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes that are already unit norm (to `1e-10`).
    pub fn from_amplitudes(n_sites: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_len(n_sites, amplitudes.len())?;
        let nrm = norm(&amplitudes);
        if (nrm - 1.0).abs() > NORM_TOL {
            return Err(CmfError::InvalidConfig(format!(
                "state norm {nrm} is not 1"
            )));
        }
        Ok(Self {
            n_sites,
            amplitudes,
        })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(n_sites: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        check_len(n_sites, amplitudes.len())?;
        let nrm = norm(&amplitudes);
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(CmfError::InvalidConfig("cannot normalize a zero vector".into()));
        }
        for a in &mut amplitudes {
            *a /= nrm;
        }
        Ok(Self {
            n_sites,
            amplitudes,
        })
    }

    pub fn from_real(n_sites: usize, amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(
            n_sites,
            amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn basis(n_sites: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_sites];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self {
            n_sites,
            amplitudes,
        }
    }

    /// `"101"` is `|1⟩⊗|0⟩⊗|1⟩`, first character on the first site.
    pub fn from_bitstring(bits: &str) -> Result<Self> {
        let mut index = 0usize;
        for (pos, ch) in bits.chars().enumerate() {
            index <<= 1;
            match ch {
                '0' => {}
                '1' => index |= 1,
                _ => {
                    return Err(CmfError::Parse {
                        line: 0,
                        msg: format!("bitstring character {pos} is {ch:?}, expected 0 or 1"),
                    })
                }
            }
        }
        if bits.is_empty() {
            return Err(CmfError::InvalidConfig("empty bitstring".into()));
        }
        Ok(Self::basis(bits.len(), index))
    }

    /// Equal-amplitude product of `(|0⟩+|1⟩)/√2` on every site.
    pub fn uniform(n_sites: usize) -> Self {
        let dim = 1usize << n_sites;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self {
            n_sites,
            amplitudes: vec![a; dim],
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(CmfError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    /// Rotates the global phase so the largest-magnitude amplitude (first one
    /// on ties) is real and positive.
    pub fn canonicalize_phase(&mut self) {
        canonicalize_phase(&mut self.amplitudes);
    }

    pub fn canonical(mut self) -> Self {
        self.canonicalize_phase();
        self
    }

    /// Probability of each computational basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

fn check_len(n_sites: usize, len: usize) -> Result<()> {
    if n_sites >= usize::BITS as usize || len != 1usize << n_sites {
        return Err(CmfError::DimensionMismatch {
            expected: 1usize.checked_shl(n_sites as u32).unwrap_or(0),
            found: len,
        });
    }
    Ok(())
}

pub(crate) fn canonicalize_phase(v: &mut [Complex64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-12))
        .unwrap_or(0);
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[pivot].im = 0.0;
}

/// `|⟨a|b⟩|²`, independent of either state's global phase.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// Tensor product of states living on disjoint site sets, reordered so the
/// result follows ascending global site index. Returns the state together with
/// its (sorted) site list.
pub fn embed_product(
    a: &StateVector,
    sites_a: &[usize],
    b: &StateVector,
    sites_b: &[usize],
) -> Result<(StateVector, Vec<usize>)> {
    if sites_a.len() != a.n_sites() {
        return Err(CmfError::DimensionMismatch {
            expected: a.n_sites(),
            found: sites_a.len(),
        });
    }
    if sites_b.len() != b.n_sites() {
        return Err(CmfError::DimensionMismatch {
            expected: b.n_sites(),
            found: sites_b.len(),
        });
    }
    if let Some(&s) = sites_a.iter().find(|s| sites_b.contains(s)) {
        return Err(CmfError::OverlappingSites(s));
    }
    let mut union: Vec<usize> = sites_a.iter().chain(sites_b).copied().collect();
    union.sort_unstable();
    let n = union.len();
    // bit position of each local site inside the union index
    let pos_of = |site: usize| n - 1 - union.binary_search(&site).expect("site in union");
    let a_bits: Vec<usize> = sites_a.iter().map(|&s| pos_of(s)).collect();
    let b_bits: Vec<usize> = sites_b.iter().map(|&s| pos_of(s)).collect();
    let gather = |index: usize, bits: &[usize]| {
        bits.iter()
            .fold(0usize, |acc, &p| (acc << 1) | ((index >> p) & 1))
    };
    let amplitudes = (0..1usize << n)
        .map(|idx| a.amplitudes[gather(idx, &a_bits)] * b.amplitudes[gather(idx, &b_bits)])
        .collect();
    Ok((
        StateVector {
            n_sites: n,
            amplitudes,
        },
        union,
    ))
}

/// Distribution of the total Z moment `M_Z = Σ Z_i` over a state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentHistogram {
    pub n_sites: usize,
    /// Keyed by the moment eigenvalue `n₀ − n₁`.
    pub bins: BTreeMap<i32, f64>,
}

impl MomentHistogram {
    pub fn total(&self) -> f64 {
        self.bins.values().sum()
    }

    pub fn probability(&self, moment: i32) -> f64 {
        self.bins.get(&moment).copied().unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.bins.iter().map(|(&m, &p)| m as f64 * p).sum()
    }

    /// Shannon entropy of the bin weights, in nats.
    pub fn entropy(&self) -> f64 {
        self.bins
            .values()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.ln())
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.bins
            .iter()
            .map(|(&m, &p)| (m as f64 - mean).powi(2) * p)
            .sum()
    }
}

pub fn z_moment_distribution(state: &StateVector) -> MomentHistogram {
    let n = state.n_sites() as i32;
    let mut bins: BTreeMap<i32, f64> = (0..=n).map(|k| (n - 2 * k, 0.0)).collect();
    for (idx, amp) in state.amplitudes().iter().enumerate() {
        let ones = idx.count_ones() as i32;
        *bins.get_mut(&(n - 2 * ones)).expect("moment bin") += amp.norm_sqr();
    }
    MomentHistogram {
        n_sites: state.n_sites(),
        bins,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn fidelity_basic_cases() {
        let zero = StateVector::basis(1, 0);
        let one = StateVector::basis(1, 1);
        let plus = StateVector::uniform(1);
        assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert!(fidelity(&zero, &one).unwrap().abs() < 1e-15);
        assert!((fidelity(&zero, &plus).unwrap() - 0.5).abs() < 1e-15);
        assert!(fidelity(&zero, &StateVector::basis(2, 0)).is_err());
    }

    #[test]
    fn fidelity_ignores_global_phase() {
        let a = StateVector::from_real(2, &[0.3, -0.1, 0.7, 0.2]).unwrap();
        let b = StateVector::from_real(2, &[0.5, 0.5, -0.1, 0.3]).unwrap();
        let phase = Complex64::from_polar(1.0, 1.234);
        let b_rot = StateVector::from_amplitudes(
            2,
            b.amplitudes().iter().map(|z| z * phase).collect(),
        )
        .unwrap();
        let f1 = fidelity(&a, &b).unwrap();
        assert!((f1 - fidelity(&a, &b_rot).unwrap()).abs() < 1e-14);
        assert!((f1 - fidelity(&b, &a).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn embed_simple_product() {
        let one = StateVector::basis(1, 1);
        let zero = StateVector::basis(1, 0);
        let (s, sites) = embed_product(&one, &[0], &zero, &[1]).unwrap();
        assert_eq!(sites, vec![0, 1]);
        assert_eq!(s, StateVector::from_bitstring("10").unwrap());
        // reversed roles give the same global state
        let (s2, _) = embed_product(&zero, &[1], &one, &[0]).unwrap();
        assert_eq!(s2, s);
    }

    #[test]
    fn embed_permutes_interleaved_sites() {
        // |1⟩ on site 1, |01⟩ on sites {0, 2}
        let a = StateVector::from_bitstring("1").unwrap();
        let b = StateVector::from_bitstring("01").unwrap();
        let (s, sites) = embed_product(&a, &[1], &b, &[0, 2]).unwrap();
        assert_eq!(sites, vec![0, 1, 2]);
        assert_eq!(s, StateVector::from_bitstring("011").unwrap());
    }

    #[test]
    fn embed_uniform_is_uniform() {
        let (s, _) =
            embed_product(&StateVector::uniform(2), &[0, 3], &StateVector::uniform(2), &[1, 2])
                .unwrap();
        let u = StateVector::uniform(4);
        assert!(s.amplitudes().iter().zip(u.amplitudes()).all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn embed_rejects_overlap() {
        let a = StateVector::basis(1, 0);
        assert!(matches!(
            embed_product(&a, &[2], &a, &[2]),
            Err(CmfError::OverlappingSites(2))
        ));
    }

    #[test]
    fn moment_of_all_down() {
        let h = z_moment_distribution(&StateVector::from_bitstring("111").unwrap());
        assert_eq!(h.probability(-3), 1.0);
        assert_eq!(h.bins.len(), 4);
        assert!((h.total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn moment_of_uniform_single_spin() {
        let h = z_moment_distribution(&StateVector::uniform(1));
        assert!((h.probability(1) - 0.5).abs() < 1e-15);
        assert!((h.probability(-1) - 0.5).abs() < 1e-15);
        assert!((h.variance() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn canonical_phase_makes_pivot_positive() {
        let s = StateVector::from_amplitudes(
            1,
            vec![Complex64::new(0.0, 0.6), Complex64::new(0.0, -0.8)],
        )
        .unwrap()
        .canonical();
        assert!((s.amplitudes()[1] - c(0.8)).norm() < 1e-15);
        assert!((s.amplitudes()[0] - c(-0.6)).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_lengths_and_norms() {
        assert!(StateVector::from_amplitudes(2, vec![c(1.0); 3]).is_err());
        assert!(StateVector::from_amplitudes(1, vec![c(1.0), c(1.0)]).is_err());
        assert!(StateVector::normalized(1, vec![c(0.0), c(0.0)]).is_err());
        assert!(StateVector::from_bitstring("012").is_err());
    }
}
