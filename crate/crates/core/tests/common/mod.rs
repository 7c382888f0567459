//! Independent references shared by the integration tests: dense operators
//! built from explicit Kronecker products, and proptest strategies.

#![allow(dead_code)]

use cmf::dense::{DenseMatrix, StateVector};
use cmf::pauli::{PauliAxis, PauliTerm, SpinHamiltonian};
use num_complex::Complex64;
use proptest::prelude::*;

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn pauli(ch: char) -> [[C; 2]; 2] {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match ch {
        'I' => [[o, z], [z, o]],
        'X' => [[z, o], [o, z]],
        'Y' => [[z, -i], [i, z]],
        'Z' => [[o, z], [z, -o]],
        _ => panic!("bad axis {ch}"),
    }
}

fn kron(a: &[Vec<C>], b: &[[C; 2]; 2]) -> Vec<Vec<C>> {
    let n = a.len();
    let mut out = vec![vec![c(0.0, 0.0); 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            for p in 0..2 {
                for q in 0..2 {
                    out[2 * i + p][2 * j + q] = a[i][j] * b[p][q];
                }
            }
        }
    }
    out
}

/// `Σ c_k P_k` with every `P_k` formed as `σ_1 ⊗ σ_2 ⊗ …` (site 1 leftmost).
pub fn kron_dense(h: &SpinHamiltonian) -> Vec<Vec<C>> {
    let dim = 1usize << h.n_sites();
    let mut total = vec![vec![c(0.0, 0.0); dim]; dim];
    for term in h.terms() {
        let mut m = vec![vec![c(1.0, 0.0)]];
        for ch in term.axes_string().chars() {
            m = kron(&m, &pauli(ch));
        }
        for i in 0..dim {
            for j in 0..dim {
                total[i][j] += m[i][j] * term.coeff;
            }
        }
    }
    total
}

/// Full index of cluster bits `i` and environment bits `e`.
fn compose(n: usize, cluster: &[usize], env: &[usize], i: usize, e: usize) -> usize {
    let mut idx = 0;
    for (k, &s) in cluster.iter().enumerate() {
        let bit = (i >> (cluster.len() - 1 - k)) & 1;
        idx |= bit << (n - 1 - s);
    }
    for (k, &s) in env.iter().enumerate() {
        let bit = (e >> (env.len() - 1 - k)) & 1;
        idx |= bit << (n - 1 - s);
    }
    idx
}

/// `⟨φ|H|φ⟩` traced over the environment sites by explicit summation.
pub fn partial_contract(
    full: &[Vec<C>],
    n: usize,
    cluster: &[usize],
    env: &[usize],
    phi: &[C],
) -> Vec<Vec<C>> {
    let dc = 1usize << cluster.len();
    let de = 1usize << env.len();
    let mut out = vec![vec![c(0.0, 0.0); dc]; dc];
    for i in 0..dc {
        for j in 0..dc {
            let mut acc = c(0.0, 0.0);
            for e in 0..de {
                for f in 0..de {
                    acc += phi[e].conj()
                        * full[compose(n, cluster, env, i, e)][compose(n, cluster, env, j, f)]
                        * phi[f];
                }
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn max_diff(a: &[Vec<C>], b: &DenseMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            worst = worst.max((v - b[(i, j)]).norm());
        }
    }
    worst
}

pub fn mat_vec(a: &[Vec<C>], v: &[C]) -> Vec<C> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn axis() -> impl Strategy<Value = PauliAxis> {
    prop_oneof![
        Just(PauliAxis::I),
        Just(PauliAxis::X),
        Just(PauliAxis::Y),
        Just(PauliAxis::Z)
    ]
}

pub fn term(n: usize) -> impl Strategy<Value = PauliTerm> {
    (-2.0..2.0f64, prop::collection::vec(axis(), n)).prop_map(|(c, a)| PauliTerm::new(c, a))
}

pub fn hamiltonian_on(n: usize, max_terms: usize) -> impl Strategy<Value = SpinHamiltonian> {
    prop::collection::vec(term(n), 1..=max_terms)
        .prop_map(move |t| SpinHamiltonian::new(n, t).expect("valid hamiltonian"))
}

pub fn hamiltonian(min_n: usize, max_n: usize) -> impl Strategy<Value = SpinHamiltonian> {
    (min_n..=max_n).prop_flat_map(|n| hamiltonian_on(n, 8))
}

/// Real-coefficient `X`/`Z` Hamiltonians, so `H_eff` stays real.
pub fn real_hamiltonian_on(n: usize) -> impl Strategy<Value = SpinHamiltonian> {
    let real_axis = prop_oneof![Just(PauliAxis::I), Just(PauliAxis::X), Just(PauliAxis::Z)];
    prop::collection::vec((-2.0..2.0f64, prop::collection::vec(real_axis, n)), 1..=8).prop_map(
        move |t| {
            SpinHamiltonian::new(n, t.into_iter().map(|(c, a)| PauliTerm::new(c, a)).collect())
                .expect("valid hamiltonian")
        },
    )
}

pub fn amplitudes(dim: usize) -> impl Strategy<Value = Vec<C>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim)
        .prop_filter("non-zero vector", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| v.into_iter().map(|(a, b)| c(a, b)).collect())
}

pub fn state(n: usize) -> impl Strategy<Value = StateVector> {
    amplitudes(1 << n).prop_map(move |a| StateVector::normalized(n, a).expect("non-zero"))
}

/// Random Hermitian matrix of dimension `1..=max_dim`.
pub fn hermitian(max_dim: usize) -> impl Strategy<Value = DenseMatrix> {
    (1..=max_dim).prop_flat_map(|d| {
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), d * d).prop_map(move |raw| {
            let at = |i: usize, j: usize| c(raw[i * d + j].0, raw[i * d + j].1);
            DenseMatrix::from_fn(d, |i, j| {
                if i == j {
                    c(at(i, i).re, 0.0)
                } else if i < j {
                    at(i, j)
                } else {
                    at(j, i).conj()
                }
            })
        })
    })
}

/// A Hamiltonian, a non-empty proper cluster of its sites, and an
/// environment state on the rest.
pub fn reduction_case(max_n: usize) -> impl Strategy<Value = (SpinHamiltonian, Vec<usize>, Vec<usize>, StateVector)> {
    (2..=max_n)
        .prop_flat_map(|n| (hamiltonian_on(n, 8), 1usize..(1 << n) - 1))
        .prop_flat_map(|(h, mask)| {
            let n = h.n_sites();
            let cluster: Vec<usize> = (0..n).filter(|s| mask >> s & 1 == 1).collect();
            let env: Vec<usize> = (0..n).filter(|s| mask >> s & 1 == 0).collect();
            let k = env.len();
            (Just(h), Just(cluster), Just(env), state(k))
        })
}
