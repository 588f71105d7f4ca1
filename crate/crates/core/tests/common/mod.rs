//! Dense oracles built from first principles, shared by the contract tests.
#![allow(dead_code)]

use faer::{c64, Mat, Side};
use sossa_core::operators::PauliSum;
use sossa_core::sosopt::{Algebra, SosGenerators};
use sossa_core::syk::SykInstance;

pub fn c(re: f64, im: f64) -> c64 {
    c64::new(re, im)
}

pub fn letter(ch: char) -> Mat<c64> {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    let e = match ch {
        'I' => [o, z, z, o],
        'X' => [z, o, o, z],
        'Y' => [z, -i, i, z],
        'Z' => [o, z, z, -o],
        _ => panic!("bad letter {ch}"),
    };
    Mat::from_fn(2, 2, |r, s| e[2 * r + s])
}

pub fn kron(a: &Mat<c64>, b: &Mat<c64>) -> Mat<c64> {
    let (r, s) = (b.nrows(), b.ncols());
    Mat::from_fn(a.nrows() * r, a.ncols() * s, |i, j| a[(i / r, j / s)] * b[(i % r, j % s)])
}

/// Character `q` acts on bit `q` of the basis index.
pub fn pauli_matrix(word: &str) -> Mat<c64> {
    let mut m = Mat::from_fn(1, 1, |_, _| c(1.0, 0.0));
    for ch in word.chars() {
        m = kron(&letter(ch), &m);
    }
    m
}

pub fn identity(d: usize) -> Mat<c64> {
    Mat::from_fn(d, d, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

pub fn zeros(d: usize) -> Mat<c64> {
    Mat::zeros(d, d)
}

/// γ_{2k−1} = Z…Z X_k, γ_{2k} = Z…Z Y_k, with `a` 1-based.
pub fn majorana_matrix(a: usize, n_modes: usize) -> Mat<c64> {
    let n = n_modes / 2;
    let k = (a - 1) / 2;
    let word: String = (0..n)
        .map(|q| match q.cmp(&k) {
            std::cmp::Ordering::Less => 'Z',
            std::cmp::Ordering::Equal => if a % 2 == 1 { 'X' } else { 'Y' },
            std::cmp::Ordering::Greater => 'I',
        })
        .collect();
    pauli_matrix(&word)
}

/// Ordered product of γ over the set bits of `mask` (bit `a−1` is γ_a).
pub fn mask_matrix(mask: u64, n_modes: usize) -> Mat<c64> {
    let mut m = identity(1 << (n_modes / 2));
    for a in 1..=n_modes {
        if mask >> (a - 1) & 1 == 1 {
            m = &m * majorana_matrix(a, n_modes);
        }
    }
    m
}

pub fn pauli_sum_matrix(h: &PauliSum) -> Mat<c64> {
    let n = h.n_qubits();
    let mut m = zeros(1 << n);
    for t in h.terms() {
        m += pauli_matrix(&t.word.to_string_n(n)) * faer::Scale(t.coeff);
    }
    m
}

pub fn syk_matrix(inst: &SykInstance) -> Mat<c64> {
    let n = inst.n_modes;
    let s = 1.0 / (sossa_core::syk::binomial(n, 4) as f64).sqrt();
    let g: Vec<Mat<c64>> = (1..=n).map(|a| majorana_matrix(a, n)).collect();
    let mut h = zeros(1 << (n / 2));
    for cp in &inst.couplings {
        let [a, b, cc, d] = cp.indices;
        h += (&g[a - 1] * &g[b - 1] * &g[cc - 1] * &g[d - 1]) * faer::Scale(c(s * cp.g, 0.0));
    }
    h
}

/// `B_j = Σ_l b_jl X_l` realized from the basis monomials.
pub fn generator_matrices(gens: &SosGenerators) -> Vec<Mat<c64>> {
    let basis = &gens.basis;
    let monos: Vec<Mat<c64>> = basis
        .monomials
        .iter()
        .zip(&basis.phases)
        .map(|(m, ph)| {
            let raw = match basis.algebra {
                Algebra::Pauli { n_qubits } => {
                    let w = sossa_core::operators::PauliWord::new(m.0, m.1);
                    pauli_matrix(&w.to_string_n(n_qubits))
                }
                Algebra::Majorana { n_modes } => mask_matrix(m.0, n_modes),
            };
            raw * faer::Scale(*ph)
        })
        .collect();
    let d = monos[0].nrows();
    gens.vectors
        .iter()
        .map(|b| {
            let mut acc = zeros(d);
            for (coef, x) in b.iter().zip(&monos) {
                acc += x * faer::Scale(*coef);
            }
            acc
        })
        .collect()
}

pub fn sum_of_squares(bs: &[Mat<c64>]) -> Mat<c64> {
    let mut s = zeros(bs[0].nrows());
    for b in bs {
        s += b.adjoint() * b;
    }
    s
}

pub fn fro(m: &Mat<c64>) -> f64 {
    let mut s = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            s += m[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

pub fn max_abs(m: &Mat<c64>) -> f64 {
    let mut s = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            s = s.max(m[(i, j)].norm());
        }
    }
    s
}

pub fn herm_eigs(m: &Mat<c64>) -> Vec<f64> {
    let mut v = m.self_adjoint_eigenvalues(Side::Lower).expect("eigensolver");
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

pub fn add_identity(m: &Mat<c64>, s: f64) -> Mat<c64> {
    m + identity(m.nrows()) * faer::Scale(c(s, 0.0))
}
