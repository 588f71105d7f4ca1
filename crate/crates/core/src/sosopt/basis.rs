use std::collections::HashSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{
    adjoint_sign_negative, hermitian_phase, indices_from_mask, product_sign_negative, MajoranaPoly, PauliSum,
    PauliTerm, PauliWord,
};

/// Operator algebra the monomials live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algebra {
    Pauli { n_qubits: usize },
    Majorana { n_modes: usize },
}

/// Canonical monomial key: a Pauli word `(x, z)` or a Majorana mask `(mask, 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mono(pub u64, pub u64);

impl Mono {
    pub const IDENTITY: Mono = Mono(0, 0);

    pub fn pauli(w: PauliWord) -> Self {
        Mono(w.x, w.z)
    }

    pub fn majorana(mask: u64) -> Self {
        Mono(mask, 0)
    }
}

impl Algebra {
    /// `m1† m2 = c · m3`.
    pub fn adj_mul(&self, m1: Mono, m2: Mono) -> (Complex64, Mono) {
        match self {
            Algebra::Pauli { .. } => {
                let (ph, w) = PauliWord::new(m1.0, m1.1).mul(&PauliWord::new(m2.0, m2.1));
                (ph.to_complex(), Mono::pauli(w))
            }
            Algebra::Majorana { .. } => {
                let neg = adjoint_sign_negative(m1.0) ^ product_sign_negative(m1.0, m2.0);
                (Complex64::new(if neg { -1.0 } else { 1.0 }, 0.0), Mono::majorana(m1.0 ^ m2.0))
            }
        }
    }

    /// Phase η making η·m Hermitian.
    pub fn hermitian_phase(&self, m: Mono) -> Complex64 {
        match self {
            Algebra::Pauli { .. } => Complex64::new(1.0, 0.0),
            Algebra::Majorana { .. } => hermitian_phase(m.0),
        }
    }

    pub fn label(&self, m: Mono) -> String {
        match self {
            Algebra::Pauli { n_qubits } => PauliWord::new(m.0, m.1).to_string_n((*n_qubits).max(1)),
            Algebra::Majorana { .. } => {
                let idx = indices_from_mask(m.0);
                if idx.is_empty() {
                    "1".to_string()
                } else {
                    idx.iter().map(|a| format!("g{a}")).collect::<Vec<_>>().join("")
                }
            }
        }
    }
}

/// Ordered monomial basis `X⃗ = (1, p_1 m_1, …)` with per-entry phases `p_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SosBasis {
    pub algebra: Algebra,
    pub monomials: Vec<Mono>,
    pub phases: Vec<Complex64>,
    pub degree: usize,
}

impl SosBasis {
    pub fn new(algebra: Algebra, monomials: Vec<Mono>, phases: Vec<Complex64>, degree: usize) -> Result<Self> {
        if monomials.len() != phases.len() {
            return Err(Error::invalid("basis phase count differs from monomial count"));
        }
        if monomials.first() != Some(&Mono::IDENTITY) {
            return Err(Error::invalid("first basis monomial must be the identity"));
        }
        let mut seen = HashSet::new();
        for &m in &monomials {
            if !seen.insert(m) {
                return Err(Error::DuplicateMonomial(algebra.label(m)));
            }
        }
        if phases.iter().any(|p| (p.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::invalid("basis phases must have unit modulus"));
        }
        Ok(SosBasis { algebra, monomials, phases, degree })
    }

    /// All Pauli words of weight at most `k` on `n` qubits, ordered by weight.
    pub fn pauli_up_to_degree(n_qubits: usize, k: usize) -> Result<Self> {
        if n_qubits > 20 {
            return Err(Error::invalid("Pauli basis enumeration limited to 20 qubits"));
        }
        let mut words: Vec<PauliWord> = Vec::new();
        let total = 1u64 << (2 * n_qubits);
        for code in 0..total {
            let mut w = PauliWord::IDENTITY;
            for q in 0..n_qubits {
                let l = (code >> (2 * q)) & 3;
                if l & 1 == 1 {
                    w.x |= 1 << q;
                }
                if l & 2 == 2 {
                    w.z |= 1 << q;
                }
            }
            if w.weight() as usize <= k {
                words.push(w);
            }
        }
        words.sort_by_key(|w| (w.weight(), *w));
        let monos: Vec<Mono> = words.into_iter().map(Mono::pauli).collect();
        let phases = vec![Complex64::new(1.0, 0.0); monos.len()];
        SosBasis::new(Algebra::Pauli { n_qubits }, monos, phases, k)
    }

    /// `{1, γ_a, iγ_aγ_b}` with `a < b` in lexicographic order.
    pub fn majorana_degree2(n_modes: usize) -> Result<Self> {
        if n_modes == 0 || n_modes > 64 {
            return Err(Error::invalid(format!("unsupported mode count {n_modes}")));
        }
        let mut monos = vec![Mono::IDENTITY];
        let mut phases = vec![Complex64::new(1.0, 0.0)];
        for a in 0..n_modes {
            monos.push(Mono::majorana(1 << a));
            phases.push(Complex64::new(1.0, 0.0));
        }
        for a in 0..n_modes {
            for b in a + 1..n_modes {
                monos.push(Mono::majorana((1 << a) | (1 << b)));
                phases.push(Complex64::new(0.0, 1.0));
            }
        }
        SosBasis::new(Algebra::Majorana { n_modes }, monos, phases, 2)
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.monomials
            .iter()
            .zip(&self.phases)
            .map(|(&m, p)| {
                let l = self.algebra.label(m);
                if (p - Complex64::new(1.0, 0.0)).norm() < 1e-12 {
                    l
                } else if (p - Complex64::new(0.0, 1.0)).norm() < 1e-12 {
                    format!("i{l}")
                } else {
                    format!("({p}){l}")
                }
            })
            .collect()
    }

    /// `Σ_k v_k X_k` as a Majorana polynomial.
    pub fn majorana_combination(&self, v: &[Complex64]) -> Result<MajoranaPoly> {
        let Algebra::Majorana { n_modes } = self.algebra else {
            return Err(Error::invalid("basis is not Majorana"));
        };
        let mut p = MajoranaPoly::zero(n_modes);
        for ((m, ph), c) in self.monomials.iter().zip(&self.phases).zip(v) {
            p.add_term(m.0, ph * c)?;
        }
        p.prune();
        Ok(p)
    }

    /// `Σ_k v_k X_k` as a Pauli sum (Jordan–Wigner for Majorana bases).
    pub fn operator(&self, v: &[Complex64]) -> Result<PauliSum> {
        match self.algebra {
            Algebra::Pauli { n_qubits } => PauliSum::new(
                n_qubits,
                self.monomials
                    .iter()
                    .zip(&self.phases)
                    .zip(v)
                    .map(|((m, ph), c)| PauliTerm::new(ph * c, PauliWord::new(m.0, m.1))),
            ),
            Algebra::Majorana { .. } => self.majorana_combination(v)?.to_pauli(),
        }
    }
}
