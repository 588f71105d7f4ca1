use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dense::DenseOperator;
use super::pauli::{PauliTerm, PauliWord, MAX_QUBITS};
use crate::error::{Error, Result};

/// Coefficients with magnitude below this are dropped after merging.
pub const MERGE_TOL: f64 = 1e-14;

/// Default qubit cap for dense realizations.
pub const DEFAULT_DENSE_CAP: usize = 14;

/// Linear combination of Pauli words on a fixed number of qubits.
///
/// Terms are merged by word, sorted, and stripped of negligible
/// coefficients on construction. The ℓ1 norm of the coefficients is cached.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
    lambda_lcu: f64,
}

/// Hamiltonian presented as a linear combination of Pauli words.
pub type LcuHamiltonian = PauliSum;

impl PauliSum {
    pub fn new(n_qubits: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::invalid(format!("{n_qubits} qubits exceeds {MAX_QUBITS}")));
        }
        let mut merged: BTreeMap<PauliWord, Complex64> = BTreeMap::new();
        for t in terms {
            if t.word.support_len() > n_qubits {
                return Err(Error::invalid(format!(
                    "word {} acts outside {n_qubits} qubits",
                    t.word
                )));
            }
            *merged.entry(t.word).or_default() += t.coeff;
        }
        Ok(Self::from_map(n_qubits, merged))
    }

    fn from_map(n_qubits: usize, merged: BTreeMap<PauliWord, Complex64>) -> Self {
        let terms: Vec<PauliTerm> = merged
            .into_iter()
            .filter(|(_, c)| c.norm() >= MERGE_TOL)
            .map(|(w, c)| PauliTerm::new(c, w))
            .collect();
        let lambda_lcu = terms.iter().map(|t| t.coeff.norm()).sum();
        PauliSum { n_qubits, terms, lambda_lcu }
    }

    pub fn zero(n_qubits: usize) -> Self {
        PauliSum { n_qubits, terms: Vec::new(), lambda_lcu: 0.0 }
    }

    pub fn identity(n_qubits: usize, c: f64) -> Self {
        Self::new(n_qubits, [PauliTerm::real(c, PauliWord::IDENTITY)]).expect("identity fits")
    }

    /// Parses lines of the form `coeff  WORD`; `#` starts a comment.
    ///
    /// The qubit count is the longest word length.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut n = 0usize;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let c = it.next().unwrap_or("");
            let w = it.next().ok_or_else(|| Error::invalid(format!("line {}: missing Pauli word", lineno + 1)))?;
            if it.next().is_some() {
                return Err(Error::invalid(format!("line {}: trailing fields", lineno + 1)));
            }
            let coeff: f64 = c
                .parse()
                .map_err(|_| Error::invalid(format!("line {}: bad coefficient {c:?}", lineno + 1)))?;
            let word = PauliWord::parse(w).map_err(|e| Error::invalid(format!("line {}: {e}", lineno + 1)))?;
            n = n.max(w.len());
            terms.push(PauliTerm::real(coeff, word));
        }
        PauliSum::new(n, terms)
    }

    /// Emits the text format read by [`PauliSum::parse_text`]. Real coefficients only.
    pub fn to_text(&self) -> Result<String> {
        let mut out = String::new();
        for t in &self.terms {
            if t.coeff.im.abs() > MERGE_TOL {
                return Err(Error::ComplexCoefficient(format!("{}", t.coeff)));
            }
            out.push_str(&format!("{:e} {}\n", t.coeff.re, t.word.to_string_n(self.n_qubits.max(1))));
        }
        Ok(out)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Σ_j |g_j| over the merged terms.
    pub fn lcu_l1_norm(&self) -> f64 {
        self.lambda_lcu
    }

    pub fn coefficient(&self, w: &PauliWord) -> Complex64 {
        self.terms
            .binary_search_by(|t| t.word.cmp(w))
            .map(|i| self.terms[i].coeff)
            .unwrap_or_default()
    }

    pub fn has_real_coefficients(&self, tol: f64) -> bool {
        self.terms.iter().all(|t| t.coeff.im.abs() <= tol)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_map(self.n_qubits, self.terms.iter().map(|t| (t.word, t.coeff * s)).collect())
    }

    pub fn add(&self, other: &PauliSum) -> Self {
        let mut m: BTreeMap<PauliWord, Complex64> = self.terms.iter().map(|t| (t.word, t.coeff)).collect();
        for t in &other.terms {
            *m.entry(t.word).or_default() += t.coeff;
        }
        Self::from_map(self.n_qubits.max(other.n_qubits), m)
    }

    pub fn mul(&self, other: &PauliSum) -> Self {
        let mut m: BTreeMap<PauliWord, Complex64> = BTreeMap::new();
        for a in &self.terms {
            for b in &other.terms {
                let p = a.mul(b);
                *m.entry(p.word).or_default() += p.coeff;
            }
        }
        Self::from_map(self.n_qubits.max(other.n_qubits), m)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_map(self.n_qubits, self.terms.iter().map(|t| (t.word, t.coeff.conj())).collect())
    }

    /// Dense matrix realization, refused above `cap` qubits.
    pub fn to_dense_capped(&self, cap: usize) -> Result<DenseOperator> {
        if self.n_qubits > cap {
            return Err(Error::DenseCapExceeded { qubits: self.n_qubits, cap });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DenseOperator::zeros(dim);
        for t in &self.terms {
            for b in 0..dim as u64 {
                let (ph, b2) = t.word.apply(b);
                *m.get_mut(b2 as usize, b as usize) += ph.apply(t.coeff);
            }
        }
        if self.has_real_coefficients(0.0) {
            m.assert_hermitian(1e-12);
        }
        Ok(m)
    }

    pub fn to_dense(&self) -> Result<DenseOperator> {
        self.to_dense_capped(DEFAULT_DENSE_CAP)
    }

    /// `out = self · psi` without forming a matrix.
    pub fn apply(&self, psi: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(psi.len(), 1usize << self.n_qubits);
        assert_eq!(out.len(), psi.len());
        out.iter_mut().for_each(|o| *o = Complex64::default());
        for t in &self.terms {
            for (b, &amp) in psi.iter().enumerate() {
                let (ph, b2) = t.word.apply(b as u64);
                out[b2 as usize] += ph.apply(t.coeff * amp);
            }
        }
    }
}
