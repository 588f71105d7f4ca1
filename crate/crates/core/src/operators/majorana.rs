use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lcu::{PauliSum, MERGE_TOL};
use super::pauli::{Phase, PauliTerm, PauliWord};
use crate::error::{Error, Result};

/// Largest mode count representable as a bitmask monomial.
pub const MAX_MODES: usize = 64;

/// `true` when γ_{m1} γ_{m2} picks up a minus sign on reordering.
///
/// Masks use bit `a − 1` for γ_a; both monomials are in increasing order.
pub fn product_sign_negative(m1: u64, m2: u64) -> bool {
    let mut swaps = 0u32;
    let mut rest = m2;
    while rest != 0 {
        let b = rest.trailing_zeros();
        rest &= rest - 1;
        swaps += (m1 >> b >> 1).count_ones();
    }
    swaps % 2 == 1
}

/// `(γ_M)† = ± γ_M`, negative when d(d−1)/2 is odd.
pub fn adjoint_sign_negative(mask: u64) -> bool {
    let d = mask.count_ones();
    (d * d.saturating_sub(1) / 2) % 2 == 1
}

/// Phase η with η·γ_M Hermitian: `i` for degrees 2 and 3 (mod 4), else 1.
pub fn hermitian_phase(mask: u64) -> Complex64 {
    if adjoint_sign_negative(mask) {
        Complex64::new(0.0, 1.0)
    } else {
        Complex64::new(1.0, 0.0)
    }
}

pub fn mask_from_indices(indices: &[usize]) -> u64 {
    indices.iter().fold(0u64, |m, &a| m | (1u64 << (a - 1)))
}

pub fn indices_from_mask(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut rest = mask;
    while rest != 0 {
        out.push(rest.trailing_zeros() as usize + 1);
        rest &= rest - 1;
    }
    out
}

/// Coefficient times a product of Majorana operators in increasing order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajoranaMonomial {
    indices: Vec<usize>,
    pub coeff: Complex64,
}

impl MajoranaMonomial {
    /// Brings `coeff · γ_{i1} γ_{i2} …` to canonical order.
    ///
    /// Each transposition flips the sign and repeated indices cancel via γ² = 1.
    pub fn new(indices: &[usize], coeff: Complex64) -> Result<Self> {
        let mut v = indices.to_vec();
        if let Some(&bad) = v.iter().find(|&&a| a == 0 || a > MAX_MODES) {
            return Err(Error::ModeOutOfRange { index: bad, n_modes: MAX_MODES });
        }
        let mut swaps = 0usize;
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                swaps += 1;
                j -= 1;
            }
        }
        let mut out: Vec<usize> = Vec::with_capacity(v.len());
        for a in v {
            if out.last() == Some(&a) {
                out.pop();
            } else {
                out.push(a);
            }
        }
        let coeff = if swaps % 2 == 1 { -coeff } else { coeff };
        Ok(MajoranaMonomial { indices: out, coeff })
    }

    pub fn from_mask(mask: u64, coeff: Complex64) -> Self {
        MajoranaMonomial { indices: indices_from_mask(mask), coeff }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn degree(&self) -> usize {
        self.indices.len()
    }

    pub fn mask(&self) -> u64 {
        mask_from_indices(&self.indices)
    }

    pub fn mul(&self, other: &MajoranaMonomial) -> MajoranaMonomial {
        let (a, b) = (self.mask(), other.mask());
        let mut c = self.coeff * other.coeff;
        if product_sign_negative(a, b) {
            c = -c;
        }
        MajoranaMonomial::from_mask(a ^ b, c)
    }

    pub fn adjoint(&self) -> MajoranaMonomial {
        let c = self.coeff.conj();
        let c = if adjoint_sign_negative(self.mask()) { -c } else { c };
        MajoranaMonomial { indices: self.indices.clone(), coeff: c }
    }
}

/// Precomputed Jordan–Wigner images of single Majorana operators.
///
/// γ_{2k−1} = Z_1…Z_{k−1} X_k and γ_{2k} = Z_1…Z_{k−1} Y_k.
#[derive(Clone, Debug)]
pub struct JordanWigner {
    n_modes: usize,
    words: Vec<PauliWord>,
}

impl JordanWigner {
    pub fn new(n_modes: usize) -> Result<Self> {
        if n_modes % 2 == 1 {
            return Err(Error::OddModeCount(n_modes));
        }
        if n_modes > MAX_MODES {
            return Err(Error::invalid(format!("{n_modes} modes exceeds {MAX_MODES}")));
        }
        let words = (1..=n_modes)
            .map(|a| {
                let q = (a - 1) / 2;
                let bit = 1u64 << q;
                let zs = bit - 1;
                if a % 2 == 1 {
                    PauliWord::new(bit, zs)
                } else {
                    PauliWord::new(bit, zs | bit)
                }
            })
            .collect();
        Ok(JordanWigner { n_modes, words })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn n_qubits(&self) -> usize {
        self.n_modes / 2
    }

    /// γ_M = phase · word for the monomial mask `M`.
    pub fn map_mask(&self, mask: u64) -> Result<(Phase, PauliWord)> {
        if self.n_modes < 64 && mask >> self.n_modes != 0 {
            let index = 64 - mask.leading_zeros() as usize;
            return Err(Error::ModeOutOfRange { index, n_modes: self.n_modes });
        }
        let mut phase = Phase::ONE;
        let mut word = PauliWord::IDENTITY;
        let mut rest = mask;
        while rest != 0 {
            let a = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let (p, w) = word.mul(&self.words[a]);
            phase = phase.mul(p);
            word = w;
        }
        Ok((phase, word))
    }

    pub fn map_monomial(&self, m: &MajoranaMonomial) -> Result<PauliTerm> {
        let (ph, w) = self.map_mask(m.mask())?;
        Ok(PauliTerm::new(ph.apply(m.coeff), w))
    }
}

/// Jordan–Wigner image of a single monomial.
pub fn jordan_wigner(m: &MajoranaMonomial, n_modes: usize) -> Result<PauliTerm> {
    if let Some(&bad) = m.indices().iter().find(|&&a| a > n_modes) {
        if n_modes % 2 == 1 {
            return Err(Error::OddModeCount(n_modes));
        }
        return Err(Error::ModeOutOfRange { index: bad, n_modes });
    }
    JordanWigner::new(n_modes)?.map_monomial(m)
}

/// Linear combination of canonical Majorana monomials keyed by bitmask.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajoranaPoly {
    n_modes: usize,
    terms: BTreeMap<u64, Complex64>,
}

impl MajoranaPoly {
    pub fn zero(n_modes: usize) -> Self {
        MajoranaPoly { n_modes, terms: BTreeMap::new() }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn add_term(&mut self, mask: u64, c: Complex64) -> Result<()> {
        if self.n_modes < 64 && mask >> self.n_modes != 0 {
            let index = 64 - mask.leading_zeros() as usize;
            return Err(Error::ModeOutOfRange { index, n_modes: self.n_modes });
        }
        *self.terms.entry(mask).or_default() += c;
        Ok(())
    }

    pub fn add_monomial(&mut self, m: &MajoranaMonomial) -> Result<()> {
        self.add_term(m.mask(), m.coeff)
    }

    /// Drops merged coefficients below the merge tolerance.
    pub fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() >= MERGE_TOL);
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, Complex64)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn coefficient(&self, mask: u64) -> Complex64 {
        self.terms.get(&mask).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn mul(&self, other: &MajoranaPoly) -> MajoranaPoly {
        let mut out = MajoranaPoly::zero(self.n_modes.max(other.n_modes));
        for (&a, &ca) in &self.terms {
            for (&b, &cb) in &other.terms {
                let c = if product_sign_negative(a, b) { -(ca * cb) } else { ca * cb };
                *out.terms.entry(a ^ b).or_default() += c;
            }
        }
        out.prune();
        out
    }

    pub fn adjoint(&self) -> MajoranaPoly {
        let terms = self
            .terms
            .iter()
            .map(|(&m, &c)| (m, if adjoint_sign_negative(m) { -c.conj() } else { c.conj() }))
            .collect();
        MajoranaPoly { n_modes: self.n_modes, terms }
    }

    pub fn add(&self, other: &MajoranaPoly) -> MajoranaPoly {
        let mut out = self.clone();
        out.n_modes = out.n_modes.max(other.n_modes);
        for (&m, &c) in &other.terms {
            *out.terms.entry(m).or_default() += c;
        }
        out.prune();
        out
    }

    /// max over monomials of |c_M − c_M(adjoint)|.
    pub fn hermitian_deviation(&self) -> f64 {
        let adj = self.adjoint();
        self.terms
            .keys()
            .map(|m| (self.coefficient(*m) - adj.coefficient(*m)).norm())
            .fold(0.0, f64::max)
    }

    /// Jordan–Wigner image as a Pauli sum.
    pub fn to_pauli(&self) -> Result<PauliSum> {
        let jw = JordanWigner::new(self.n_modes)?;
        let terms = self
            .terms
            .iter()
            .map(|(&m, &c)| {
                let (ph, w) = jw.map_mask(m)?;
                Ok(PauliTerm::new(ph.apply(c), w))
            })
            .collect::<Result<Vec<_>>>()?;
        PauliSum::new(jw.n_qubits(), terms)
    }

    /// Parses lines `coeff  a b c …` where `coeff` is real or a pure imaginary `…i`.
    pub fn parse_text(text: &str, n_modes: usize) -> Result<Self> {
        let mut p = MajoranaPoly::zero(n_modes);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let tok = it.next().unwrap_or("");
            let bad = || Error::invalid(format!("line {}: bad coefficient {tok:?}", lineno + 1));
            let coeff = match tok.strip_suffix('i') {
                Some(im) => Complex64::new(0.0, im.parse().map_err(|_| bad())?),
                None => Complex64::new(tok.parse().map_err(|_| bad())?, 0.0),
            };
            let idx = it
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| Error::invalid(format!("line {}: bad index {s:?}", lineno + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(&a) = idx.iter().find(|&&a| a == 0 || a > n_modes) {
                return Err(Error::ModeOutOfRange { index: a, n_modes });
            }
            let m = MajoranaMonomial::new(&idx, coeff)?;
            p.add_monomial(&m)?;
        }
        p.prune();
        Ok(p)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (&m, &c) in &self.terms {
            let coeff = if c.im == 0.0 {
                format!("{:e}", c.re)
            } else if c.re == 0.0 {
                format!("{:e}i", c.im)
            } else {
                // mixed phases are split into two lines
                let idx = indices_from_mask(m).iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ");
                out.push_str(&format!("{:e} {idx}\n{:e}i {idx}\n", c.re, c.im));
                continue;
            };
            let idx = indices_from_mask(m).iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ");
            out.push_str(&format!("{coeff} {idx}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn canonical_ordering_sign() {
        let m = MajoranaMonomial::new(&[2, 1], c(1.0)).unwrap();
        assert_eq!(m.indices(), &[1, 2]);
        assert_eq!(m.coeff, c(-1.0));
        let m = MajoranaMonomial::new(&[3, 1, 3], c(1.0)).unwrap();
        // γ3 γ1 γ3 = -γ1 γ3 γ3 = -γ1
        assert_eq!(m.indices(), &[1]);
        assert_eq!(m.coeff, c(-1.0));
    }

    #[test]
    fn jw_conventions() {
        let t = jordan_wigner(&MajoranaMonomial::new(&[1], c(1.0)).unwrap(), 2).unwrap();
        assert_eq!(t.word, PauliWord::parse("X").unwrap());
        assert_eq!(t.coeff, c(1.0));
        let t = jordan_wigner(&MajoranaMonomial::new(&[3], c(1.0)).unwrap(), 4).unwrap();
        assert_eq!(t.word, PauliWord::parse("ZX").unwrap());
        assert!(matches!(
            jordan_wigner(&MajoranaMonomial::new(&[5], c(1.0)).unwrap(), 4),
            Err(Error::ModeOutOfRange { index: 5, n_modes: 4 })
        ));
        assert!(matches!(
            jordan_wigner(&MajoranaMonomial::new(&[1], c(1.0)).unwrap(), 3),
            Err(Error::OddModeCount(3))
        ));
    }

    #[test]
    fn hermitian_phase_degrees() {
        assert_eq!(hermitian_phase(0b1), c(1.0));
        assert_eq!(hermitian_phase(0b11), Complex64::new(0.0, 1.0));
        assert_eq!(hermitian_phase(0b111), Complex64::new(0.0, 1.0));
        assert_eq!(hermitian_phase(0b1111), c(1.0));
    }

    #[test]
    fn text_roundtrip() {
        let p = MajoranaPoly::parse_text("0.5 1 2 3 4\n0.25i 1 2\n", 4).unwrap();
        assert_eq!(p.len(), 2);
        let back = MajoranaPoly::parse_text(&p.to_text(), 4).unwrap();
        assert_eq!(p, back);
        assert!(MajoranaPoly::parse_text("1 1 9", 4).is_err());
        assert!(p.hermitian_deviation() < 1e-15);
    }
}
