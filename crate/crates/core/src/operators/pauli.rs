use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum qubit count representable by a [`PauliWord`].
pub const MAX_QUBITS: usize = 64;

/// Power of `i`, stored modulo 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: u32) -> Self {
        Phase((k % 4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// Multiplies `c` by this phase without rounding.
    pub fn apply(self, c: Complex64) -> Complex64 {
        match self.0 {
            0 => c,
            1 => Complex64::new(-c.im, c.re),
            2 => -c,
            _ => Complex64::new(c.im, -c.re),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn to_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c.to_ascii_uppercase() {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }
}

/// Hermitian Pauli word stored as X and Z bitmasks.
///
/// Bit `k` refers to qubit `k + 1`, which is also bit `k` of a computational
/// basis index. The word with masks `(x, z)` is `i^{|x & z|} X^x Z^z`, so a
/// qubit with both bits set carries `Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct PauliWord {
    pub x: u64,
    pub z: u64,
}

impl PauliWord {
    pub const IDENTITY: PauliWord = PauliWord { x: 0, z: 0 };

    pub fn new(x: u64, z: u64) -> Self {
        PauliWord { x, z }
    }

    /// Single-qubit word on the 0-based qubit `q`.
    pub fn single(q: usize, letter: Letter) -> Self {
        let bit = 1u64 << q;
        match letter {
            Letter::I => PauliWord::IDENTITY,
            Letter::X => PauliWord { x: bit, z: 0 },
            Letter::Y => PauliWord { x: bit, z: bit },
            Letter::Z => PauliWord { x: 0, z: bit },
        }
    }

    pub fn from_letters(letters: &[Letter]) -> Result<Self> {
        if letters.len() > MAX_QUBITS {
            return Err(Error::invalid(format!("word longer than {MAX_QUBITS} qubits")));
        }
        let mut w = PauliWord::IDENTITY;
        for (q, &l) in letters.iter().enumerate() {
            let s = PauliWord::single(q, l);
            w.x |= s.x;
            w.z |= s.z;
        }
        Ok(w)
    }

    /// Parses a word such as `XIZ`; the first character is qubit 1.
    pub fn parse(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| Letter::from_char(c).ok_or_else(|| Error::invalid(format!("bad Pauli letter {c:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        PauliWord::from_letters(&letters)
    }

    /// Letter on the 0-based qubit `q`.
    pub fn letter(&self, q: usize) -> Letter {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => Letter::I,
            (1, 0) => Letter::X,
            (1, 1) => Letter::Y,
            _ => Letter::Z,
        }
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of qubits needed to hold the word.
    pub fn support_len(&self) -> usize {
        64 - (self.x | self.z).leading_zeros() as usize
    }

    fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// `self · other = phase · word`.
    pub fn mul(&self, other: &PauliWord) -> (Phase, PauliWord) {
        let out = PauliWord { x: self.x ^ other.x, z: self.z ^ other.z };
        let e = self.y_count() + other.y_count() + 2 * (self.z & other.x).count_ones() + 4 * 64 - out.y_count();
        (Phase::from_exponent(e), out)
    }

    pub fn commutes_with(&self, other: &PauliWord) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// `P |b⟩ = phase · |b'⟩`.
    pub fn apply(&self, b: u64) -> (Phase, u64) {
        let e = self.y_count() + 2 * (self.z & b).count_ones();
        (Phase::from_exponent(e), b ^ self.x)
    }

    pub fn to_string_n(&self, n_qubits: usize) -> String {
        (0..n_qubits).map(|q| self.letter(q).to_char()).collect()
    }
}

/// Complex coefficient times a Pauli word.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coeff: Complex64,
    pub word: PauliWord,
}

impl PauliTerm {
    pub fn new(coeff: Complex64, word: PauliWord) -> Self {
        PauliTerm { coeff, word }
    }

    pub fn real(coeff: f64, word: PauliWord) -> Self {
        PauliTerm { coeff: Complex64::new(coeff, 0.0), word }
    }

    pub fn mul(&self, other: &PauliTerm) -> PauliTerm {
        let (ph, w) = self.word.mul(&other.word);
        PauliTerm { coeff: ph.apply(self.coeff * other.coeff), word: w }
    }

    pub fn adjoint(&self) -> PauliTerm {
        PauliTerm { coeff: self.coeff.conj(), word: self.word }
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.support_len().max(1);
        f.write_str(&self.to_string_n(n))
    }
}
