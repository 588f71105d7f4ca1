//! Pauli and Majorana operator algebra.

mod dense;
mod lcu;
mod majorana;
mod pauli;

pub use dense::DenseOperator;
pub use lcu::{LcuHamiltonian, PauliSum, DEFAULT_DENSE_CAP, MERGE_TOL};
pub use majorana::{
    adjoint_sign_negative, hermitian_phase, indices_from_mask, jordan_wigner, mask_from_indices,
    product_sign_negative, JordanWigner, MajoranaMonomial, MajoranaPoly, MAX_MODES,
};
pub use pauli::{Letter, PauliTerm, PauliWord, Phase, MAX_QUBITS};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specamp::{SaOperator, SaRow};

/// Σ_j |g_j| of the merged terms.
pub fn lcu_l1_norm(h: &LcuHamiltonian) -> f64 {
    h.lcu_l1_norm()
}

/// Termwise square root `A_j = √(2|g_j|) (1 + sign(g_j) σ_j)/2`.
///
/// The rows satisfy `Σ A_j†A_j = H + λ_LCU·1`, so the normalization is `2λ_LCU`.
pub fn termwise_sa(h: &LcuHamiltonian) -> Result<SaOperator> {
    let n = h.n_qubits();
    let mut rows = Vec::with_capacity(h.len());
    for t in h.terms() {
        if t.coeff.im != 0.0 {
            return Err(Error::ComplexCoefficient(format!("{} on {}", t.coeff, t.word.to_string_n(n.max(1)))));
        }
        let g = t.coeff.re;
        let a = (2.0 * g.abs()).sqrt();
        let s = g.signum();
        let proj = PauliSum::new(
            n,
            [
                PauliTerm::real(0.5 * a, PauliWord::IDENTITY),
                PauliTerm::new(Complex64::new(0.5 * a * s, 0.0), t.word),
            ],
        )?;
        rows.push(SaRow { norm: a, op: proj });
    }
    Ok(SaOperator::new(rows))
}
