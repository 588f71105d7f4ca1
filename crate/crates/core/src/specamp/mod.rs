//! Spectral amplification: square-root operators, normalizations, and walk spectra.

mod gadget;

pub use gadget::{build_parity_or_gadget, GadgetInstance, GadgetSpec};

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{herm_eigenvalues, herm_eigh};
use crate::operators::{DenseOperator, PauliSum, DEFAULT_DENSE_CAP};
use crate::sosopt::SosGenerators;

/// One row `a_j, A_j` of a spectral-amplified operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaRow {
    pub norm: f64,
    pub op: PauliSum,
}

/// `H_SA = Σ_j |j⟩ ⊗ A_j` with normalization `λ = Σ a_j²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaOperator {
    pub rows: Vec<SaRow>,
    pub lambda: f64,
}

impl SaOperator {
    pub fn new(rows: Vec<SaRow>) -> Self {
        let lambda = rows.iter().map(|r| r.norm * r.norm).sum();
        SaOperator { rows, lambda }
    }

    pub fn n_qubits(&self) -> usize {
        self.rows.iter().map(|r| r.op.n_qubits()).max().unwrap_or(0)
    }

    /// Controlled row block-encodings used by one call to the `H_SA` block-encoding.
    pub fn block_encoding_calls(&self) -> usize {
        self.rows.len()
    }

    pub fn dense_rows(&self) -> Result<Vec<DenseOperator>> {
        let n = self.n_qubits();
        self.rows
            .iter()
            .map(|r| {
                let op = if r.op.n_qubits() == n { r.op.clone() } else { PauliSum::new(n, r.op.terms().iter().copied())? };
                op.to_dense_capped(DEFAULT_DENSE_CAP)
            })
            .collect()
    }

    /// `H_SA† H_SA = Σ_j A_j† A_j`.
    pub fn square_dense(&self) -> Result<DenseOperator> {
        let rows = self.dense_rows()?;
        let dim = 1usize << self.n_qubits();
        let mut s = DenseOperator::zeros(dim);
        for a in &rows {
            s = s.add(&a.adjoint().matmul(a));
        }
        Ok(s)
    }

    /// Largest `‖A_j‖ − a_j`; nonpositive for a valid normalization.
    pub fn max_norm_excess(&self) -> Result<f64> {
        let rows = self.dense_rows()?;
        let mut worst = f64::NEG_INFINITY;
        for (r, a) in self.rows.iter().zip(&rows) {
            worst = worst.max(a.spectral_norm()? - r.norm);
        }
        Ok(worst)
    }
}

/// Per-row normalization used when turning generators into an SA operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum RowNorm {
    /// `a_j = ‖b⃗_j‖₁`, the LCU bound on each generator.
    #[default]
    L1,
    /// `a_j = ‖B_j‖`, computed densely.
    Spectral,
}

/// SA operator assembled from SOS generators, with its shift β.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SossaOperator {
    pub generators: SosGenerators,
    pub lambda_sos: f64,
    pub beta: f64,
    pub sa: SaOperator,
}

/// `Σ_j (Σ_l |b_jl|)²`.
pub fn lambda_sos(gens: &SosGenerators) -> f64 {
    gens.vectors.iter().map(|b| b.iter().map(|c| c.norm()).sum::<f64>().powi(2)).sum()
}

pub fn build_sa_from_generators(gens: &SosGenerators, norm: RowNorm) -> Result<SaOperator> {
    let mut rows = Vec::with_capacity(gens.vectors.len());
    for (j, b) in gens.vectors.iter().enumerate() {
        if b.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::ZeroRow(j));
        }
        let op = gens.basis.operator(b)?;
        let a = match norm {
            RowNorm::L1 => b.iter().map(|c| c.norm()).sum(),
            RowNorm::Spectral => op.to_dense()?.spectral_norm()?,
        };
        rows.push(SaRow { norm: a, op });
    }
    Ok(SaOperator::new(rows))
}

pub fn build_sossa(gens: &SosGenerators, beta: f64) -> Result<SossaOperator> {
    let sa = build_sa_from_generators(gens, RowNorm::L1)?;
    Ok(SossaOperator { generators: gens.clone(), lambda_sos: lambda_sos(gens), beta, sa })
}

/// Eigenvalues of `2 H_SA†H_SA / λ − 1`, ascending.
pub fn shifted_square_spectrum(sa: &SaOperator) -> Result<Vec<f64>> {
    let sq = sa.square_dense()?;
    let dim = sq.dim();
    if sa.lambda == 0.0 {
        return Ok(vec![-1.0; dim]);
    }
    let m = sq.scale(2.0 / sa.lambda).add_identity(-1.0);
    m.eigenvalues_hermitian()
}

/// Qubitization spectrum: eigenphases `±arccos(E_j/λ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkModel {
    pub eigenvalues: Vec<f64>,
    pub lambda: f64,
    /// Pairs `(+θ_j, −θ_j)` in the order of `eigenvalues`.
    pub phases: Vec<(f64, f64)>,
}

pub fn walk_phases(spectrum: &[f64], lambda: f64) -> Result<WalkModel> {
    let mut phases = Vec::with_capacity(spectrum.len());
    for &e in spectrum {
        if e.abs() > lambda * (1.0 + 1e-12) || lambda <= 0.0 {
            return Err(Error::OutsideNormalization { value: e, lambda });
        }
        let t = (e / lambda).clamp(-1.0, 1.0).acos();
        phases.push((t, -t));
    }
    Ok(WalkModel { eigenvalues: spectrum.to_vec(), lambda, phases })
}

/// Walk `(2|0⟩⟨0| − 1) U` built from the dilation `U = [[H/λ, S], [S, −H/λ]]`, `S = √(1 − (H/λ)²)`.
pub fn dilation_walk(h: &DenseOperator, lambda: f64) -> Result<Mat<c64>> {
    let d = h.dim();
    let (vals, vecs) = herm_eigh(h.mat().as_ref())?;
    for &e in &vals {
        if e.abs() > lambda * (1.0 + 1e-12) {
            return Err(Error::OutsideNormalization { value: e, lambda });
        }
    }
    let hs = Mat::from_fn(d, d, |i, j| h.get(i, j) / lambda);
    let sq: Vec<f64> = vals.iter().map(|e| (1.0 - (e / lambda).powi(2)).max(0.0).sqrt()).collect();
    let scaled = Mat::from_fn(d, d, |i, k| vecs[(i, k)] * sq[k]);
    let s = &scaled * vecs.adjoint();
    Ok(Mat::from_fn(2 * d, 2 * d, |i, j| {
        let (bi, bj) = (i / d, j / d);
        let (ii, jj) = (i % d, j % d);
        let u = match (bi, bj) {
            (0, 0) => hs[(ii, jj)],
            (1, 1) => -hs[(ii, jj)],
            _ => s[(ii, jj)],
        };
        if bi == 0 {
            u
        } else {
            -u
        }
    }))
}

/// Eigenvalues of `[[0, H_SA†], [H_SA, 0]]`, ascending.
pub fn doubled_hermitian_spectrum(sa: &SaOperator) -> Result<Vec<f64>> {
    let rows = sa.dense_rows()?;
    let d = 1usize << sa.n_qubits();
    let r = rows.len();
    let n = d + r * d;
    if n > 1 << 13 {
        return Err(Error::DenseCapExceeded { qubits: (n as f64).log2().ceil() as usize, cap: 13 });
    }
    let mut m = Mat::<c64>::zeros(n, n);
    for (j, a) in rows.iter().enumerate() {
        let off = d + j * d;
        for p in 0..d {
            for q in 0..d {
                let v = a.get(p, q);
                m[(off + p, q)] = v;
                m[(q, off + p)] = v.conj();
            }
        }
    }
    herm_eigenvalues(m.as_ref())
}

/// Query-cost comparison for one Hamiltonian representation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostRow {
    pub representation: String,
    pub lambda: f64,
    pub delta: f64,
    /// `λ/ε`.
    pub lcu_cost: f64,
    /// `√(Δλ)/ε`.
    pub sa_cost: f64,
    /// `√(Δλ)·t + √(λ/Δ)·ln(1/ε)`, reported only.
    pub time_evolution: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostTable {
    pub epsilon: f64,
    pub time: f64,
    pub rows: Vec<CostRow>,
    /// `√(Δ_SOS λ_SOS) / λ_LCU`.
    pub sossa_over_lcu: f64,
}

fn cost_row(name: &str, lambda: f64, delta: f64, eps: f64, t: f64) -> CostRow {
    CostRow {
        representation: name.to_string(),
        lambda,
        delta,
        lcu_cost: lambda / eps,
        sa_cost: (delta * lambda).sqrt() / eps,
        time_evolution: (delta * lambda).sqrt() * t + (lambda / delta).sqrt() * (1.0 / eps).ln(),
    }
}

/// Rows for LCU, termwise SA, and SOSSA at target error `epsilon` and evolution time `time`.
pub fn query_cost_table(
    lambda_lcu: f64,
    lambda_sa: f64,
    lambda_sos: f64,
    delta_lcu: f64,
    delta_sos: f64,
    epsilon: f64,
    time: f64,
) -> Result<CostTable> {
    for (name, v) in [
        ("lambda_lcu", lambda_lcu),
        ("lambda_sa", lambda_sa),
        ("lambda_sos", lambda_sos),
        ("delta_lcu", delta_lcu),
        ("delta_sos", delta_sos),
        ("epsilon", epsilon),
        ("time", time),
    ] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::invalid(format!("{name} must be positive, got {v}")));
        }
    }
    let rows = vec![
        cost_row("lcu", lambda_lcu, delta_lcu, epsilon, time),
        cost_row("termwise-sa", lambda_sa, delta_lcu, epsilon, time),
        cost_row("sossa", lambda_sos, delta_sos, epsilon, time),
    ];
    Ok(CostTable { epsilon, time, rows, sossa_over_lcu: (delta_sos * lambda_sos).sqrt() / lambda_lcu })
}
