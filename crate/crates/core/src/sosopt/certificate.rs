use std::collections::HashMap;

use faer::{c64, Mat};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::{Mono, SosBasis};
use super::problem::{SdpProblem, SosTarget};
use super::solver::{self, SolverOptions};
use crate::error::{Error, Result};
use crate::linalg::{herm_eigenvalues, herm_eigh};
use crate::operators::DenseOperator;

/// Row-major Hermitian matrix with separate real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermitianMatrix {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl HermitianMatrix {
    pub fn from_mat(m: &Mat<c64>) -> Self {
        let n = m.nrows();
        let mut re = Vec::with_capacity(n * n);
        let mut im = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        HermitianMatrix { dim: n, re, im }
    }

    pub fn to_mat(&self) -> Result<Mat<c64>> {
        let n = self.dim;
        if self.re.len() != n * n || self.im.len() != n * n {
            return Err(Error::invalid(format!("Gram payload does not hold {n}x{n} entries")));
        }
        Ok(Mat::from_fn(n, n, |i, j| c64::new(self.re[i * n + j], self.im[i * n + j])))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.re[i * self.dim + i]).sum()
    }
}

/// Solved SOS relaxation: `H + β·1 = X⃗† G X⃗` with `G ⪰ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SosCertificate {
    pub basis: SosBasis,
    pub gram: HermitianMatrix,
    pub beta: f64,
    /// ∞-norm of the constraint residual.
    pub residual: f64,
    pub solver_tol: f64,
    pub dual_residual: f64,
    pub duality_gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub method: String,
    /// Lower bound `b^T y` from the solver's dual iterate.
    pub dual_objective: f64,
    /// Constraint residual of the solver iterate before polishing.
    #[serde(default)]
    pub raw_residual: f64,
    /// Multiple of the identity added to restore positivity after projection.
    #[serde(default)]
    pub psd_shift: f64,
}

impl SosCertificate {
    pub fn gram_mat(&self) -> Result<Mat<c64>> {
        self.gram.to_mat()
    }
}

/// Solves the SOS program; a non-converged iterate is returned with `converged = false`.
///
/// The solver iterate is polished before it is returned: it is projected exactly
/// onto the constraint set, and any negative eigenvalue left by the projection is
/// lifted by adding a multiple of the identity. The identity only feeds `β`, so the
/// result satisfies the constraints and is PSD up to rounding.
pub fn solve_sdp(p: &SdpProblem, opts: &SolverOptions) -> Result<SosCertificate> {
    let r = p.realification();
    let sol = solver::solve(&r.sdp, opts)?;
    let g = p.gram_from_real(&r, &sol.x);
    let mut g = Mat::from_fn(g.nrows(), g.ncols(), |i, j| (g[(i, j)] + g[(j, i)].conj()) * 0.5);
    let raw_residual = p.residuals(&g).iter().fold(0.0f64, |a, v| a.max(v.abs()));
    p.project_affine(&mut g);
    let lo = herm_eigenvalues(g.as_ref())?.first().copied().unwrap_or(0.0);
    let psd_shift = (-lo).max(0.0);
    for i in 0..g.nrows() {
        g[(i, i)] += psd_shift;
    }
    let residual = p.residuals(&g).iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tr: f64 = (0..g.nrows()).map(|i| g[(i, i)].re).sum();
    let dual_objective: f64 = r.sdp.b.iter().zip(&sol.y).map(|(b, y)| b * y).sum::<f64>() - p.identity_coeff;
    Ok(SosCertificate {
        basis: p.basis.clone(),
        gram: HermitianMatrix::from_mat(&g),
        beta: tr - p.identity_coeff,
        residual,
        solver_tol: opts.tol,
        dual_residual: sol.dual_residual,
        duality_gap: sol.gap,
        iterations: sol.iterations,
        converged: sol.converged && raw_residual <= opts.tol,
        method: sol.method.to_string(),
        dual_objective,
        raw_residual,
        psd_shift,
    })
}

/// Rows `b⃗_j = √μ_j a⃗_j†` from the eigendecomposition of the Gram matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SosGenerators {
    pub basis: SosBasis,
    pub vectors: Vec<Vec<Complex64>>,
    pub eigenvalues: Vec<f64>,
    pub rank: usize,
}

impl SosGenerators {
    /// `Σ_j b⃗_j† b⃗_j`.
    pub fn reconstructed_gram(&self) -> Mat<c64> {
        let l = self.basis.len();
        let mut g = Mat::<c64>::zeros(l, l);
        for b in &self.vectors {
            for k in 0..l {
                for j in 0..l {
                    g[(k, j)] += b[k].conj() * b[j];
                }
            }
        }
        g
    }
}

pub fn extract_generators(cert: &SosCertificate, rank_tol: f64) -> Result<SosGenerators> {
    let g = cert.gram_mat()?;
    let (vals, vecs) = herm_eigh(g.as_ref())?;
    let lo = vals.first().copied().unwrap_or(0.0);
    if lo < -10.0 * cert.solver_tol {
        return Err(Error::NotPositiveSemidefinite { eigenvalue: lo });
    }
    let top = vals.last().copied().unwrap_or(0.0).max(0.0);
    let mut vectors = Vec::new();
    let mut eigenvalues = Vec::new();
    for k in (0..vals.len()).rev() {
        let mu = vals[k];
        if top == 0.0 || mu <= rank_tol * top {
            continue;
        }
        let s = mu.sqrt();
        vectors.push((0..vals.len()).map(|i| vecs[(i, k)].conj() * s).collect());
        eigenvalues.push(mu);
    }
    Ok(SosGenerators { basis: cert.basis.clone(), rank: vectors.len(), vectors, eigenvalues })
}

/// Outcome of checking `H + β·1 = Σ B_j†B_j` against a dense oracle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// `‖H + β1 − Σ B_j†B_j‖_F / ‖H + β1‖_F`.
    pub relative_residual: f64,
    pub ground_energy: f64,
    /// `E₀ + β`, nonnegative for a sound certificate.
    pub slack: f64,
    pub valid: bool,
}

/// Dense verification; `valid` is false when the slack is below `−tol·‖H‖`.
pub fn verify_certificate(h: &SosTarget, gens: &SosGenerators, beta: f64, tol: f64) -> Result<VerificationReport> {
    let hp = h.to_pauli()?;
    let hd = hp.to_dense()?;
    let dim = hd.dim();
    let mut sum = DenseOperator::zeros(dim);
    for b in &gens.vectors {
        let bd = gens.basis.operator(b)?.to_dense_capped(hp.n_qubits().max(crate::operators::DEFAULT_DENSE_CAP))?;
        let bd = if bd.dim() == dim { bd } else { return Err(Error::invalid("generator and Hamiltonian dimensions differ")) };
        sum = sum.add(&bd.adjoint().matmul(&bd));
    }
    let shifted = hd.add_identity(beta);
    let resid = shifted.sub(&sum).frobenius_norm();
    let denom = shifted.frobenius_norm();
    let relative_residual = if denom > 0.0 { resid / denom } else { resid };
    let ground_energy = herm_eigenvalues(hd.mat().as_ref())?[0];
    let slack = ground_energy + beta;
    let scale = hp.lcu_l1_norm().max(1.0);
    Ok(VerificationReport { relative_residual, ground_energy, slack, valid: slack >= -tol * scale })
}

/// Relative Frobenius residual computed in the monomial algebra, without dense matrices.
///
/// Distinct monomials are orthogonal under the normalized trace, so this
/// equals the dense value of [`verify_certificate`].
pub fn algebraic_residual(h: &SosTarget, gens: &SosGenerators, beta: f64) -> f64 {
    let basis = &gens.basis;
    let g = gens.reconstructed_gram();
    gram_operator_residual(h, basis, &g, beta)
}

pub(crate) fn gram_operator_residual(h: &SosTarget, basis: &SosBasis, g: &Mat<c64>, beta: f64) -> f64 {
    let alg = basis.algebra;
    let l = basis.len();
    let mut coeffs: HashMap<Mono, Complex64> = HashMap::new();
    for k in 0..l {
        for j in 0..l {
            let (c, m) = alg.adj_mul(basis.monomials[k], basis.monomials[j]);
            *coeffs.entry(m).or_default() += basis.phases[k].conj() * basis.phases[j] * c * g[(k, j)];
        }
    }
    let mut target: HashMap<Mono, Complex64> = h.coefficients().into_iter().collect();
    *target.entry(Mono::IDENTITY).or_default() += Complex64::new(beta, 0.0);
    let mut num = 0.0;
    for (m, c) in &coeffs {
        num += (c - target.get(m).copied().unwrap_or_default()).norm_sqr();
    }
    for (m, t) in &target {
        if !coeffs.contains_key(m) {
            num += t.norm_sqr();
        }
    }
    let den: f64 = target.values().map(|t| t.norm_sqr()).sum();
    if den > 0.0 {
        (num / den).sqrt()
    } else {
        num.sqrt()
    }
}

/// `C(N,2)·‖J‖` for a matrix indexed by pairs, i.e. `rows · ‖J‖_2`.
pub fn dual_norm_bound(j: &Mat<f64>) -> Result<f64> {
    if j.nrows() != j.ncols() {
        return Err(Error::invalid(format!("pair matrix is {}x{}", j.nrows(), j.ncols())));
    }
    Ok(j.nrows() as f64 * crate::linalg::spectral_norm_r(j.as_ref())?)
}
