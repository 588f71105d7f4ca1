//! Hadamard-test estimation of `⟨H⟩` for `H = Σ_j A_j†A_j`.
//!
//! Each term is measured through the block-encoding of `2A_j†A_j/a_j² − 1`,
//! whose Hadamard test returns 0 with probability `p_j = ⟨A_j†A_j⟩/a_j²`.
//! With `Λ_j = a_j²/2` and `φ_j = ⟨A_j†A_j⟩/Λ_j = 2p_j` the estimator is
//! `Σ_j Λ_j φ̂_j` with `φ̂_j = (2/N_j)·#zeros`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::PauliSum;
use crate::phaseest::trial_rng;
use crate::sosopt::SosGenerators;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotRow {
    pub a: f64,
    /// `Λ_j = a_j²/2`.
    pub lambda: f64,
    /// Upper bound on `⟨A_j†A_j⟩`.
    pub delta: f64,
    pub shots: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotPlan {
    pub rows: Vec<ShotRow>,
    pub sigma: f64,
    pub total_cost: u64,
    /// Closed form `2(Σ_j √(a_j²Δ_j)/σ)²` before rounding.
    pub predicted_cost: f64,
}

impl ShotPlan {
    /// `Σ_j 4Λ_jΔ_j/N_j`, the variance bound the allocation targets.
    pub fn variance_bound(&self) -> f64 {
        self.rows.iter().filter(|r| r.shots > 0).map(|r| 4.0 * r.lambda * r.delta / r.shots as f64).sum()
    }
}

/// `(a_j, a_j²)`: the bound `⟨A†A⟩ ≤ ‖A‖² ≤ a²` available without prior knowledge.
pub fn trivial_bounds(a: &[f64]) -> Vec<(f64, f64)> {
    a.iter().map(|&x| (x, x * x)).collect()
}

fn validate_terms(terms: &[(f64, f64)], sigma: f64) -> Result<()> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
    }
    for (j, &(a, d)) in terms.iter().enumerate() {
        if !a.is_finite() || !d.is_finite() || d < 0.0 {
            return Err(Error::invalid(format!("term {j}: need finite a and nonnegative delta, got ({a}, {d})")));
        }
        if d == 0.0 && a != 0.0 {
            return Err(Error::invalid(format!("term {j}: delta = 0 with a = {a} admits no finite allocation")));
        }
    }
    Ok(())
}

/// Lagrange-optimal allocation `N_j = ⌈(4/σ²)·√(Λ_jΔ_j)·Σ_k √(Λ_kΔ_k)⌉`, at least one shot per nonzero term.
pub fn allocate_shots(terms: &[(f64, f64)], sigma: f64) -> Result<ShotPlan> {
    validate_terms(terms, sigma)?;
    let w: Vec<f64> = terms.iter().map(|&(a, d)| (a * a / 2.0 * d).sqrt()).collect();
    let total: f64 = w.iter().sum();
    let rows: Vec<ShotRow> = terms
        .iter()
        .zip(&w)
        .map(|(&(a, d), &wj)| {
            let shots = if a == 0.0 { 0 } else { ((4.0 / (sigma * sigma)) * wj * total).ceil().max(1.0) as u64 };
            ShotRow { a, lambda: a * a / 2.0, delta: d, shots }
        })
        .collect();
    let s: f64 = terms.iter().map(|&(a, d)| (a * a * d).sqrt()).sum();
    Ok(ShotPlan {
        total_cost: rows.iter().map(|r| r.shots).sum(),
        rows,
        sigma,
        predicted_cost: 2.0 * (s / sigma).powi(2),
    })
}

/// Same total budget spread evenly over the nonzero terms.
pub fn allocate_uniform(terms: &[(f64, f64)], sigma: f64, total_shots: u64) -> Result<ShotPlan> {
    validate_terms(terms, sigma)?;
    let active = terms.iter().filter(|t| t.0 != 0.0).count() as u64;
    let each = if active == 0 { 0 } else { (total_shots / active).max(1) };
    let rows: Vec<ShotRow> = terms
        .iter()
        .map(|&(a, d)| ShotRow { a, lambda: a * a / 2.0, delta: d, shots: if a == 0.0 { 0 } else { each } })
        .collect();
    let s: f64 = terms.iter().map(|&(a, d)| (a * a * d).sqrt()).sum();
    Ok(ShotPlan { total_cost: rows.iter().map(|r| r.shots).sum(), rows, sigma, predicted_cost: 2.0 * (s / sigma).powi(2) })
}

/// `φ_j = ⟨A_j†A_j⟩/Λ_j` from the exact term expectations.
pub fn rescaled_expectations(plan: &ShotPlan, expectations: &[f64]) -> Result<Vec<f64>> {
    if expectations.len() != plan.rows.len() {
        return Err(Error::invalid("one expectation per term is required"));
    }
    Ok(plan.rows.iter().zip(expectations).map(|(r, &e)| if r.lambda > 0.0 { e / r.lambda } else { 0.0 }).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HadamardEstimate {
    pub estimate: f64,
    pub phi_hat: Vec<f64>,
}

/// Slack on `[0, 2]` for expectations that saturate their bound up to rounding.
const PHI_ROUNDING: f64 = 1e-9;

fn check_phi(plan: &ShotPlan, phi: &[f64]) -> Result<()> {
    if phi.len() != plan.rows.len() {
        return Err(Error::invalid(format!("{} truths for {} terms", phi.len(), plan.rows.len())));
    }
    if let Some((j, v)) = phi.iter().enumerate().find(|(_, v)| !(-PHI_ROUNDING..=2.0 + PHI_ROUNDING).contains(*v)) {
        return Err(Error::invalid(format!("term {j}: rescaled expectation {v} outside [0, 2]")));
    }
    Ok(())
}

/// One run of every term's Hadamard tests, drawn as `Binomial(N_j, φ_j/2)`.
pub fn hadamard_test_simulate<R: Rng + ?Sized>(plan: &ShotPlan, phi: &[f64], rng: &mut R) -> Result<HadamardEstimate> {
    check_phi(plan, phi)?;
    let mut phi_hat = Vec::with_capacity(phi.len());
    let mut estimate = 0.0;
    for (r, &f) in plan.rows.iter().zip(phi) {
        if r.shots == 0 {
            phi_hat.push(0.0);
            continue;
        }
        let zeros = Binomial::new(r.shots, (f / 2.0).clamp(0.0, 1.0)).map_err(|e| Error::invalid(e.to_string()))?.sample(rng);
        let ph = 2.0 * zeros as f64 / r.shots as f64;
        estimate += r.lambda * ph;
        phi_hat.push(ph);
    }
    Ok(HadamardEstimate { estimate, phi_hat })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepetitionSummary {
    pub repetitions: usize,
    pub master_seed: u64,
    /// `Σ_j Λ_jφ_j`.
    pub truth: f64,
    pub mean: f64,
    pub bias: f64,
    /// Unbiased sample variance of the estimates.
    pub variance: f64,
    /// Every `Δ_j ≥ Λ_jφ_j`.
    pub bounds_valid: bool,
}

/// Independent repetitions, one generator stream per repetition.
pub fn repeat_hadamard(plan: &ShotPlan, phi: &[f64], repetitions: usize, master_seed: u64) -> Result<RepetitionSummary> {
    check_phi(plan, phi)?;
    if repetitions < 2 {
        return Err(Error::invalid("need at least two repetitions"));
    }
    let est: Vec<f64> = (0..repetitions)
        .into_par_iter()
        .map(|t| hadamard_test_simulate(plan, phi, &mut trial_rng(master_seed, t as u64)).map(|h| h.estimate))
        .collect::<Result<_>>()?;
    let n = est.len() as f64;
    let mean = est.iter().sum::<f64>() / n;
    let variance = est.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let truth: f64 = plan.rows.iter().zip(phi).map(|(r, f)| r.lambda * f).sum();
    let bounds_valid = plan.rows.iter().zip(phi).all(|(r, f)| r.delta >= r.lambda * f * (1.0 - 1e-12));
    Ok(RepetitionSummary { repetitions, master_seed, truth, mean, bias: mean - truth, variance, bounds_valid })
}

/// SOS terms `A_j = B_j` with the LCU normalization `a_j = ‖b⃗_j‖₁`.
pub fn sos_terms(gens: &SosGenerators) -> Result<Vec<(f64, PauliSum)>> {
    gens.vectors.iter().map(|b| Ok((b.iter().map(|c| c.norm()).sum(), gens.basis.operator(b)?))).collect()
}

/// `⟨ψ|A_j†A_j|ψ⟩ = ‖A_jψ‖²` for each term.
pub fn term_expectations(terms: &[PauliSum], psi: &[Complex64]) -> Result<Vec<f64>> {
    let mut out = vec![Complex64::default(); psi.len()];
    terms
        .iter()
        .map(|a| {
            if psi.len() != 1usize << a.n_qubits() {
                return Err(Error::invalid("state and operator dimensions differ"));
            }
            a.apply(psi, &mut out);
            Ok(out.iter().map(|c| c.norm_sqr()).sum())
        })
        .collect()
}
