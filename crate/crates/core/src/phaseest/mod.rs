//! Simulation of gapped phase estimation and the estimators built on it.
//!
//! Quantum states are replaced by weighted spectra; every block-encoding and
//! state-preparation use is charged to a [`Ledger`]. A block-encoding and its
//! inverse used in one walk step count as one query.

mod estimators;
mod gpe;
mod search;

pub use estimators::{
    amplified_amplitude_estimation, estimate_energy_adaptive, estimate_energy_with_prior, estimate_ground_energy,
    sa_phase_estimation, SaScenario,
};
pub use gpe::{cgpe_branch, cgpe_probabilities, gpe_sample, CgpeOutcome, GpeOutcome, GpeResponse, DEFAULT_GPE_COST};
pub use search::{log_inv_r, q_schedule, SearchState, R};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ledger {
    /// Block-encoding queries.
    pub q_h: u64,
    /// State-preparation queries.
    pub q_p: u64,
    /// Measurement outcomes drawn.
    pub samples: u64,
}

impl Ledger {
    pub fn add(&mut self, other: &Ledger) {
        self.q_h += other.q_h;
        self.q_p += other.q_p;
        self.samples += other.samples;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Target additive error in energy units.
    pub epsilon: f64,
    /// Failure probability.
    pub q: f64,
    /// Interval ratio; only `2/3` is supported.
    pub r: f64,
    /// `C` in the GPE charge `⌈C/ε_ang⌉·⌈ln(1/q)⌉`.
    pub gpe_cost_constant: f64,
    pub rng_seed: u64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig { epsilon: 1e-2, q: 0.05, r: R, gpe_cost_constant: DEFAULT_GPE_COST, rng_seed: 0 }
    }
}

impl EstimatorConfig {
    pub fn new(epsilon: f64, q: f64) -> Self {
        EstimatorConfig { epsilon, q, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::invalid(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(Error::invalid(format!("q must lie in (0, 1), got {}", self.q)));
        }
        if (self.r - R).abs() > 1e-12 {
            return Err(Error::invalid(format!("interval ratio is fixed at 2/3, got {}", self.r)));
        }
        if !(self.gpe_cost_constant > 0.0) {
            return Err(Error::invalid("GPE cost constant must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimationRun {
    pub estimate: f64,
    pub claimed_error: f64,
    pub ledger: Ledger,
    pub converged: bool,
    pub trace: Vec<SearchState>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

/// Finite weighted spectrum standing in for a state and a Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralScenario {
    pub eigenvalues: Vec<f64>,
    pub weights: Vec<f64>,
    pub lambda: f64,
}

impl SpectralScenario {
    pub fn new(eigenvalues: Vec<f64>, weights: Vec<f64>, lambda: f64) -> Result<Self> {
        let s = SpectralScenario { eigenvalues, weights, lambda };
        s.validate()?;
        Ok(s)
    }

    pub fn single(energy: f64, lambda: f64) -> Result<Self> {
        Self::new(vec![energy], vec![1.0], lambda)
    }

    pub fn validate(&self) -> Result<()> {
        if self.eigenvalues.is_empty() || self.eigenvalues.len() != self.weights.len() {
            return Err(Error::invalid("scenario needs matching, nonempty eigenvalue and weight lists"));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::invalid(format!("lambda must be positive, got {}", self.lambda)));
        }
        if self.weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::invalid("weights must be nonnegative"));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("weights sum to {total}, expected 1")));
        }
        for &e in &self.eigenvalues {
            if !e.is_finite() || e.abs() > self.lambda * (1.0 + 1e-12) {
                return Err(Error::OutsideNormalization { value: e, lambda: self.lambda });
            }
        }
        Ok(())
    }

    /// `⟨ψ|H|ψ⟩ = Σ p_j E_j`.
    pub fn expectation(&self) -> f64 {
        self.eigenvalues.iter().zip(&self.weights).map(|(e, w)| e * w).sum()
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Total weight on the lowest eigenvalue.
    pub fn ground_overlap(&self) -> f64 {
        let e0 = self.ground_energy();
        self.eigenvalues.iter().zip(&self.weights).filter(|(e, _)| (**e - e0).abs() <= 1e-12).map(|(_, w)| w).sum()
    }
}

/// Generator for trial `trial` of a run seeded with `master_seed`.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Runs `trials` independent trials in parallel; results are in trial order.
pub fn run_trials<F>(trials: usize, master_seed: u64, f: F) -> Result<Vec<EstimationRun>>
where
    F: Fn(&mut ChaCha8Rng) -> Result<EstimationRun> + Sync,
{
    (0..trials).into_par_iter().map(|t| f(&mut trial_rng(master_seed, t as u64))).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trials: usize,
    pub truth: f64,
    pub epsilon: f64,
    pub failures: usize,
    pub failure_rate: f64,
    /// 99th percentile of Binomial(trials, q).
    pub allowed_failures: u64,
    pub total: Ledger,
    pub mean_q_h: f64,
    pub mean_q_p: f64,
    pub max_q_h: u64,
    pub histogram: Histogram,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn new(values: &[f64], bins: usize) -> Self {
        let bins = bins.max(1);
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if values.is_empty() {
            return Histogram { edges: vec![], counts: vec![] };
        }
        let span = if hi > lo { hi - lo } else { 1.0 };
        let edges: Vec<f64> = (0..=bins).map(|k| lo + span * k as f64 / bins as f64).collect();
        let mut counts = vec![0; bins];
        for &v in values {
            let k = (((v - lo) / span) * bins as f64).floor() as usize;
            counts[k.min(bins - 1)] += 1;
        }
        Histogram { edges, counts }
    }
}

/// Smallest `k` with `P[Binomial(n, q) ≤ k] ≥ level`.
pub fn binomial_quantile(n: u64, q: f64, level: f64) -> Result<u64> {
    let b = Binomial::new(q, n).map_err(|e| Error::invalid(e.to_string()))?;
    Ok((0..=n).find(|&k| b.cdf(k) >= level).unwrap_or(n))
}

pub fn summarize(runs: &[EstimationRun], truth: f64, epsilon: f64, q: f64) -> Result<TrialSummary> {
    let n = runs.len();
    let failures = runs.iter().filter(|r| (r.estimate - truth).abs() > epsilon).count();
    let mut total = Ledger::default();
    for r in runs {
        total.add(&r.ledger);
    }
    let estimates: Vec<f64> = runs.iter().map(|r| r.estimate).collect();
    Ok(TrialSummary {
        trials: n,
        truth,
        epsilon,
        failures,
        failure_rate: if n > 0 { failures as f64 / n as f64 } else { 0.0 },
        allowed_failures: binomial_quantile(n as u64, q, 0.99)?,
        total,
        mean_q_h: total.q_h as f64 / n.max(1) as f64,
        mean_q_p: total.q_p as f64 / n.max(1) as f64,
        max_q_h: runs.iter().map(|r| r.ledger.q_h).max().unwrap_or(0),
        histogram: Histogram::new(&estimates, 20),
    })
}
