use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gpe::{cgpe_branch, gpe_sample, CgpeOutcome, GpeResponse};
use super::search::{log_inv_r, thirds_search, SearchState, Step, StopRule};
use super::{EstimationRun, EstimatorConfig, Ledger, SpectralScenario};
use crate::error::{Error, Result};

/// Phase of `−W` for an eigenvalue `e` of `H/λ`: `θ = arccos(−e/λ) ∈ [0, π]`.
fn walk_theta(e: f64, lambda: f64) -> f64 {
    (-e / lambda).clamp(-1.0, 1.0).acos()
}

fn ceil_count(x: f64) -> usize {
    if x.is_finite() && x > 0.0 {
        x.ceil() as usize
    } else {
        0
    }
}

/// One GPE measurement on a single walk phase; each query also uses `P` and `P†` when `with_prep`.
fn gpe_decide<R: Rng + ?Sized>(
    theta: f64,
    step: Step,
    cfg: &EstimatorConfig,
    with_prep: bool,
    ledger: &mut Ledger,
    rng: &mut R,
) -> Result<bool> {
    let resp = GpeResponse::new(step.theta, step.phi, step.q_i)?.with_cost_constant(cfg.gpe_cost_constant);
    let out = gpe_sample(&resp, theta, rng);
    ledger.q_h += out.charge;
    if with_prep {
        ledger.q_p += out.charge;
    }
    ledger.samples += 1;
    Ok(out.m == 1)
}

struct TwoStage {
    interval: [f64; 2],
    /// Stage one ended with `I_l = 0`.
    pinned: bool,
}

/// Stage one to constant multiplicative error, then stage two sized from its result.
#[allow(clippy::too_many_arguments)]
fn two_stage_search(
    lambda: f64,
    eps: f64,
    q1: f64,
    q2: f64,
    ledger: &mut Ledger,
    trace: &mut Vec<SearchState>,
    decide: &mut dyn FnMut(Step, &mut Ledger) -> Result<bool>,
) -> Result<TwoStage> {
    let i1 = ceil_count(0.5 * log_inv_r(PI * PI * lambda / (8.0 * eps)));
    let d = ceil_count(log_inv_r(16.0 * PI));
    let stop = StopRule { after_lift: Some(d), energy_width: Some((lambda, eps)) };
    let s1 = thirds_search(0.0, FRAC_PI_2, i1 + d, q1, 1, stop, ledger, trace, &mut *decide)?;
    let [l, r] = s1.interval;
    if l == 0.0 {
        return Ok(TwoStage { interval: s1.interval, pinned: true });
    }
    if lambda * (l.cos() - r.cos()) <= eps {
        return Ok(TwoStage { interval: s1.interval, pinned: false });
    }
    let h_r = lambda * r.cos();
    let c = 2.0 / (3f64.sqrt() * PI);
    let i2 = ceil_count(log_inv_r(((lambda - h_r) * lambda).sqrt() / (c * eps)));
    if i2 <= s1.iterations {
        return Ok(TwoStage { interval: s1.interval, pinned: false });
    }
    let stop = StopRule { after_lift: None, energy_width: Some((lambda, eps)) };
    let s2 = thirds_search(0.0, FRAC_PI_2, i2, q2, 2, stop, ledger, trace, &mut *decide)?;
    Ok(TwoStage { interval: s2.interval, pinned: false })
}

/// Picks the `θ` or `π − θ` branch for a magnitude estimate `|E| ∈ λ·cos([l, r])`.
#[allow(clippy::too_many_arguments)]
fn resolve_sign<R: Rng + ?Sized>(
    theta: f64,
    lambda: f64,
    interval: [f64; 2],
    magnitude: f64,
    eps: f64,
    q: f64,
    cfg: &EstimatorConfig,
    ledger: &mut Ledger,
    rng: &mut R,
) -> Result<(f64, Option<String>)> {
    let [l, r] = interval;
    if lambda * l.cos() <= eps {
        return Ok((0.0, None));
    }
    let gap = FRAC_PI_2 - r;
    if gap <= 0.0 {
        return Ok((0.0, Some("branch test skipped: interval reaches pi/2".into())));
    }
    let resp = GpeResponse::sign_test(gap, q)?.with_cost_constant(cfg.gpe_cost_constant);
    let (o, charge) = cgpe_branch(&resp, theta, rng);
    ledger.q_h += charge;
    ledger.q_p += charge;
    ledger.samples += 1;
    Ok((if o == CgpeOutcome::One1 { magnitude } else { -magnitude }, None))
}

fn adaptive_core<R: Rng + ?Sized>(
    energy: f64,
    lambda: f64,
    eps: f64,
    q: f64,
    cfg: &EstimatorConfig,
    rng: &mut R,
) -> Result<EstimationRun> {
    let theta = walk_theta(energy, lambda);
    let mut ledger = Ledger::default();
    let mut trace = Vec::new();
    let ts = {
        let mut decide = |s: Step, lg: &mut Ledger| gpe_decide(theta, s, cfg, true, lg, &mut *rng);
        two_stage_search(lambda, eps, q / 3.0, q / 3.0, &mut ledger, &mut trace, &mut decide)?
    };
    let [l, r] = ts.interval;
    let magnitude = if ts.pinned { lambda } else { 0.5 * lambda * (l.cos() + r.cos()) };
    let (estimate, warn) = resolve_sign(theta, lambda, ts.interval, magnitude, eps, q / 3.0, cfg, &mut ledger, rng)?;
    Ok(EstimationRun {
        estimate,
        claimed_error: eps,
        ledger,
        converged: warn.is_none(),
        trace,
        warnings: warn.into_iter().collect(),
    })
}

/// Estimates `⟨ψ|H|ψ⟩` with no prior on its location.
///
/// The expectation is block-encoded as a 1×1 matrix, so any scenario is
/// accepted and its mean energy is the target.
pub fn estimate_energy_adaptive<R: Rng + ?Sized>(
    scenario: &SpectralScenario,
    cfg: &EstimatorConfig,
    rng: &mut R,
) -> Result<EstimationRun> {
    cfg.validate()?;
    scenario.validate()?;
    adaptive_core(scenario.expectation(), scenario.lambda, cfg.epsilon, cfg.q, cfg, rng)
}

/// Estimates `⟨ψ|H|ψ⟩` given `⟨ψ|H|ψ⟩ ≤ −λ + Δ`, at phase precision `ε/√(2Δλ)`.
pub fn estimate_energy_with_prior<R: Rng + ?Sized>(
    scenario: &SpectralScenario,
    delta: f64,
    cfg: &EstimatorConfig,
    rng: &mut R,
) -> Result<EstimationRun> {
    cfg.validate()?;
    scenario.validate()?;
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::invalid(format!("Delta must be positive, got {delta}")));
    }
    let lambda = scenario.lambda;
    let energy = scenario.expectation();
    let theta = walk_theta(energy, lambda);
    let eps_pea = cfg.epsilon / (2.0 * delta * lambda).sqrt();
    let mut warnings = Vec::new();
    if energy > -lambda + delta + 1e-12 * lambda {
        warnings.push(format!("promise violated: energy {energy} above -lambda + Delta"));
    }
    let mut ledger = Ledger::default();
    let mut trace = Vec::new();
    let bounded = delta <= lambda;
    let theta_delta = if bounded { (1.0 - delta / lambda).max(-1.0).acos() } else { FRAC_PI_2 };
    let q_search = if bounded { cfg.q } else { cfg.q / 2.0 };
    let i_max = ceil_count(log_inv_r(theta_delta / (2.0 * eps_pea)));
    let res = {
        let mut decide = |s: Step, lg: &mut Ledger| gpe_decide(theta, s, cfg, true, lg, &mut *rng);
        thirds_search(0.0, theta_delta, i_max, q_search, 1, StopRule::default(), &mut ledger, &mut trace, &mut decide)?
    };
    let [l, r] = res.interval;
    let mid = 0.5 * lambda * (l.cos() + r.cos());
    let estimate = if bounded {
        -mid
    } else {
        let (e, w) = resolve_sign(theta, lambda, res.interval, mid, cfg.epsilon, cfg.q / 2.0, cfg, &mut ledger, rng)?;
        warnings.extend(w);
        e
    };
    Ok(EstimationRun { estimate, claimed_error: cfg.epsilon, ledger, converged: warnings.is_empty(), trace, warnings })
}

/// `E` is an eigenvalue of `H_SA†H_SA` with `λ = Σ_j a_j²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaScenario {
    pub energy: f64,
    pub lambda: f64,
}

/// Phase estimation of the Hermitian dilation of `H_SA/√λ`, squared afterwards.
///
/// The search runs over `θ = arccos(√(E/λ)) ∈ [arccos(√(Δ/λ)), π/2]` to
/// `ζ = √E` precision `min(ε/(3√Δ), √Δ)`.
pub fn sa_phase_estimation<R: Rng + ?Sized>(
    scenario: &SaScenario,
    delta: f64,
    cfg: &EstimatorConfig,
    rng: &mut R,
) -> Result<EstimationRun> {
    cfg.validate()?;
    let SaScenario { energy, lambda } = *scenario;
    if !(lambda > 0.0) || !(0.0..=lambda * (1.0 + 1e-12)).contains(&energy) {
        return Err(Error::OutsideNormalization { value: energy, lambda });
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::invalid(format!("Delta must be positive, got {delta}")));
    }
    let mut warnings = Vec::new();
    if energy > delta * (1.0 + 1e-12) {
        warnings.push(format!("support promise violated: eigenvalue {energy} above Delta = {delta}"));
    }
    let d = delta.min(lambda);
    let theta = (energy / lambda).clamp(0.0, 1.0).sqrt().acos();
    let theta_delta = (d / lambda).sqrt().acos();
    let w0 = FRAC_PI_2 - theta_delta;
    let eps_zeta = (cfg.epsilon / (3.0 * d.sqrt())).min(d.sqrt());
    let i_max = ceil_count(log_inv_r(w0 * lambda.sqrt() / (2.0 * eps_zeta)));
    let mut ledger = Ledger { q_p: 1, ..Default::default() };
    let mut trace = Vec::new();
    let res = {
        let mut decide = |s: Step, lg: &mut Ledger| gpe_decide(theta, s, cfg, false, lg, &mut *rng);
        thirds_search(theta_delta, w0, i_max, cfg.q, 1, StopRule::default(), &mut ledger, &mut trace, &mut decide)?
    };
    let [l, r] = res.interval;
    let zeta = 0.5 * lambda.sqrt() * (l.cos() + r.cos());
    Ok(EstimationRun {
        estimate: zeta * zeta,
        claimed_error: cfg.epsilon,
        ledger,
        converged: warnings.is_empty(),
        trace,
        warnings,
    })
}

fn aae_core<R: Rng + ?Sized>(a: f64, eps: f64, q: f64, cfg: &EstimatorConfig, rng: &mut R) -> Result<EstimationRun> {
    let mut run = adaptive_core(2.0 * a - 1.0, 1.0, 2.0 * eps, q, cfg, rng)?;
    run.estimate = ((run.estimate + 1.0) / 2.0).clamp(0.0, 1.0);
    run.claimed_error = eps;
    Ok(run)
}

/// Estimates `a = ⟨ψ|Π|ψ⟩` through the energy of `H = 2Π − 1` at `λ = 1`.
pub fn amplified_amplitude_estimation<R: Rng + ?Sized>(
    a: f64,
    cfg: &EstimatorConfig,
    rng: &mut R,
) -> Result<EstimationRun> {
    cfg.validate()?;
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::invalid(format!("projector expectation must lie in [0, 1], got {a}")));
    }
    aae_core(a, cfg.epsilon, cfg.q, cfg, rng)
}

/// Ground-state energy from a state with ground overlap at least `p`.
///
/// Each search decision estimates `κ = Σ_j p_j |β(θ_j)|²` by amplified
/// amplitude estimation to error `p/4` and compares it with `p/2`.
pub fn estimate_ground_energy<R: Rng + ?Sized>(
    scenario: &SpectralScenario,
    p: f64,
    cfg: &EstimatorConfig,
    rng: &mut R,
) -> Result<EstimationRun> {
    cfg.validate()?;
    scenario.validate()?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::invalid(format!("overlap bound p must lie in (0, 1], got {p}")));
    }
    let lambda = scenario.lambda;
    let e0 = scenario.ground_energy();
    if e0 > 0.0 {
        return Err(Error::invalid(format!("ground energy {e0} outside [-lambda, 0]")));
    }
    let mut warnings = Vec::new();
    if scenario.ground_overlap() < p - 1e-12 {
        warnings.push(format!("ground overlap {} below the bound p = {p}", scenario.ground_overlap()));
    }
    let thetas: Vec<f64> = scenario.eigenvalues.iter().map(|&e| walk_theta(e, lambda)).collect();
    let mut ledger = Ledger::default();
    let mut trace = Vec::new();
    let ts = {
        let mut decide = |s: Step, lg: &mut Ledger| -> Result<bool> {
            let resp = GpeResponse::new(s.theta, s.phi, p / 4.0)?.with_cost_constant(cfg.gpe_cost_constant);
            let kappa: f64 = thetas.iter().zip(&scenario.weights).map(|(&t, w)| w * resp.prob_one(t)).sum();
            let inner = aae_core(kappa.clamp(0.0, 1.0), p / 4.0, s.q_i, cfg, &mut *rng)?;
            lg.q_h += inner.ledger.q_h * resp.charge();
            lg.q_p += inner.ledger.q_p;
            lg.samples += inner.ledger.samples;
            Ok(inner.estimate > p / 2.0)
        };
        two_stage_search(lambda, cfg.epsilon, cfg.q / 2.0, cfg.q / 2.0, &mut ledger, &mut trace, &mut decide)?
    };
    let [l, r] = ts.interval;
    let estimate = if ts.pinned { -lambda } else { -0.5 * lambda * (l.cos() + r.cos()) };
    Ok(EstimationRun { estimate, claimed_error: cfg.epsilon, ledger, converged: warnings.is_empty(), trace, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phaseest::trial_rng;

    #[test]
    fn adaptive_endpoint() {
        let sc = SpectralScenario::single(-1.0, 1.0).unwrap();
        let run = estimate_energy_adaptive(&sc, &EstimatorConfig::new(1e-3, 0.05), &mut trial_rng(1, 0)).unwrap();
        assert_eq!(run.estimate, -1.0);
    }

    #[test]
    fn sa_zero() {
        let sc = SaScenario { energy: 0.0, lambda: 1.0 };
        let run = sa_phase_estimation(&sc, 0.01, &EstimatorConfig::new(1e-4, 0.05), &mut trial_rng(1, 0)).unwrap();
        assert!(run.estimate <= 1e-4);
    }
}
