use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};

use crate::error::{Error, Result};

pub const DEFAULT_GPE_COST: f64 = 4.0;

/// Analytic response of gapped phase estimation around `θ0` with angular gap `eps`.
///
/// `|β(θ)|² = ½ erfc((cos θ0 cos eps − |cos θ|) / width)`, with the sign of
/// `β` following `cos θ`. The width puts the window edges at `q/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GpeResponse {
    pub theta0: f64,
    pub eps: f64,
    pub q: f64,
    pub width: f64,
    pub cost_constant: f64,
}

impl GpeResponse {
    pub fn new(theta0: f64, eps: f64, q: f64) -> Result<Self> {
        let ok = eps > 0.0 && eps <= theta0 * (1.0 + 1e-12) && theta0 + eps <= FRAC_PI_2 * (1.0 + 1e-12);
        if !ok || !theta0.is_finite() {
            return Err(Error::GpeParameters { theta0, eps });
        }
        Self::build(theta0, eps, q)
    }

    /// Response used inside the controlled variant: runs at `q' = 4q/5`.
    pub fn for_cgpe(theta0: f64, eps: f64, q: f64) -> Result<Self> {
        Self::new(theta0, eps, 0.8 * q)
    }

    /// Branch test at `θ0 = π/2`: separates `|θ| ≤ π/2 − eps` from `|θ − π| ≤ π/2 − eps`.
    pub(crate) fn sign_test(eps: f64, q: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= FRAC_PI_2) {
            return Err(Error::GpeParameters { theta0: FRAC_PI_2, eps });
        }
        Self::build(FRAC_PI_2, eps, 0.8 * q)
    }

    fn build(theta0: f64, eps: f64, q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::invalid(format!("GPE confidence q must lie in (0, 1), got {q}")));
        }
        let width = theta0.sin() * eps.sin() / erfc_inv(q);
        Ok(GpeResponse { theta0, eps, q, width, cost_constant: DEFAULT_GPE_COST })
    }

    pub fn with_cost_constant(mut self, c: f64) -> Self {
        self.cost_constant = c;
        self
    }

    /// `|β(θ)|²`, the probability of outcome `m = 1`.
    pub fn prob_one(&self, theta: f64) -> f64 {
        let center = self.theta0.cos() * self.eps.cos();
        0.5 * erfc((center - theta.cos().abs()) / self.width)
    }

    pub fn beta(&self, theta: f64) -> f64 {
        let b = self.prob_one(theta).sqrt();
        if theta.cos() < 0.0 {
            -b
        } else {
            b
        }
    }

    pub fn alpha_sq(&self, theta: f64) -> f64 {
        1.0 - self.prob_one(theta)
    }

    /// `⌈C/eps⌉·⌈ln(1/q)⌉` block-encoding queries.
    pub fn charge(&self) -> u64 {
        let a = (self.cost_constant / self.eps).ceil();
        let b = (1.0 / self.q).ln().ceil().max(1.0);
        (a * b) as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GpeOutcome {
    pub m: u8,
    pub charge: u64,
}

pub fn gpe_sample<R: Rng + ?Sized>(resp: &GpeResponse, theta: f64, rng: &mut R) -> GpeOutcome {
    let m = u8::from(rng.random::<f64>() < resp.prob_one(theta));
    GpeOutcome { m, charge: resp.charge() }
}

/// Two-qubit outcome of controlled GPE.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CgpeOutcome {
    /// `|01⟩`: the `θ ≈ 0` branch.
    Zero1,
    /// `|11⟩`: the `θ ≈ π` branch.
    One1,
    Other,
}

/// `(P(01), P(11), P(other))`.
pub fn cgpe_probabilities(resp: &GpeResponse, theta: f64) -> (f64, f64, f64) {
    let b = resp.beta(theta);
    ((1.0 + b).powi(2) / 4.0, (1.0 - b).powi(2) / 4.0, resp.alpha_sq(theta) / 2.0)
}

pub fn cgpe_branch<R: Rng + ?Sized>(resp: &GpeResponse, theta: f64, rng: &mut R) -> (CgpeOutcome, u64) {
    let (p01, p11, _) = cgpe_probabilities(resp, theta);
    let u = rng.random::<f64>();
    let o = if u < p01 {
        CgpeOutcome::Zero1
    } else if u < p01 + p11 {
        CgpeOutcome::One1
    } else {
        CgpeOutcome::Other
    };
    (o, resp.charge())
}
