use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Ledger;
use crate::error::Result;

/// Interval shrink factor of the thirds search.
pub const R: f64 = 2.0 / 3.0;

/// `log_{1/r} x`.
pub fn log_inv_r(x: f64) -> f64 {
    x.ln() / (1.0 / R).ln()
}

/// `q_i = (6/π²)·q/(i_max − i + 1)²`.
pub fn q_schedule(i: usize, i_max: usize, q: f64) -> f64 {
    let k = (i_max - i + 1) as f64;
    6.0 / (PI * PI) * q / (k * k)
}

/// One gapped-phase-estimation decision of a search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchState {
    pub stage: u8,
    pub iteration: usize,
    /// `[I_l, I_r]` before the decision.
    pub interval: [f64; 2],
    /// Midpoint `θ_i`.
    pub theta: f64,
    /// Gap `φ_i = |I_i|/6`.
    pub phi: f64,
    pub q_i: f64,
    /// `1` selects the lower two thirds.
    pub outcome: u8,
    /// Ledger after the decision.
    pub ledger: Ledger,
}

impl SearchState {
    pub fn width(&self) -> f64 {
        self.interval[1] - self.interval[0]
    }
}

/// Decision request handed to a search oracle.
#[derive(Clone, Copy, Debug)]
pub struct Step {
    pub theta: f64,
    pub phi: f64,
    pub q_i: f64,
}

/// When to leave the search before `i_max` iterations.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct StopRule {
    /// Leave `d` iterations after `I_l` first moves off its starting value.
    pub after_lift: Option<usize>,
    /// Leave once `λ(cos I_l − cos I_r) ≤ ε`, given as `(λ, ε)`.
    pub energy_width: Option<(f64, f64)>,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct SearchResult {
    pub interval: [f64; 2],
    pub iterations: usize,
}

/// Thirds search on `[start, start + w0]`, with widths `w0·r^i` recomputed exactly at every step.
///
/// `decide` returns `true` when the phase is judged to lie below `θ_i + φ_i`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn thirds_search(
    start: f64,
    w0: f64,
    i_max: usize,
    q: f64,
    stage: u8,
    stop: StopRule,
    ledger: &mut Ledger,
    trace: &mut Vec<SearchState>,
    mut decide: impl FnMut(Step, &mut Ledger) -> Result<bool>,
) -> Result<SearchResult> {
    let mut l = start;
    let mut lifted_at: Option<usize> = None;
    let mut i = 0;
    while i < i_max {
        let w = w0 * R.powi(i as i32);
        if let (Some(d), Some(f)) = (stop.after_lift, lifted_at) {
            if i >= f + d {
                break;
            }
        }
        if let Some((lambda, eps)) = stop.energy_width {
            if lambda * (l.cos() - (l + w).cos()) <= eps {
                break;
            }
        }
        let step = Step { theta: l + w / 2.0, phi: w / 6.0, q_i: q_schedule(i, i_max, q) };
        let low = decide(step, ledger)?;
        trace.push(SearchState {
            stage,
            iteration: i,
            interval: [l, l + w],
            theta: step.theta,
            phi: step.phi,
            q_i: step.q_i,
            outcome: u8::from(low),
            ledger: *ledger,
        });
        if !low {
            l += w / 3.0;
            if lifted_at.is_none() {
                lifted_at = Some(i + 1);
            }
        }
        i += 1;
    }
    let w = w0 * R.powi(i as i32);
    Ok(SearchResult { interval: [l, l + w], iterations: i })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_budget() {
        for i_max in [1usize, 5, 40, 200] {
            let s: f64 = (0..i_max).map(|i| q_schedule(i, i_max, 0.1)).sum();
            assert!(s <= 0.1);
        }
    }

    #[test]
    fn nested_widths() {
        let mut ledger = Ledger::default();
        let mut trace = Vec::new();
        let mut flip = false;
        let r = thirds_search(0.0, PI / 2.0, 12, 0.1, 1, StopRule::default(), &mut ledger, &mut trace, |_, _| {
            flip = !flip;
            Ok(flip)
        })
        .unwrap();
        for (i, s) in trace.iter().enumerate() {
            assert!((s.width() - PI / 2.0 * R.powi(i as i32)).abs() < 1e-15);
        }
        for w in trace.windows(2) {
            assert!(w[1].interval[0] >= w[0].interval[0] && w[1].interval[1] <= w[0].interval[1] + 1e-15);
        }
        assert_eq!(r.iterations, 12);
    }
}
