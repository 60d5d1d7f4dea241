//! Read-out semantics for sub-normalized states.
//!
//! A combined wave generally has norm below one, and what a detector does
//! with the missing weight is an open modeling choice. Three read-out
//! models are provided as interchangeable policies:
//!
//! * [`MeasurementModel::Born`] — click probability |cᵢ|² per outcome;
//!   the missing weight 1 − ‖ψ‖² is a silent no-click.
//! * [`MeasurementModel::CertainSlow`] — a click always arrives with
//!   probabilities renormalized to |cᵢ|²/‖ψ‖², but the expected waiting
//!   time grows as t₀/‖ψ‖².
//! * [`MeasurementModel::Thresholded`] — amplitudes below a magnitude
//!   threshold ε are invisible to the detector; any surviving amplitude
//!   clicks in normal time t₀.
//!
//! Sampling is a pure function of (state, policy, seed): the draw comes
//! from a fixed SplitMix64 stream, so identical inputs give identical
//! outcomes on every platform.

use std::collections::BTreeMap;

use crate::amplitude::StateVector;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasurementModel {
    Born,
    CertainSlow,
    Thresholded,
}

/// A read-out model plus its parameters: `epsilon` (Thresholded only) and
/// the base time unit `t0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementPolicy {
    pub model: MeasurementModel,
    pub epsilon: f64,
    pub t0: f64,
}

impl MeasurementPolicy {
    pub fn new(model: MeasurementModel, epsilon: f64, t0: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::InvalidPolicy(format!(
                "epsilon {epsilon} must lie in [0, 1)"
            )));
        }
        if !(t0 > 0.0 && t0.is_finite()) {
            return Err(Error::InvalidPolicy(format!("t0 {t0} must be positive")));
        }
        Ok(MeasurementPolicy { model, epsilon, t0 })
    }

    pub fn born(t0: f64) -> Result<Self> {
        Self::new(MeasurementModel::Born, 0.0, t0)
    }

    pub fn certain_slow(t0: f64) -> Result<Self> {
        Self::new(MeasurementModel::CertainSlow, 0.0, t0)
    }

    pub fn thresholded(epsilon: f64, t0: f64) -> Result<Self> {
        Self::new(MeasurementModel::Thresholded, epsilon, t0)
    }
}

impl Default for MeasurementPolicy {
    /// Born read-out with unit time.
    fn default() -> Self {
        MeasurementPolicy {
            model: MeasurementModel::Born,
            epsilon: 0.0,
            t0: 1.0,
        }
    }
}

/// One sampled read-out. `outcome` is present exactly when the detector
/// clicked; `time_cost` is the policy's expected time law in units of t₀
/// (infinite for a certain-click policy facing a null wave).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementOutcome {
    pub outcome: Option<usize>,
    pub time_cost: f64,
}

impl MeasurementOutcome {
    pub fn clicked(&self) -> bool {
        self.outcome.is_some()
    }
}

/// Analytic companion to sampling: click probability per basis index
/// (only nonzero entries are stored), the no-click probability, and the
/// expected time.
#[derive(Clone, Debug)]
pub struct OutcomeDistribution {
    pub click_probabilities: BTreeMap<usize, f64>,
    pub no_click_probability: f64,
    pub expected_time: f64,
}

impl OutcomeDistribution {
    pub fn click_probability(&self, outcome: usize) -> f64 {
        self.click_probabilities
            .get(&outcome)
            .copied()
            .unwrap_or(0.0)
    }

    pub fn total_click_probability(&self) -> f64 {
        self.click_probabilities.values().sum()
    }
}

/// Weight the model assigns to basis index `i`, before any renormalization.
fn raw_weight(policy: &MeasurementPolicy, amp_norm: f64) -> f64 {
    match policy.model {
        MeasurementModel::Born | MeasurementModel::CertainSlow => amp_norm * amp_norm,
        MeasurementModel::Thresholded => {
            if amp_norm < policy.epsilon {
                0.0
            } else {
                amp_norm * amp_norm
            }
        }
    }
}

/// Denominator and time law per model, given the summed raw weight.
fn click_scaling(policy: &MeasurementPolicy, weight_sum: f64) -> (f64, f64, f64) {
    // Returns (denominator, no_click_probability, expected_time).
    match policy.model {
        MeasurementModel::Born => (1.0, (1.0 - weight_sum).max(0.0), policy.t0),
        MeasurementModel::CertainSlow => {
            if weight_sum == 0.0 {
                (1.0, 1.0, f64::INFINITY)
            } else {
                (weight_sum, 0.0, policy.t0 / weight_sum)
            }
        }
        MeasurementModel::Thresholded => {
            if weight_sum == 0.0 {
                (1.0, 1.0, policy.t0)
            } else {
                (weight_sum, 0.0, policy.t0)
            }
        }
    }
}

/// Full analytic read-out distribution for `state` under `policy`.
pub fn outcome_distribution(
    state: &StateVector,
    policy: &MeasurementPolicy,
) -> OutcomeDistribution {
    let weight_sum: f64 = state
        .amplitudes()
        .iter()
        .map(|a| raw_weight(policy, a.norm()))
        .sum();
    let (denominator, no_click_probability, expected_time) = click_scaling(policy, weight_sum);
    let mut click_probabilities = BTreeMap::new();
    for (i, a) in state.amplitudes().iter().enumerate() {
        let w = raw_weight(policy, a.norm());
        if w > 0.0 {
            click_probabilities.insert(i, w / denominator);
        }
    }
    OutcomeDistribution {
        click_probabilities,
        no_click_probability,
        expected_time,
    }
}

/// Draws one read-out from the policy's distribution. Pure in
/// (state, policy, seed).
pub fn measure(state: &StateVector, policy: &MeasurementPolicy, seed: u64) -> MeasurementOutcome {
    let weight_sum: f64 = state
        .amplitudes()
        .iter()
        .map(|a| raw_weight(policy, a.norm()))
        .sum();
    let (denominator, _no_click, expected_time) = click_scaling(policy, weight_sum);
    if weight_sum == 0.0 {
        return MeasurementOutcome {
            outcome: None,
            time_cost: expected_time,
        };
    }
    let u = SplitMix64::new(seed).next_f64();
    let mut cumulative = 0.0;
    let mut last_nonzero = None;
    for (i, a) in state.amplitudes().iter().enumerate() {
        let p = raw_weight(policy, a.norm()) / denominator;
        if p > 0.0 {
            cumulative += p;
            last_nonzero = Some(i);
            if u < cumulative {
                return MeasurementOutcome {
                    outcome: Some(i),
                    time_cost: expected_time,
                };
            }
        }
    }
    match policy.model {
        // The click probabilities sum to 1 here; u fell into the rounding
        // tail, so land on the last representable outcome.
        MeasurementModel::CertainSlow | MeasurementModel::Thresholded => MeasurementOutcome {
            outcome: last_nonzero,
            time_cost: expected_time,
        },
        MeasurementModel::Born => MeasurementOutcome {
            outcome: None,
            time_cost: expected_time,
        },
    }
}
