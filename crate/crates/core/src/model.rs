//! Primitive environment: parameters, actions, payoffs and the policy cost.
//!
//! The fundamental has an improper flat prior on the real line. It is never
//! materialised as a distribution; downstream code only uses the implied
//! posterior, uniform on `[x - sigma, x + sigma]` given a signal `x`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Noise half-width `sigma` and baseline (zero-cost) policy `r_lower`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    sigma: f64,
    r_lower: f64,
}

impl ModelParams {
    /// Validates `sigma > 0` and `0 < r_lower < 1`.
    pub fn new(sigma: f64, r_lower: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::domain("sigma must be positive"));
        }
        if !(r_lower > 0.0 && r_lower < 1.0) {
            return Err(Error::domain("r_lower must lie in (0,1)"));
        }
        Ok(Self { sigma, r_lower })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn r_lower(&self) -> f64 {
        self.r_lower
    }

    /// Quadratic intervention cost `(r - r_lower)^2 / 2`.
    pub fn cost(&self, r: f64) -> Result<f64> {
        check_policy(r)?;
        let d = r - self.r_lower;
        Ok(0.5 * d * d)
    }

    /// Cost without the `r >= 0` check, for callers that already hold a
    /// validated policy level.
    pub(crate) fn cost_unchecked(&self, r: f64) -> f64 {
        let d = r - self.r_lower;
        0.5 * d * d
    }
}

/// Free-function form of [`ModelParams::new`].
pub fn validate_params(sigma: f64, r_lower: f64) -> Result<ModelParams> {
    ModelParams::new(sigma, r_lower)
}

/// Free-function form of [`ModelParams::cost`].
pub fn cost(params: &ModelParams, r: f64) -> Result<f64> {
    params.cost(r)
}

/// An agent's binary choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AgentAction {
    Attack,
    Refrain,
}

/// The policymaker's final move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeDecision {
    Maintain,
    Abandon,
}

impl RegimeDecision {
    /// The regime is abandoned iff `theta <= attack`; ties fall.
    pub fn resolve(theta: f64, attack: f64) -> Self {
        if theta <= attack {
            RegimeDecision::Abandon
        } else {
            RegimeDecision::Maintain
        }
    }
}

/// Regime strength. Any finite real is admissible.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Fundamental(f64);

impl Fundamental {
    pub fn new(theta: f64) -> Result<Self> {
        if theta.is_finite() {
            Ok(Self(theta))
        } else {
            Err(Error::domain("theta must be finite"))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn check_policy(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("policy r must be non-negative"))
    }
}

/// Agent payoff: `-r` for a failed attack, `1 - r` for a successful one,
/// zero when refraining.
pub fn agent_payoff(action: AgentAction, r: f64, decision: RegimeDecision) -> Result<f64> {
    check_policy(r)?;
    Ok(match (action, decision) {
        (AgentAction::Refrain, _) => 0.0,
        (AgentAction::Attack, RegimeDecision::Maintain) => -r,
        (AgentAction::Attack, RegimeDecision::Abandon) => 1.0 - r,
    })
}

/// Policymaker payoff `(1 - d)(theta - alpha) - c(r)` where `alpha` is the
/// attacking mass.
pub fn policymaker_payoff(
    params: &ModelParams,
    r: f64,
    decision: RegimeDecision,
    theta: f64,
    alpha: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain("alpha must lie in [0,1]"));
    }
    let c = params.cost(r)?;
    Ok(match decision {
        RegimeDecision::Maintain => (theta - alpha) - c,
        RegimeDecision::Abandon => -c,
    })
}
