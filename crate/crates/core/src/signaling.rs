//! Active-policy signalling equilibria, one for each intervention level
//! `r_prime` in `(r_lower, r_tilde]`.
//!
//! Types in `[theta_lower, theta_upper]` intervene with `r_prime`, which
//! agents read as proof that the regime is not weak, so nobody attacks.
//! Everyone else plays `r_lower`, after which agents attack iff their signal
//! is at or below `x_prime`. Any other observed `r > r_lower` is read the same
//! way as `r_prime` (zero attack); this off-path rule has no solver branch.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Largest sustainable intervention, `r_lower + sqrt(2 (1 - r_lower))`.
///
/// It is the level whose cost equals the no-signal fall threshold
/// `1 - r_lower`.
pub fn max_policy(params: &ModelParams) -> f64 {
    params.r_lower() + (2.0 * (1.0 - params.r_lower())).sqrt()
}

/// Threshold bundle of the signalling equilibrium indexed by `r_prime`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalingEquilibrium {
    params: ModelParams,
    r_prime: f64,
    theta_lower: f64,
    theta_upper: f64,
    x_prime: f64,
    theta_no_attack: f64,
    r_tilde: f64,
}

/// Where a fundamental sits relative to the equilibrium cutoffs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolicyRegion {
    /// `theta < theta_lower`: no intervention, the regime falls.
    AbandonRegion,
    /// `theta_lower <= theta <= theta_upper`: intervene, no attack.
    InterveneRegion,
    /// `theta_upper < theta < theta_no_attack`: partial attack is repelled.
    DefendUnderAttackRegion,
    /// `theta >= theta_no_attack`: nobody attacks.
    NoAttackRegion,
}

impl PolicyRegion {
    pub fn as_str(self) -> &'static str {
        match self {
            PolicyRegion::AbandonRegion => "abandon",
            PolicyRegion::InterveneRegion => "intervene",
            PolicyRegion::DefendUnderAttackRegion => "defend",
            PolicyRegion::NoAttackRegion => "no-attack",
        }
    }
}

impl fmt::Display for PolicyRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Slope factor `1 - 2 sigma r_lower / (1 - r_lower)` of the attack
/// breakpoints in `theta_lower`.
fn breakpoint_slope(params: &ModelParams) -> f64 {
    let rl = params.r_lower();
    1.0 - 2.0 * params.sigma() * rl / (1.0 - rl)
}

/// Builds the equilibrium for `r_prime in (r_lower, r_tilde]`.
pub fn solve_signaling(params: &ModelParams, r_prime: f64) -> Result<SignalingEquilibrium> {
    let r_tilde = max_policy(params);
    let rl = params.r_lower();
    if !(r_prime > rl && r_prime <= r_tilde) {
        return Err(Error::domain(format!(
            "r_prime must lie in ({rl}, {r_tilde}]"
        )));
    }
    let sigma = params.sigma();
    let theta_lower = params.cost_unchecked(r_prime);
    let theta_upper = 2.0 * sigma + (1.0 - 2.0 * sigma / (1.0 - rl)) * theta_lower;
    let x_prime = theta_upper + sigma * (2.0 * theta_lower - 1.0);
    let theta_no_attack = theta_upper + 2.0 * sigma * theta_lower;
    Ok(SignalingEquilibrium {
        params: *params,
        r_prime,
        theta_lower,
        theta_upper,
        x_prime,
        theta_no_attack,
        r_tilde,
    })
}

impl SignalingEquilibrium {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn r_prime(&self) -> f64 {
        self.r_prime
    }

    /// Lowest intervening type; equals the cost of `r_prime`.
    pub fn theta_lower(&self) -> f64 {
        self.theta_lower
    }

    /// Highest intervening type, indifferent between intervening and
    /// facing the partial attack.
    pub fn theta_upper(&self) -> f64 {
        self.theta_upper
    }

    /// Attack cutoff after observing `r_lower`.
    pub fn x_prime(&self) -> f64 {
        self.x_prime
    }

    /// Smallest fundamental with zero attack after `r_lower`.
    pub fn theta_no_attack(&self) -> f64 {
        self.theta_no_attack
    }

    pub fn r_tilde(&self) -> f64 {
        self.r_tilde
    }

    /// Lower edge of the linear band of the no-intervention attack curve;
    /// below it everyone attacks.
    pub fn full_attack_bound(&self) -> f64 {
        breakpoint_slope(&self.params) * self.theta_lower
    }

    /// Upper edge of the linear band computed from `r_lower` alone, the
    /// alternative form of [`Self::theta_no_attack`].
    pub fn no_attack_bound(&self) -> f64 {
        2.0 * self.params.sigma() + breakpoint_slope(&self.params) * self.theta_lower
    }

    /// The equilibrium policy strategy: `r_prime` on the closed interval
    /// `[theta_lower, theta_upper]`, `r_lower` elsewhere.
    pub fn policy_strategy(&self, theta: f64) -> f64 {
        if theta >= self.theta_lower && theta <= self.theta_upper {
            self.r_prime
        } else {
            self.params.r_lower()
        }
    }

    /// Aggregate attack following no intervention.
    pub fn aggregate_attack_no_intervention(&self, theta: f64) -> f64 {
        let lo = self.full_attack_bound();
        let hi = self.no_attack_bound();
        if theta < lo {
            1.0
        } else if theta < hi {
            (hi - theta) / (2.0 * self.params.sigma())
        } else {
            0.0
        }
    }

    /// Policymaker's realised payoff as a function of the true fundamental.
    pub fn ex_post_welfare(&self, theta: f64) -> f64 {
        let sigma = self.params.sigma();
        let rl = self.params.r_lower();
        if theta < self.theta_lower {
            0.0
        } else if theta < self.theta_upper {
            theta - self.theta_lower
        } else if theta < self.theta_no_attack {
            let k = 1.0 / (2.0 * sigma);
            (1.0 + k) * theta - (k - rl / (1.0 - rl)) * self.theta_lower - 1.0
        } else {
            theta
        }
    }

    pub fn classify_region(&self, theta: f64) -> PolicyRegion {
        if theta < self.theta_lower {
            PolicyRegion::AbandonRegion
        } else if theta <= self.theta_upper {
            PolicyRegion::InterveneRegion
        } else if theta < self.theta_no_attack {
            PolicyRegion::DefendUnderAttackRegion
        } else {
            PolicyRegion::NoAttackRegion
        }
    }

    /// Copy with `theta_upper` shifted by `delta`; used as a negative
    /// control by the verification suite.
    #[doc(hidden)]
    pub fn with_theta_upper_offset(mut self, delta: f64) -> Self {
        self.theta_upper += delta;
        self
    }
}
