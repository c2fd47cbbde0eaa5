//! The continuation game with a publicly observed, exogenous policy `r`.
//!
//! Agents attack iff their signal is at or below a cutoff `x_cutoff`; the
//! regime falls iff `theta <= theta_cutoff`. The equilibrium pair is
//! available in closed form and, independently, as the common limit of the
//! two monotone cutoff sequences produced by iterated elimination of
//! conditionally dominated strategies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Equilibrium thresholds of the fixed-`r` continuation game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuationEquilibrium {
    pub r: f64,
    /// Agents attack iff `x <= x_cutoff`.
    pub x_cutoff: f64,
    /// The regime falls iff `theta <= theta_cutoff`.
    pub theta_cutoff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    tol: f64,
    max_iter: usize,
}

impl SolverConfig {
    pub fn new(tol: f64, max_iter: usize) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::domain("tol must be positive"));
        }
        if max_iter == 0 {
            return Err(Error::domain("max_iter must be at least 1"));
        }
        Ok(Self { tol, max_iter })
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 10_000,
        }
    }
}

/// Iterates of the dominance argument.
///
/// `upper_seq` starts from a cutoff at which everyone attacks on the
/// relevant range and is non-increasing; `lower_seq` starts from a cutoff at
/// which nobody attacks and is non-decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceTrace {
    pub upper_seq: Vec<f64>,
    pub lower_seq: Vec<f64>,
    pub converged: bool,
    /// Lipschitz bound `1 / (1 + 2 sigma)` of the best-response map.
    pub contraction_modulus: f64,
}

impl DominanceTrace {
    pub fn iterations(&self) -> usize {
        self.upper_seq.len().saturating_sub(1)
    }
}

fn check_unit_policy(r: f64) -> Result<()> {
    if (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::domain(
            "policy r must lie in [0,1] for the continuation game",
        ))
    }
}

/// `x(r) = (1 + 2 sigma)(1 - r) - sigma`, `theta(r) = 1 - r`.
pub fn closed_form_thresholds(params: &ModelParams, r: f64) -> Result<ContinuationEquilibrium> {
    check_unit_policy(r)?;
    let sigma = params.sigma();
    Ok(ContinuationEquilibrium {
        r,
        x_cutoff: (1.0 + 2.0 * sigma) * (1.0 - r) - sigma,
        theta_cutoff: 1.0 - r,
    })
}

/// Mass of agents whose signal lies at or below `x_cutoff` when the
/// fundamental is `theta`.
pub fn attack_mass(params: &ModelParams, x_cutoff: f64, theta: f64) -> f64 {
    let sigma = params.sigma();
    ((x_cutoff - theta + sigma) / (2.0 * sigma)).clamp(0.0, 1.0)
}

/// Posterior probability that `theta <= theta_cutoff` given signal `x`.
pub fn success_prob_given_signal(params: &ModelParams, theta_cutoff: f64, x: f64) -> f64 {
    let sigma = params.sigma();
    ((theta_cutoff - x + sigma) / (2.0 * sigma)).clamp(0.0, 1.0)
}

/// Fixed point of `theta -> attack_mass(x_cutoff, theta)`.
///
/// The interior solution is `(x_cutoff + sigma) / (1 + 2 sigma)`. Since the
/// attack mass lives in `[0, 1]` the fixed point does too, so the interior
/// formula is clamped there.
pub fn regime_fall_threshold(params: &ModelParams, x_cutoff: f64) -> f64 {
    let sigma = params.sigma();
    ((x_cutoff + sigma) / (1.0 + 2.0 * sigma)).clamp(0.0, 1.0)
}

/// Cutoff of an agent who is indifferent when everyone else uses `x_hat`:
/// the posterior success probability must equal `r`.
pub fn best_response_cutoff(params: &ModelParams, r: f64, x_hat: f64) -> Result<f64> {
    check_unit_policy(r)?;
    Ok(best_response_unchecked(params, r, x_hat))
}

fn best_response_unchecked(params: &ModelParams, r: f64, x_hat: f64) -> f64 {
    regime_fall_threshold(params, x_hat) + params.sigma() * (1.0 - 2.0 * r)
}

/// Runs the upper and lower dominance sequences until they meet within
/// `config.tol`.
///
/// Starting cutoffs sit strictly outside the dominance regions:
/// `2 + sigma` (everyone attacks whenever `theta <= 1`) and `-sigma - 1`
/// (nobody attacks whenever `theta >= 0`).
pub fn solve_iterated_dominance(
    params: &ModelParams,
    r: f64,
    config: &SolverConfig,
) -> Result<(ContinuationEquilibrium, DominanceTrace)> {
    check_unit_policy(r)?;
    let sigma = params.sigma();
    let mut upper = 1.0 + sigma + 1.0;
    let mut lower = -sigma - 1.0;
    let mut trace = DominanceTrace {
        upper_seq: vec![upper],
        lower_seq: vec![lower],
        converged: false,
        contraction_modulus: 1.0 / (1.0 + 2.0 * sigma),
    };

    for _ in 0..config.max_iter {
        let next_upper = best_response_unchecked(params, r, upper);
        let next_lower = best_response_unchecked(params, r, lower);
        let stalled = next_upper == upper && next_lower == lower;
        upper = next_upper;
        lower = next_lower;
        trace.upper_seq.push(upper);
        trace.lower_seq.push(lower);

        if upper - lower <= config.tol {
            trace.converged = true;
            let x_cutoff = 0.5 * (upper + lower);
            let eq = ContinuationEquilibrium {
                r,
                x_cutoff,
                theta_cutoff: regime_fall_threshold(params, x_cutoff),
            };
            return Ok((eq, trace));
        }
        if stalled {
            // Rounding floor reached above tol; more iterations cannot help.
            break;
        }
    }

    Err(Error::Convergence {
        iterations: trace.iterations(),
        gap: upper - lower,
    })
}

/// Policymaker payoff when `r` is set exogenously and not read as a signal:
/// `-c(r)` if the regime falls, `theta - A(theta) - c(r)` otherwise.
pub fn continuation_welfare(params: &ModelParams, r: f64, theta: f64) -> Result<f64> {
    let eq = closed_form_thresholds(params, r)?;
    let c = params.cost_unchecked(r);
    if theta <= eq.theta_cutoff {
        Ok(-c)
    } else {
        Ok(theta - attack_mass(params, eq.x_cutoff, theta) - c)
    }
}
