//! Equilibrium laboratory for a regime-change game in which a policymaker
//! can signal regime strength through a costly intervention.
//!
//! A continuum of agents receives private signals `x = theta + eps`, `eps`
//! uniform on `[-sigma, sigma]`, and decides whether to attack. The
//! policymaker observes `theta`, may first raise the policy from `r_lower`
//! at cost `(r - r_lower)^2 / 2`, and abandons the regime iff the attacking
//! mass is at least `theta`.
//!
//! Modules:
//! * [`model`] : parameters, payoffs and cost.
//! * [`continuation`] : the fixed-policy game, in closed form and by
//!   iterated dominance.
//! * [`signaling`] : the family of active-policy equilibria.
//! * [`statics`] : welfare comparisons across that family.
//! * [`monte_carlo`] : finite-agent simulation.
//! * [`verify`] : the invariant suite behind `regime-lab verify`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod continuation;
pub mod error;
pub mod grid;
pub mod model;
pub mod monte_carlo;
pub mod signaling;
pub mod statics;
pub mod verify;

pub use continuation::{
    attack_mass, best_response_cutoff, closed_form_thresholds, continuation_welfare,
    regime_fall_threshold, solve_iterated_dominance, success_prob_given_signal,
    ContinuationEquilibrium, DominanceTrace, SolverConfig,
};
pub use error::{Error, Result};
pub use grid::ThetaGrid;
pub use model::{
    agent_payoff, cost, policymaker_payoff, validate_params, AgentAction, Fundamental, ModelParams,
    RegimeDecision,
};
pub use monte_carlo::{
    finite_best_response, replication_seed, simulate_continuation, simulate_signaling, RepOutcome,
    SimConfig, SimOutcome,
};
pub use signaling::{max_policy, solve_signaling, PolicyRegion, SignalingEquilibrium};
pub use statics::{
    compare_welfare, critical_sigma, lower_threshold_sensitivity, sweep,
    welfare_derivative_in_rprime, SigmaRegime, SweepRow, Verdict, WelfareComparison, WELFARE_TOL,
};
pub use verify::{run_verify, CheckResult, VerifyGrid, VerifyOptions, VerifyReport};
