//! Finite-agent simulation of the attack stage.
//!
//! Each replication draws `n_agents` signals `theta + eps` with `eps`
//! uniform on `[-sigma, sigma]`, lets agents at or below the cutoff attack,
//! and resolves the regime with the same tie rule as the continuum model.
//! Replication `i` is seeded from `replication_seed(master_seed, i)`, so
//! results do not depend on how replications are scheduled across threads.

use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{policymaker_payoff, ModelParams, RegimeDecision};
use crate::signaling::SignalingEquilibrium;

/// Two-sided 99% standard normal quantile.
const Z_99: f64 = 2.575_829_303_548_900_4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    n_agents: usize,
    n_reps: usize,
    master_seed: u64,
    keep_reps: bool,
}

impl SimConfig {
    pub fn new(n_agents: usize, n_reps: usize, master_seed: u64) -> Result<Self> {
        if n_agents == 0 {
            return Err(Error::domain("n_agents must be at least 1"));
        }
        if n_reps == 0 {
            return Err(Error::domain("n_reps must be at least 1"));
        }
        Ok(Self {
            n_agents,
            n_reps,
            master_seed,
            keep_reps: false,
        })
    }

    /// Keep per-replication outcomes in [`SimOutcome::per_rep`].
    pub fn with_per_rep(mut self, keep: bool) -> Self {
        self.keep_reps = keep;
        self
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn n_reps(&self) -> usize {
        self.n_reps
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepOutcome {
    pub alpha: f64,
    pub decision: RegimeDecision,
    pub welfare: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    pub alpha_mean: f64,
    /// 99% normal-approximation half-width of `alpha_mean` across replications.
    pub alpha_halfwidth: f64,
    pub fall_frequency: f64,
    pub welfare_mean: f64,
    pub per_rep: Option<Vec<RepOutcome>>,
}

impl SimOutcome {
    fn aggregate(reps: Vec<RepOutcome>, keep: bool) -> Self {
        let n = reps.len() as f64;
        let alpha_mean = reps.iter().map(|o| o.alpha).sum::<f64>() / n;
        let falls = reps
            .iter()
            .filter(|o| o.decision == RegimeDecision::Abandon)
            .count();
        let welfare_mean = reps.iter().map(|o| o.welfare).sum::<f64>() / n;
        let alpha_halfwidth = if reps.len() > 1 {
            let ss: f64 = reps.iter().map(|o| (o.alpha - alpha_mean).powi(2)).sum();
            Z_99 * (ss / (n - 1.0)).sqrt() / n.sqrt()
        } else {
            0.0
        };
        Self {
            alpha_mean,
            alpha_halfwidth,
            fall_frequency: falls as f64 / n,
            welfare_mean,
            per_rep: keep.then_some(reps),
        }
    }
}

/// Counter-based sub-seed: a splitmix64 finaliser applied to the master seed
/// advanced by `rep + 1` golden-ratio increments.
pub fn replication_seed(master_seed: u64, rep: u64) -> u64 {
    let mut z = master_seed.wrapping_add(rep.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn replication_rng(config: &SimConfig, rep: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(replication_seed(config.master_seed, rep as u64))
}

fn noise(params: &ModelParams) -> Uniform<f64> {
    let s = params.sigma();
    Uniform::new_inclusive(-s, s).expect("sigma is positive and finite")
}

/// Simulates the continuation game with agents using `x_cutoff`.
pub fn simulate_continuation(
    params: &ModelParams,
    r: f64,
    theta: f64,
    x_cutoff: f64,
    config: &SimConfig,
) -> Result<SimOutcome> {
    params.cost(r)?;
    if !theta.is_finite() {
        return Err(Error::domain("theta must be finite"));
    }
    if x_cutoff.is_nan() {
        return Err(Error::domain("x_cutoff must not be NaN"));
    }
    let dist = noise(params);
    let n = config.n_agents;
    let reps = (0..config.n_reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replication_rng(config, rep);
            let attackers = (0..n)
                .filter(|_| theta + dist.sample(&mut rng) <= x_cutoff)
                .count();
            let alpha = attackers as f64 / n as f64;
            let decision = RegimeDecision::resolve(theta, alpha);
            let welfare = policymaker_payoff(params, r, decision, theta, alpha)?;
            Ok(RepOutcome {
                alpha,
                decision,
                welfare,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SimOutcome::aggregate(reps, config.keep_reps))
}

/// Simulates one draw of the signalling equilibrium at fundamental `theta`.
///
/// Intervening types face no attack at all; everyone else plays `r_lower`
/// and agents attack below `x_prime`.
pub fn simulate_signaling(
    eq: &SignalingEquilibrium,
    theta: f64,
    config: &SimConfig,
) -> Result<SimOutcome> {
    let params = eq.params();
    let r = eq.policy_strategy(theta);
    if r == eq.r_prime() {
        let welfare = policymaker_payoff(params, r, RegimeDecision::Maintain, theta, 0.0)?;
        let rep = RepOutcome {
            alpha: 0.0,
            decision: RegimeDecision::Maintain,
            welfare,
        };
        return Ok(SimOutcome::aggregate(
            vec![rep; config.n_reps],
            config.keep_reps,
        ));
    }
    simulate_continuation(params, params.r_lower(), theta, eq.x_prime(), config)
}

/// Largest `theta` with empirical attack mass at least `theta`, where the
/// attack mass at `theta` is the share of `sorted_noise` at or below
/// `x_hat - theta`.
fn empirical_fall_threshold(sorted_noise: &[f64], x_hat: f64) -> f64 {
    let n = sorted_noise.len();
    let nf = n as f64;
    // first k (1-based) with k/n >= x_hat - e_k; the gap is increasing in k
    let (mut lo, mut hi) = (1usize, n + 1);
    while lo < hi {
        let k = lo + (hi - lo) / 2;
        if k as f64 / nf >= x_hat - sorted_noise[k - 1] {
            hi = k;
        } else {
            lo = k + 1;
        }
    }
    let k0 = lo;
    let mut best = 0.0f64;
    if k0 > 1 {
        best = best.max((k0 - 1) as f64 / nf);
    }
    if k0 <= n {
        best = best.max(x_hat - sorted_noise[k0 - 1]);
    }
    best.min(1.0)
}

/// Best-response iteration with the analytic attack mass replaced by the
/// empirical one.
///
/// Each replication draws one noise sample and iterates
/// `x <- theta_hat(x) + sigma (1 - 2r)` from the upper dominance start
/// `2 + sigma`, where `theta_hat` is the empirical fall threshold. The map
/// is monotone and piecewise flat, so iterates settle exactly; a replication
/// that has not settled after `iters` steps is reported as a convergence
/// failure. Returns the mean settled cutoff across replications.
pub fn finite_best_response(
    params: &ModelParams,
    r: f64,
    config: &SimConfig,
    iters: usize,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::domain(
            "policy r must lie in [0,1] for the continuation game",
        ));
    }
    if iters == 0 {
        return Err(Error::domain("iters must be at least 1"));
    }
    let sigma = params.sigma();
    let shift = sigma * (1.0 - 2.0 * r);
    let dist = noise(params);
    let cutoffs = (0..config.n_reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replication_rng(config, rep);
            let mut eps: Vec<f64> = (0..config.n_agents)
                .map(|_| dist.sample(&mut rng))
                .collect();
            eps.sort_by(f64::total_cmp);
            let mut x = 2.0 + sigma;
            let mut gap = f64::INFINITY;
            for _ in 0..iters {
                let next = empirical_fall_threshold(&eps, x) + shift;
                gap = (next - x).abs();
                x = next;
                if gap <= 1e-12 {
                    return Ok(x);
                }
            }
            Err(Error::Convergence {
                iterations: iters,
                gap,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(cutoffs.iter().sum::<f64>() / cutoffs.len() as f64)
}
