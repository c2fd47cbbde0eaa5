//! Comparative statics across the signalling family: the critical noise
//! level, derivatives of ex-post welfare in `r_prime`, pointwise welfare
//! comparisons between two equilibria, and tabulated sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::ThetaGrid;
use crate::model::ModelParams;
use crate::signaling::{max_policy, solve_signaling, PolicyRegion, SignalingEquilibrium};

/// Noise level `(1 - r_lower) / (2 r_lower)` above which a higher `r_prime`
/// helps strong types.
pub fn critical_sigma(params: &ModelParams) -> f64 {
    let rl = params.r_lower();
    (1.0 - rl) / (2.0 * rl)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SigmaRegime {
    /// `sigma <= sigma_star`: raising `r_prime` weakly hurts every type.
    Precise { sigma_star: f64 },
    /// `sigma > sigma_star`: it hurts interveners and helps defenders.
    Noisy { sigma_star: f64 },
}

impl SigmaRegime {
    pub fn of(params: &ModelParams) -> Self {
        let sigma_star = critical_sigma(params);
        if params.sigma() > sigma_star {
            SigmaRegime::Noisy { sigma_star }
        } else {
            SigmaRegime::Precise { sigma_star }
        }
    }

    pub fn sigma_star(&self) -> f64 {
        match *self {
            SigmaRegime::Precise { sigma_star } | SigmaRegime::Noisy { sigma_star } => sigma_star,
        }
    }

    pub fn is_noisy(&self) -> bool {
        matches!(self, SigmaRegime::Noisy { .. })
    }
}

fn check_family(params: &ModelParams, r_prime: f64) -> Result<()> {
    let rl = params.r_lower();
    let r_tilde = max_policy(params);
    if r_prime > rl && r_prime <= r_tilde {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "r_prime must lie in ({rl}, {r_tilde}]"
        )))
    }
}

/// Derivative of `theta_lower(r_prime) = c(r_prime)`, i.e. `r_prime - r_lower`.
pub fn lower_threshold_sensitivity(params: &ModelParams, r_prime: f64) -> Result<f64> {
    check_family(params, r_prime)?;
    Ok(r_prime - params.r_lower())
}

/// Analytic `dU(theta; r_prime) / dr_prime` holding `theta` fixed.
///
/// Zero outside `[theta_lower, theta_no_attack]`, `-(r_prime - r_lower)` for
/// interveners and `-(1/(2 sigma) - r_lower/(1 - r_lower)) (r_prime - r_lower)`
/// in the partial-attack band. Refused at the three kinks.
pub fn welfare_derivative_in_rprime(eq: &SignalingEquilibrium, theta: f64) -> Result<f64> {
    if theta == eq.theta_lower() || theta == eq.theta_upper() || theta == eq.theta_no_attack() {
        return Err(Error::Boundary { theta });
    }
    let params = eq.params();
    let rl = params.r_lower();
    let dlower = eq.r_prime() - rl;
    Ok(match eq.classify_region(theta) {
        PolicyRegion::AbandonRegion | PolicyRegion::NoAttackRegion => 0.0,
        PolicyRegion::InterveneRegion => -dlower,
        PolicyRegion::DefendUnderAttackRegion => {
            -(1.0 / (2.0 * params.sigma()) - rl / (1.0 - rl)) * dlower
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    HigherUnderAggressive,
    LowerUnderAggressive,
    Equal,
}

impl Verdict {
    fn from_diff(diff: f64, tol: f64) -> Self {
        if diff > tol {
            Verdict::HigherUnderAggressive
        } else if diff < -tol {
            Verdict::LowerUnderAggressive
        } else {
            Verdict::Equal
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::HigherUnderAggressive => "higher",
            Verdict::LowerUnderAggressive => "lower",
            Verdict::Equal => "equal",
        }
    }
}

/// Welfare under `r_low` and the more aggressive `r_high`, tabulated on a
/// common grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WelfareComparison {
    pub r_low: f64,
    pub r_high: f64,
    pub tol: f64,
    pub theta_grid: Vec<f64>,
    pub u_low: Vec<f64>,
    pub u_high: Vec<f64>,
    pub region_low: Vec<PolicyRegion>,
    pub region_high: Vec<PolicyRegion>,
    pub verdicts: Vec<Verdict>,
}

impl WelfareComparison {
    pub fn len(&self) -> usize {
        self.theta_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta_grid.is_empty()
    }

    /// `u_high - u_low` per grid point.
    pub fn differences(&self) -> impl Iterator<Item = f64> + '_ {
        self.u_high.iter().zip(&self.u_low).map(|(h, l)| h - l)
    }

    pub fn count(&self, verdict: Verdict) -> usize {
        self.verdicts.iter().filter(|&&v| v == verdict).count()
    }
}

/// Default tolerance on welfare values.
pub const WELFARE_TOL: f64 = 1e-9;

/// Compares welfare under `r_low <= r_high` pointwise on `theta_grid`.
pub fn compare_welfare(
    params: &ModelParams,
    r_low: f64,
    r_high: f64,
    theta_grid: &[f64],
    tol: f64,
) -> Result<WelfareComparison> {
    if !(r_low <= r_high) {
        return Err(Error::domain("r_low must not exceed r_high"));
    }
    if theta_grid.is_empty() {
        return Err(Error::domain("theta grid is empty"));
    }
    if theta_grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::domain("theta grid must be sorted"));
    }
    if !(tol >= 0.0) {
        return Err(Error::domain("tolerance must be non-negative"));
    }
    let low = solve_signaling(params, r_low)?;
    let high = solve_signaling(params, r_high)?;

    let n = theta_grid.len();
    let mut cmp = WelfareComparison {
        r_low,
        r_high,
        tol,
        theta_grid: theta_grid.to_vec(),
        u_low: Vec::with_capacity(n),
        u_high: Vec::with_capacity(n),
        region_low: Vec::with_capacity(n),
        region_high: Vec::with_capacity(n),
        verdicts: Vec::with_capacity(n),
    };
    for &theta in theta_grid {
        let ul = low.ex_post_welfare(theta);
        let uh = high.ex_post_welfare(theta);
        cmp.u_low.push(ul);
        cmp.u_high.push(uh);
        cmp.region_low.push(low.classify_region(theta));
        cmp.region_high.push(high.classify_region(theta));
        cmp.verdicts.push(Verdict::from_diff(uh - ul, tol));
    }
    Ok(cmp)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub r_prime: f64,
    pub theta: f64,
    pub region: PolicyRegion,
    pub attack: f64,
    pub welfare: f64,
}

/// Tabulates region, no-intervention attack and welfare for each `r_prime`
/// (outer) and grid point (inner).
pub fn sweep(params: &ModelParams, r_primes: &[f64], grid: &ThetaGrid) -> Result<Vec<SweepRow>> {
    let equilibria = r_primes
        .iter()
        .map(|&rp| solve_signaling(params, rp))
        .collect::<Result<Vec<_>>>()?;
    let thetas = grid.points();
    let n = thetas.len();
    Ok((0..equilibria.len() * n)
        .into_par_iter()
        .map(|idx| {
            let eq = &equilibria[idx / n];
            let theta = thetas[idx % n];
            SweepRow {
                r_prime: eq.r_prime(),
                theta,
                region: eq.classify_region(theta),
                attack: eq.aggregate_attack_no_intervention(theta),
                welfare: eq.ex_post_welfare(theta),
            }
        })
        .collect())
}
