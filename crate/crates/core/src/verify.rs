//! Invariant suite over a grid of `(sigma, r_lower)` pairs.
//!
//! Every check yields one [`CheckResult`] per grid point carrying the worst
//! error observed and the tolerance it was held to. Failures are data: the
//! suite never returns an error.

use serde::Serialize;

use crate::continuation::{
    attack_mass, closed_form_thresholds, solve_iterated_dominance, success_prob_given_signal,
    SolverConfig,
};
use crate::grid::ThetaGrid;
use crate::model::ModelParams;
use crate::signaling::{max_policy, solve_signaling, PolicyRegion, SignalingEquilibrium};
use crate::statics::{critical_sigma, welfare_derivative_in_rprime, WELFARE_TOL};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyGrid {
    pub sigmas: Vec<f64>,
    pub r_lowers: Vec<f64>,
    /// Number of policy levels in `[0, 1]` for continuation checks.
    pub r_points: usize,
    /// Number of `r_prime` values in `(r_lower, r_tilde]`.
    pub rprime_points: usize,
}

impl Default for VerifyGrid {
    fn default() -> Self {
        let sigmas = ThetaGrid::linspace(0.1, 5.0, 20)
            .expect("static grid")
            .points()
            .to_vec();
        Self {
            sigmas,
            r_lowers: vec![0.2, 0.5],
            r_points: 20,
            rprime_points: 25,
        }
    }
}

/// Negative-control knobs. All zero in normal use.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct VerifyOptions {
    /// Added to every solved `theta_upper` before checking.
    pub theta_upper_offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub sigma: f64,
    pub r_lower: f64,
    pub samples: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn len(&self) -> usize {
        self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Tally {
    samples: usize,
    max_error: f64,
}

impl Tally {
    fn new() -> Self {
        Self {
            samples: 0,
            max_error: 0.0,
        }
    }

    fn record(&mut self, err: f64) {
        self.samples += 1;
        // NaN must fail the check
        if err.is_nan() || err > self.max_error {
            self.max_error = if err.is_nan() { f64::INFINITY } else { err };
        }
    }

    fn violation(&mut self, bad: bool) {
        self.record(if bad { 1.0 } else { 0.0 });
    }
}

struct PointChecks<'a> {
    params: ModelParams,
    out: &'a mut Vec<CheckResult>,
}

impl PointChecks<'_> {
    fn push(&mut self, name: &'static str, tally: Tally, tolerance: f64) {
        self.out.push(CheckResult {
            name,
            sigma: self.params.sigma(),
            r_lower: self.params.r_lower(),
            samples: tally.samples,
            max_error: tally.max_error,
            tolerance,
            passed: tally.max_error <= tolerance,
        });
    }
}

pub fn run_verify(grid: &VerifyGrid, options: &VerifyOptions) -> VerifyReport {
    let mut report = VerifyReport::default();
    for &sigma in &grid.sigmas {
        for &r_lower in &grid.r_lowers {
            let Ok(params) = ModelParams::new(sigma, r_lower) else {
                report.checks.push(CheckResult {
                    name: "params.valid",
                    sigma,
                    r_lower,
                    samples: 1,
                    max_error: f64::INFINITY,
                    tolerance: 0.0,
                    passed: false,
                });
                continue;
            };
            let mut pc = PointChecks {
                params,
                out: &mut report.checks,
            };
            continuation_checks(&mut pc, grid.r_points);
            signaling_checks(&mut pc, grid.rprime_points, options);
        }
    }
    report
}

fn unit_policies(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

fn continuation_checks(pc: &mut PointChecks<'_>, r_points: usize) {
    let params = pc.params;
    let sigma = params.sigma();
    let cfg = SolverConfig::default();
    let mut closed = Tally::new();
    let mut fixed = Tally::new();
    let mut indiff = Tally::new();
    let mut oracle = Tally::new();
    let mut monotone = Tally::new();
    let mut prev: Option<(f64, f64)> = None;

    for r in unit_policies(r_points) {
        let Ok(eq) = closed_form_thresholds(&params, r) else {
            closed.record(f64::INFINITY);
            continue;
        };
        closed.record(
            (eq.theta_cutoff - (1.0 - r))
                .abs()
                .max((eq.x_cutoff - ((1.0 + 2.0 * sigma) * (1.0 - r) - sigma)).abs()),
        );
        fixed.record((attack_mass(&params, eq.x_cutoff, eq.theta_cutoff) - eq.theta_cutoff).abs());
        indiff.record((success_prob_given_signal(&params, eq.theta_cutoff, eq.x_cutoff) - r).abs());
        match solve_iterated_dominance(&params, r, &cfg) {
            Ok((it, _)) => oracle.record(
                (it.x_cutoff - eq.x_cutoff)
                    .abs()
                    .max((it.theta_cutoff - eq.theta_cutoff).abs()),
            ),
            Err(_) => oracle.record(f64::INFINITY),
        }
        if let Some((px, pt)) = prev {
            monotone.violation(!(eq.x_cutoff < px && eq.theta_cutoff < pt));
        }
        prev = Some((eq.x_cutoff, eq.theta_cutoff));
    }

    pc.push("continuation.closed_form", closed, 1e-12);
    pc.push("continuation.fixed_point", fixed, 1e-12);
    pc.push("continuation.indifference", indiff, 1e-12);
    pc.push("continuation.dominance_oracle", oracle, cfg.tol().max(1e-9));
    pc.push("continuation.monotone_in_r", monotone, 0.0);
}

fn family(params: &ModelParams, n: usize) -> Vec<f64> {
    let rl = params.r_lower();
    let r_tilde = max_policy(params);
    (1..=n)
        .map(|k| {
            if k == n {
                r_tilde
            } else {
                rl + (r_tilde - rl) * k as f64 / n as f64
            }
        })
        .collect()
}

fn theta_probe(params: &ModelParams) -> Vec<f64> {
    let hi = 1.0 + 4.0 * params.sigma() + 1.0;
    let n = 400;
    (0..=n)
        .map(|i| -1.0 + (hi + 1.0) * i as f64 / n as f64)
        .collect()
}

/// `base` plus every breakpoint of the given equilibria and the midpoints
/// between consecutive breakpoints. Welfare is piecewise linear, so this
/// samples every linear piece however narrow.
fn with_breakpoints(base: &[f64], eqs: &[&SignalingEquilibrium]) -> Vec<f64> {
    let mut kinks: Vec<f64> = eqs
        .iter()
        .flat_map(|e| [e.theta_lower(), e.theta_upper(), e.theta_no_attack()])
        .collect();
    kinks.sort_by(f64::total_cmp);
    let mut pts = base.to_vec();
    pts.extend(&kinks);
    pts.extend(kinks.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn signaling_checks(pc: &mut PointChecks<'_>, rprime_points: usize, options: &VerifyOptions) {
    let params = pc.params;
    let sigma = params.sigma();
    let rl = params.r_lower();
    let solve = |rp: f64| {
        solve_signaling(&params, rp).map(|e| e.with_theta_upper_offset(options.theta_upper_offset))
    };

    let mut lower_cost = Tally::new();
    let mut indiff = Tally::new();
    let mut no_attack = Tally::new();
    let mut continuity = Tally::new();
    let mut defend = Tally::new();
    let mut cutoff = Tally::new();
    let mut ordering = Tally::new();
    let mut fd = Tally::new();
    let mut signs = Tally::new();

    let thetas = theta_probe(&params);
    let rps = family(&params, rprime_points);
    let mut solved: Vec<SignalingEquilibrium> = Vec::with_capacity(rps.len());

    for &rp in &rps {
        let Ok(e) = solve(rp) else {
            lower_cost.record(f64::INFINITY);
            continue;
        };
        let (tl, tu, tn) = (e.theta_lower(), e.theta_upper(), e.theta_no_attack());
        lower_cost.record((tl - params.cost(rp).unwrap_or(f64::NAN)).abs());
        indiff.record((e.aggregate_attack_no_intervention(tu) - tl).abs());
        no_attack.record((tn - e.no_attack_bound()).abs());
        for k in [tl, tu, tn] {
            continuity.record((e.ex_post_welfare(k) - e.ex_post_welfare(k.next_down())).abs());
        }
        ordering.violation(!(tl <= tu + 1e-12 && tu <= tn + 1e-12 && tl <= 1.0 - rl + 1e-12));
        let probe = with_breakpoints(&thetas, &[&e]);
        for &theta in &probe {
            cutoff.record(
                (e.aggregate_attack_no_intervention(theta)
                    - attack_mass(&params, e.x_prime(), theta))
                .abs(),
            );
            if e.classify_region(theta) == PolicyRegion::DefendUnderAttackRegion {
                defend.record(
                    (e.ex_post_welfare(theta)
                        - (theta - e.aggregate_attack_no_intervention(theta)))
                    .abs(),
                );
            }
        }
        derivative_checks(&params, &e, &probe, &solve, &mut fd, &mut signs);
        solved.push(e);
    }

    pc.push("signaling.lower_is_cost", lower_cost, 0.0);
    pc.push("signaling.indifference_at_top", indiff, 1e-12);
    pc.push("signaling.no_attack_identity", no_attack, 1e-12);
    pc.push("signaling.welfare_continuity", continuity, 1e-12);
    pc.push("signaling.defend_branch", defend, 1e-12);
    pc.push("signaling.attack_cutoff", cutoff, 1e-12);
    pc.push("signaling.ordering", ordering, 0.0);
    pc.push("statics.derivative_fd", fd, 1e-6);
    pc.push("statics.sign_law", signs, 0.0);

    // pointwise ranking of neighbouring equilibria
    let noisy = sigma > critical_sigma(&params);
    let mut ranking = Tally::new();
    for pair in solved.windows(2) {
        let (low, high) = (&pair[0], &pair[1]);
        let diffs: Vec<f64> = with_breakpoints(&thetas, &[low, high])
            .iter()
            .map(|&t| high.ex_post_welfare(t) - low.ex_post_welfare(t))
            .collect();
        if noisy {
            let both =
                diffs.iter().any(|&d| d > WELFARE_TOL) && diffs.iter().any(|&d| d < -WELFARE_TOL);
            ranking.violation(!both);
        } else {
            let worst = diffs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            ranking.record(worst.max(0.0));
        }
    }
    pc.push("statics.welfare_ranking", ranking, WELFARE_TOL);
}

fn derivative_checks(
    params: &ModelParams,
    e: &SignalingEquilibrium,
    thetas: &[f64],
    solve: &dyn Fn(f64) -> crate::Result<SignalingEquilibrium>,
    fd: &mut Tally,
    signs: &mut Tally,
) {
    const H: f64 = 1e-5;
    let rp = e.r_prime();
    let sigma_star = critical_sigma(params);
    let noisy = params.sigma() > sigma_star;
    let at_critical = (params.sigma() - sigma_star).abs() <= 1e-12;
    let (Ok(lo), Ok(hi)) = (solve(rp - H), solve(rp + H)) else {
        // rp + H leaves the family at r_tilde; skip the difference there
        return sign_checks(e, thetas, noisy, at_critical, signs);
    };
    let kinks = |q: &SignalingEquilibrium| [q.theta_lower(), q.theta_upper(), q.theta_no_attack()];
    let guards: Vec<(f64, f64)> = kinks(e)
        .iter()
        .zip(kinks(&lo).iter().zip(kinks(&hi).iter()))
        .map(|(&k, (&a, &b))| (k, 10.0 * (b - a).abs() + 1e-9))
        .collect();
    for &theta in thetas {
        if guards.iter().any(|&(k, g)| (theta - k).abs() < g) {
            continue;
        }
        let Ok(an) = welfare_derivative_in_rprime(e, theta) else {
            continue;
        };
        let num = (hi.ex_post_welfare(theta) - lo.ex_post_welfare(theta)) / (2.0 * H);
        fd.record((num - an).abs());
    }
    sign_checks(e, thetas, noisy, at_critical, signs);
}

fn sign_checks(
    e: &SignalingEquilibrium,
    thetas: &[f64],
    noisy: bool,
    at_critical: bool,
    signs: &mut Tally,
) {
    for &theta in thetas {
        let Ok(d) = welfare_derivative_in_rprime(e, theta) else {
            continue;
        };
        let bad = match e.classify_region(theta) {
            PolicyRegion::AbandonRegion | PolicyRegion::NoAttackRegion => d != 0.0,
            PolicyRegion::InterveneRegion => !(d < 0.0),
            PolicyRegion::DefendUnderAttackRegion => {
                if at_critical {
                    d.abs() > 1e-12
                } else if noisy {
                    !(d > 0.0)
                } else {
                    !(d < 0.0)
                }
            }
        };
        signs.violation(bad);
    }
}
