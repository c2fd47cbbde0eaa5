use regime_lab_core::{
    attack_mass, closed_form_thresholds, compare_welfare, continuation_welfare, critical_sigma,
    run_verify, simulate_continuation, simulate_signaling, solve_iterated_dominance,
    solve_signaling, sweep, ModelParams, SigmaRegime, SimConfig, SolverConfig, VerifyGrid,
    VerifyOptions,
};

use crate::args::{
    CompareArgs, ContinuationArgs, Mode, ModelArgs, SignalingArgs, SimulateArgs, Solver, SweepArgs,
    VerifyArgs,
};
use crate::output::{format_num, Cell, Table};
use crate::CliError;

/// A finished command: the table to emit, the exit status and any lines for
/// the error stream.
#[derive(Debug)]
pub struct Report {
    pub table: Table,
    pub status: i32,
    pub notes: Vec<String>,
}

impl From<Table> for Report {
    fn from(table: Table) -> Self {
        Report {
            table,
            status: 0,
            notes: Vec::new(),
        }
    }
}

fn params(m: &ModelArgs) -> Result<ModelParams, CliError> {
    Ok(ModelParams::new(m.sigma, m.rbar)?)
}

pub const CONTINUATION_COLUMNS: [&str; 4] = ["sigma", "r", "x_cutoff", "theta_cutoff"];
pub const SWEEP_COLUMNS: [&str; 7] = [
    "sigma", "rbar", "rprime", "theta", "region", "attack", "welfare",
];

pub fn continuation(a: &ContinuationArgs) -> Result<Report, CliError> {
    let p = params(&a.model)?;
    if a.r.0.is_empty() {
        return Err(CliError::Usage("--r needs at least one value".into()));
    }
    let solver_cfg = SolverConfig::new(a.tol, a.max_iter)?;
    let grid = a.theta.map(|t| t.grid()).transpose()?;

    let mut columns = CONTINUATION_COLUMNS.to_vec();
    if grid.is_some() {
        columns.extend(["rbar", "theta", "attack", "welfare"]);
    }
    let mut table = Table::new(&columns)
        .json_single(grid.is_none())
        .json_field("solver", a.solver.as_str());

    for &r in &a.r.0 {
        let eq = match a.solver {
            Solver::ClosedForm => closed_form_thresholds(&p, r)?,
            Solver::Iterated => solve_iterated_dominance(&p, r, &solver_cfg)?.0,
        };
        let base: Vec<Cell> = vec![
            p.sigma().into(),
            r.into(),
            eq.x_cutoff.into(),
            eq.theta_cutoff.into(),
        ];
        match &grid {
            None => table.push(base),
            Some(g) => {
                for &theta in g.points() {
                    let mut row = base.clone();
                    row.extend([
                        p.r_lower().into(),
                        theta.into(),
                        attack_mass(&p, eq.x_cutoff, theta).into(),
                        continuation_welfare(&p, r, theta)?.into(),
                    ]);
                    table.push(row);
                }
            }
        }
    }
    Ok(table.into())
}

pub fn signaling(a: &SignalingArgs) -> Result<Report, CliError> {
    let p = params(&a.model)?;
    if a.rprime.0.is_empty() {
        return Err(CliError::Usage("--rprime needs at least one value".into()));
    }
    let regime = SigmaRegime::of(&p);
    let mut table = Table::new(&[
        "sigma",
        "rbar",
        "rprime",
        "r_tilde",
        "theta_lower",
        "theta_upper",
        "x_prime",
        "theta_no_attack",
        "full_attack_bound",
        "sigma_star",
        "noise_regime",
    ])
    .json_single(true);
    for &rp in &a.rprime.0 {
        let e = solve_signaling(&p, rp)?;
        table.push(vec![
            p.sigma().into(),
            p.r_lower().into(),
            rp.into(),
            e.r_tilde().into(),
            e.theta_lower().into(),
            e.theta_upper().into(),
            e.x_prime().into(),
            e.theta_no_attack().into(),
            e.full_attack_bound().into(),
            critical_sigma(&p).into(),
            (if regime.is_noisy() {
                "noisy"
            } else {
                "precise"
            })
            .into(),
        ]);
    }
    Ok(table.into())
}

pub fn welfare_sweep(a: &SweepArgs) -> Result<Report, CliError> {
    let p = params(&a.model)?;
    if a.rprime.0.is_empty() {
        return Err(CliError::Usage("--rprime needs at least one value".into()));
    }
    let grid = a.theta.grid()?;
    let rows = sweep(&p, &a.rprime.0, &grid)?;
    let mut table = Table::new(&SWEEP_COLUMNS);
    for row in rows {
        table.push(vec![
            p.sigma().into(),
            p.r_lower().into(),
            row.r_prime.into(),
            row.theta.into(),
            row.region.as_str().into(),
            row.attack.into(),
            row.welfare.into(),
        ]);
    }
    Ok(table.into())
}

pub fn compare(a: &CompareArgs) -> Result<Report, CliError> {
    let p = params(&a.model)?;
    let grid = a.theta.grid()?;
    let c = compare_welfare(&p, a.rprime, a.rhi, grid.points(), a.tol)?;
    let low = solve_signaling(&p, a.rprime)?;
    let mut columns = SWEEP_COLUMNS.to_vec();
    columns.extend(["rprime_hi", "welfare_hi", "verdict"]);
    let mut table = Table::new(&columns);
    for i in 0..c.len() {
        let theta = c.theta_grid[i];
        table.push(vec![
            p.sigma().into(),
            p.r_lower().into(),
            a.rprime.into(),
            theta.into(),
            c.region_low[i].as_str().into(),
            low.aggregate_attack_no_intervention(theta).into(),
            c.u_low[i].into(),
            a.rhi.into(),
            c.u_high[i].into(),
            c.verdicts[i].as_str().into(),
        ]);
    }
    Ok(table.into())
}

pub const SIMULATE_COLUMNS: [&str; 13] = [
    "sigma",
    "rbar",
    "mode",
    "policy",
    "theta",
    "x_cutoff",
    "n_agents",
    "n_reps",
    "seed",
    "alpha_mean",
    "alpha_hw",
    "fall_freq",
    "welfare_mean",
];

pub fn simulate(a: &SimulateArgs) -> Result<Report, CliError> {
    let p = params(&a.model)?;
    let grid = a.theta.grid()?;
    let cfg = SimConfig::new(a.n_agents, a.n_reps, a.seed)?;
    let mut table = Table::new(&SIMULATE_COLUMNS);
    let mut push = |policy: f64, theta: f64, x_cutoff: f64, o: regime_lab_core::SimOutcome| {
        table.push(vec![
            p.sigma().into(),
            p.r_lower().into(),
            a.mode.as_str().into(),
            policy.into(),
            theta.into(),
            x_cutoff.into(),
            a.n_agents.into(),
            a.n_reps.into(),
            a.seed.into(),
            o.alpha_mean.into(),
            o.alpha_halfwidth.into(),
            o.fall_frequency.into(),
            o.welfare_mean.into(),
        ]);
    };
    match a.mode {
        Mode::Continuation => {
            if a.rprime.is_some() {
                return Err(CliError::Usage(
                    "--rprime applies to --mode signaling".into(),
                ));
            }
            let r =
                a.r.ok_or_else(|| CliError::Usage("--mode continuation requires --r".into()))?;
            let x_cutoff = match a.x_cutoff {
                Some(x) => x,
                None => closed_form_thresholds(&p, r)?.x_cutoff,
            };
            for &theta in grid.points() {
                push(
                    r,
                    theta,
                    x_cutoff,
                    simulate_continuation(&p, r, theta, x_cutoff, &cfg)?,
                );
            }
        }
        Mode::Signaling => {
            if a.r.is_some() || a.x_cutoff.is_some() {
                return Err(CliError::Usage(
                    "--r and --x-cutoff apply to --mode continuation".into(),
                ));
            }
            let rp = a
                .rprime
                .ok_or_else(|| CliError::Usage("--mode signaling requires --rprime".into()))?;
            let e = solve_signaling(&p, rp)?;
            for &theta in grid.points() {
                let o = simulate_signaling(&e, theta, &cfg)?;
                push(e.policy_strategy(theta), theta, e.x_prime(), o);
            }
        }
    }
    Ok(table.into())
}

pub fn verify(a: &VerifyArgs) -> Result<Report, CliError> {
    let mut grid = VerifyGrid::default();
    if let Some(s) = &a.sigmas {
        grid.sigmas = s.0.clone();
    }
    if let Some(r) = &a.rbars {
        grid.r_lowers = r.0.clone();
    }
    grid.r_points = a.r_points;
    grid.rprime_points = a.rprime_points;
    let options = VerifyOptions {
        theta_upper_offset: a.perturb_theta_upper,
    };
    let report = run_verify(&grid, &options);
    if report.is_empty() {
        return Err(CliError::Usage("0 checks".into()));
    }

    let mut table = Table::new(&[
        "check",
        "sigma",
        "rbar",
        "samples",
        "max_error",
        "tolerance",
        "status",
    ]);
    for c in &report.checks {
        table.push(vec![
            c.name.into(),
            c.sigma.into(),
            c.r_lower.into(),
            c.samples.into(),
            c.max_error.into(),
            c.tolerance.into(),
            (if c.passed { "pass" } else { "fail" }).into(),
        ]);
    }
    let mut notes: Vec<String> = report
        .failures()
        .map(|c| {
            format!(
                "FAILED {} sigma={} rbar={} max_error={} tolerance={}",
                c.name,
                format_num(c.sigma),
                format_num(c.r_lower),
                format_num(c.max_error),
                format_num(c.tolerance)
            )
        })
        .collect();
    let failed = notes.len();
    notes.push(format!("{} checks, {} failed", report.len(), failed));
    Ok(Report {
        table,
        status: if failed == 0 { 0 } else { 1 },
        notes,
    })
}
