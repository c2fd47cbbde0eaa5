use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use regime_lab_core::ThetaGrid;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "regime-lab",
    version,
    about = "Equilibrium laboratory for a regime-change signalling game"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Flat `key=value` file; keys are long flag names. Flags on the
    /// command line take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Thresholds of the continuation game at fixed policy levels.
    #[command(args_override_self = true)]
    Continuation(ContinuationArgs),
    /// Thresholds of the active-policy equilibrium for each intervention level.
    #[command(args_override_self = true)]
    Signaling(SignalingArgs),
    /// Region, attack and welfare over a grid of fundamentals.
    #[command(args_override_self = true)]
    WelfareSweep(SweepArgs),
    /// Welfare under a moderate and an aggressive intervention level.
    #[command(args_override_self = true)]
    Compare(CompareArgs),
    /// Finite-agent Monte Carlo.
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
    /// Run the invariant suite over a parameter grid.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Continuation(_) => "continuation",
            Command::Signaling(_) => "signaling",
            Command::WelfareSweep(_) => "welfare-sweep",
            Command::Compare(_) => "compare",
            Command::Simulate(_) => "simulate",
            Command::Verify(_) => "verify",
        }
    }
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Half-width of the uniform signal noise.
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: f64,
    /// Baseline policy level.
    #[arg(long, default_value_t = 0.2, allow_hyphen_values = true)]
    pub rbar: f64,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    ClosedForm,
    Iterated,
}

impl Solver {
    pub fn as_str(self) -> &'static str {
        match self {
            Solver::ClosedForm => "closed-form",
            Solver::Iterated => "iterated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Continuation,
    Signaling,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Continuation => "continuation",
            Mode::Signaling => "signaling",
        }
    }
}

#[derive(Debug, Args)]
pub struct ContinuationArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Policy level, or a comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    pub r: NumList,
    #[arg(long, value_enum, default_value_t = Solver::ClosedForm)]
    pub solver: Solver,
    /// Stopping gap for the iterated solver.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Also tabulate attack and welfare over `lo:hi:step`.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<ThetaSpec>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SignalingArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Intervention level, or a comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    pub rprime: NumList,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Intervention level, or a comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    pub rprime: NumList,
    /// Fundamentals as `lo:hi:step` or a single value.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: ThetaSpec,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Moderate intervention level.
    #[arg(long, allow_hyphen_values = true)]
    pub rprime: f64,
    /// Aggressive intervention level.
    #[arg(long, allow_hyphen_values = true)]
    pub rhi: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: ThetaSpec,
    /// Welfare differences within this band count as equal.
    #[arg(long, default_value_t = regime_lab_core::WELFARE_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value_t = Mode::Continuation)]
    pub mode: Mode,
    /// Public policy level (continuation mode).
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    /// Intervention level (signaling mode).
    #[arg(long, allow_hyphen_values = true)]
    pub rprime: Option<f64>,
    /// Agents' signal cutoff; defaults to the equilibrium cutoff.
    #[arg(long, allow_hyphen_values = true)]
    pub x_cutoff: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: ThetaSpec,
    #[arg(long, default_value_t = 100_000)]
    pub n_agents: usize,
    #[arg(long, default_value_t = 20)]
    pub n_reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Comma-separated noise levels; defaults to 20 points on [0.1, 5].
    #[arg(long, allow_hyphen_values = true)]
    pub sigmas: Option<NumList>,
    /// Comma-separated baseline policies; defaults to 0.2,0.5.
    #[arg(long, allow_hyphen_values = true)]
    pub rbars: Option<NumList>,
    #[arg(long, default_value_t = 20)]
    pub r_points: usize,
    #[arg(long, default_value_t = 25)]
    pub rprime_points: usize,
    #[arg(long, hide = true, default_value_t = 0.0, allow_hyphen_values = true)]
    pub perturb_theta_upper: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Comma-separated numbers. The empty string is the empty list.
#[derive(Debug, Clone, PartialEq)]
pub struct NumList(pub Vec<f64>);

impl FromStr for NumList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().is_empty() {
            return Ok(NumList(Vec::new()));
        }
        s.split(',')
            .map(|p| parse_num(p.trim()))
            .collect::<Result<_, _>>()
            .map(NumList)
    }
}

/// `lo:hi:step` or a single value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaSpec {
    Range { lo: f64, hi: f64, step: f64 },
    Point(f64),
}

impl FromStr for ThetaSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [x] => parse_num(x).map(ThetaSpec::Point),
            [lo, hi, step] => Ok(ThetaSpec::Range {
                lo: parse_num(lo)?,
                hi: parse_num(hi)?,
                step: parse_num(step)?,
            }),
            _ => Err(format!("expected lo:hi:step, got '{s}'")),
        }
    }
}

impl ThetaSpec {
    pub fn grid(self) -> regime_lab_core::Result<ThetaGrid> {
        match self {
            ThetaSpec::Range { lo, hi, step } => ThetaGrid::stepped(lo, hi, step),
            ThetaSpec::Point(x) => ThetaGrid::from_points(vec![x]),
        }
    }
}

fn parse_num(s: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| format!("invalid number '{s}'"))
}
