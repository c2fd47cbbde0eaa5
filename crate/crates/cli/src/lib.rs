//! Command-line front end for `regime-lab-core`.
//!
//! [`run`] parses argv, dispatches one subcommand and writes a CSV or JSON
//! table to stdout or `--out`. Exit status is 0 on success, 1 when
//! `verify` finds failing checks and 2 on usage or domain errors.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use args::{Cli, Command};
use commands::Report;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "REGIME_LAB_THREADS";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(regime_lab_core::Error),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<regime_lab_core::Error> for CliError {
    fn from(e: regime_lab_core::Error) -> Self {
        CliError::Domain(e)
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize =
            v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
                CliError::Usage(format!("{THREADS_ENV} must be a positive integer"))
            })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Io(format!("cannot start worker threads: {e}")))
}

fn dispatch(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Continuation(a) => commands::continuation(a),
        Command::Signaling(a) => commands::signaling(a),
        Command::WelfareSweep(a) => commands::welfare_sweep(a),
        Command::Compare(a) => commands::compare(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Verify(a) => commands::verify(a),
    }
}

fn output_args(command: &Command) -> &args::OutputArgs {
    match command {
        Command::Continuation(a) => &a.output,
        Command::Signaling(a) => &a.output,
        Command::WelfareSweep(a) => &a.output,
        Command::Compare(a) => &a.output,
        Command::Simulate(a) => &a.output,
        Command::Verify(a) => &a.output,
    }
}

fn emit(report: &Report, opts: &args::OutputArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("write failed: {e}"));
    match &opts.out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
            let mut w = std::io::BufWriter::new(file);
            report.table.write(opts.format, &mut w).map_err(io)?;
            w.flush().map_err(io)
        }
        None => report.table.write(opts.format, out).map_err(io),
    }
}

fn execute(argv: Vec<OsString>, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let argv = config::expand(argv)?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            write!(out, "{e}").map_err(|e| CliError::Io(e.to_string()))?;
            return Ok(0);
        }
        Err(e) => {
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            return Err(CliError::Usage(
                first.trim_start_matches("error: ").to_owned(),
            ));
        }
    };
    let pool = thread_pool()?;
    let report = pool.install(|| dispatch(&cli.command))?;
    emit(&report, output_args(&cli.command), out)?;
    for note in &report.notes {
        let _ = writeln!(err, "{note}");
    }
    Ok(report.status)
}

/// Runs the CLI with explicit streams and returns the exit status.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    match execute(argv, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

/// Runs the CLI against the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = run_with(argv, &mut out, &mut err);
    let _ = out.flush();
    code
}
