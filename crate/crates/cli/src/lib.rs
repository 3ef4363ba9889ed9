//! Library side of the `qslice` binary: argument types, command runners
//! and the JSON report.

pub mod args;
pub mod commands;
pub mod hardy_check;
pub mod input;
pub mod report;
pub mod selftest;

use std::time::Instant;

use args::{Cli, Command, DEFAULT_SEED, SEED_ENV};
use report::{summarize, Checks, Report};

pub use report::{Check, Summary};

/// Exit status for a report whose checks all pass.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable, malformed or invalid input; no report is written.
    #[error("input error: {0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => EXIT_INPUT,
            Self::Internal(_) => EXIT_INTERNAL,
        }
    }
}

/// `--seed`, then `QSLICE_SEED`, then the built-in default.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match env {
        Some(text) => parse_seed(text).ok_or_else(|| CliError::Input(format!("{SEED_ENV}={text:?} is not a seed"))),
        None => Ok(DEFAULT_SEED),
    }
}

fn parse_seed(text: &str) -> Option<u64> {
    let t = text.trim();
    match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16).ok(),
        None => t.parse().ok(),
    }
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let env = std::env::var(SEED_ENV).ok();
    let seed = resolve_seed(cli.global.seed, env.as_deref())?;
    let checks = Checks::new(cli.global.tol);
    let start = Instant::now();
    let (checks, values) = match &cli.command {
        Command::Eval(a) => commands::eval(a, checks),
        Command::KernelCheck(a) => commands::kernel_check(a, seed, checks),
        Command::Blaschke(a) => commands::blaschke(a, seed, checks),
        Command::Realize(a) => commands::realize(a, seed, checks),
        Command::Pg(a) => commands::pg(a, checks),
        Command::Kappa(a) => commands::kappa(a, seed, checks),
        Command::HardyCheck(a) => hardy_check::run(a, seed, checks),
        Command::Selftest => selftest::run(seed, checks),
    }?;
    let checks = checks.into_vec();
    Ok(Report {
        command: cli.command.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        summary: summarize(&checks),
        checks,
        values,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
