use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const DEFAULT_SEED: u64 = 0xC0FFEE;
pub const SEED_ENV: &str = "QSLICE_SEED";

#[derive(Debug, Parser)]
#[command(name = "qslice", version, about = "Slice-hyperholomorphic Schur analysis on the quaternionic half-space")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Sampling seed; falls back to QSLICE_SEED, then 0xC0FFEE.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Replaces every per-check threshold.
    #[arg(long, global = true, value_parser = positive_f64)]
    pub tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err("must be a positive finite number".into())
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a single function at a point.
    Eval(EvalArgs),
    /// Kernel identity and closed-form sweeps.
    KernelCheck(KernelCheckArgs),
    /// Build a Blaschke product with prescribed zeros.
    Blaschke(BlaschkeArgs),
    /// Evaluate and verify a state-space realization.
    Realize(RealizeArgs),
    /// Potapov-Ginzburg transform of sampled values.
    Pg(PgArgs),
    /// Sampled negative-squares estimate of a kernel.
    Kappa(KappaArgs),
    /// Hardy-space quadrature suites.
    HardyCheck(HardyArgs),
    /// Run every built-in identity suite.
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Eval(_) => "eval",
            Self::KernelCheck(_) => "kernel-check",
            Self::Blaschke(_) => "blaschke",
            Self::Realize(_) => "realize",
            Self::Pg(_) => "pg",
            Self::Kappa(_) => "kappa",
            Self::HardyCheck(_) => "hardy-check",
            Self::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalModel {
    /// `b_a(p)`; needs --a and --p.
    Blaschke,
    /// `b_[a](p)`; needs --a and --p.
    Sphere,
    /// `k(p, q)`; needs --p and --q.
    Kernel,
    /// Power series from --data at --p.
    Series,
    /// Blaschke product with the zeros in --data at --p.
    Product,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub model: EvalModel,
    /// Quaternion as a JSON array `[w,x,y,z]`.
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub p: String,
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KernelCheckArgs {
    /// Random pairs in each sweep.
    #[arg(long, default_value_t = 10_000)]
    pub pairs: usize,
}

#[derive(Debug, Args)]
pub struct BlaschkeArgs {
    #[arg(long)]
    pub zeros: PathBuf,
    /// Verify zeros, multiplicities and boundary modulus.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RealizeModel {
    Schur,
    Cof,
    Gp,
    Pair,
}

#[derive(Debug, Args)]
pub struct RealizeArgs {
    #[arg(long, value_enum)]
    pub model: RealizeModel,
    #[arg(long)]
    pub data: PathBuf,
    /// JSON array of quaternions.
    #[arg(long)]
    pub eval: Option<PathBuf>,
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct PgArgs {
    #[arg(long)]
    pub data: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KappaKernel {
    /// `k(p, q)`.
    Hardy,
    /// `-k(p, q)`.
    NegHardy,
    /// `K_S` of a Schur realization in --data.
    Schur,
    /// `K_S` of COF data in --data.
    Cof,
    /// `K_Phi` of a backward-shift quadruple in --data.
    Gp,
    /// `K_Phi` of a pair model in --data.
    Pair,
}

#[derive(Debug, Args)]
pub struct KappaArgs {
    #[arg(long, value_enum)]
    pub kernel: KappaKernel,
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 40)]
    pub points: usize,
    /// Add a check that the estimate equals this value.
    #[arg(long)]
    pub expect: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Reproducing,
    Onb,
    Isometry,
    Norms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Simpson,
    GaussLegendre,
}

#[derive(Debug, Args)]
pub struct HardyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Truncation `R` of the boundary line `[-R, R]`.
    #[arg(long, value_parser = positive_f64)]
    pub cutoff: Option<f64>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
}
