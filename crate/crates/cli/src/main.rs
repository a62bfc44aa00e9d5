//! `gfix`: axiom, series and contraction checks, common fixed point solves
//! and oracle sweeps from the command line.
//!
//! Exit status: 0 pass, 1 a check failed, 2 bad input or configuration,
//! 3 enumeration budget exceeded.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gfix_core::contractions::{AbbasThreshold, Mode};

#[derive(Parser)]
#[command(
    name = "gfix",
    version,
    about = "Common fixed points of map families on G-metric spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Audit G1-G5 and symmetry of a space.
    CheckAxioms {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        space: String,
        /// Quadruples to examine; finite carriers within budget are checked exhaustively.
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    /// Check a sequence as an α-series or as λ-sequence distances.
    CheckSeries {
        #[command(flatten)]
        common: Common,
        /// Comma-separated values or a one-value-per-line file.
        #[arg(long)]
        sequence: String,
        #[arg(long, value_enum, default_value_t = Form::Alpha)]
        form: Form,
        /// Fixed λ; the grid is searched when absent.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 1)]
        n_lambda: usize,
    },
    /// Sample the contraction condition for a family.
    CheckCondition {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        problem: ProblemArgs,
        /// Case budget; exhaustive when every case fits.
        #[arg(long, default_value_t = 20_000)]
        budget: usize,
    },
    /// Verify the hypotheses and iterate to a common fixed point.
    Solve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Solve from several starts and compare the end points.
    ProbeUniqueness {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Number of sampled starts on continuous carriers; finite carriers use every point.
        #[arg(long, default_value_t = 8)]
        starts: usize,
    },
    /// Exhaustive oracle sweep over small finite instances.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        carrier_size: usize,
        #[arg(long, default_value_t = 2)]
        family_size: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5, 1.0, 2.0])]
        g_grid: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.05, 0.1, 0.3])]
        coeff_grid: Vec<f64>,
        #[arg(long, value_enum, default_value_t = ModeArg::Abbas)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = ThresholdArg::Half)]
        threshold: ThresholdArg,
        /// Candidate-table cap.
        #[arg(long, default_value_t = gfix_core::oracle::ENUMERATION_CAP)]
        budget: u128,
        #[arg(long, hide = true)]
        inject_rate_bug: bool,
    },
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for reports.
    #[arg(long, default_value = "gfix-out")]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct ProblemArgs {
    #[arg(long)]
    space: String,
    #[arg(long)]
    family: String,
    #[arg(long)]
    schedule: String,
    /// `identity`, `scale:c`, `root:q` or `power:e`, optionally followed by `;s=degree`.
    #[arg(long)]
    phi: Option<String>,
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[arg(long, default_value_t = 1)]
    p: usize,
    #[arg(long, value_enum, default_value_t = ThresholdArg::Half)]
    threshold: ThresholdArg,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Fixed λ for the rate series; the grid is searched when absent.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    n_lambda: Option<usize>,
    /// Case budget for the condition check.
    #[arg(long, default_value_t = 20_000)]
    budget: usize,
    /// Step size below which the orbit counts as settled.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = gfix_core::tolerances::TAU_FIX)]
    tau_fix: f64,
    #[arg(long, default_value_t = 10_000)]
    max_steps: usize,
    /// Starting point: a real on intervals, an index on finite carriers.
    #[arg(long)]
    x0: Option<f64>,
    /// Iterate the composed family instead of applying each map p times.
    #[arg(long)]
    via_power_family: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    Alpha,
    Lambda,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Vetro,
    Abbas,
    AbbasPhi,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Vetro => Mode::Vetro,
            ModeArg::Abbas => Mode::Abbas,
            ModeArg::AbbasPhi => Mode::AbbasPhi,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ThresholdArg {
    Half,
    One,
}

impl From<ThresholdArg> for AbbasThreshold {
    fn from(t: ThresholdArg) -> AbbasThreshold {
        match t {
            ThresholdArg::Half => AbbasThreshold::Half,
            ThresholdArg::One => AbbasThreshold::One,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = commands::run(cli.command);
    ExitCode::from(status.code())
}
