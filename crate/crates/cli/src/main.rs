//! `anticonc`: exact distributions, bounds, poset widths, Monte Carlo estimates
//! and sweeps for sums `w_π · v` over random permutations.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use anticonc_core::{Error, DEFAULT_PERM_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Line-oriented `key=value`.
    Structured,
    Csv,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "anticonc", version, about = "Anti-concentration of random-permutation sums")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "structured", global = true)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Exact law of w_π · v: full table, point mass, interval mass or Q(S, t).
    Exact(ExactArgs),
    /// Seeded Monte Carlo estimates of the same quantities.
    Mc(McArgs),
    /// Evaluate a bound and report its preconditions.
    Bounds(BoundsArgs),
    /// Width of the dominance poset on k-subsets of {1..n}.
    Width(WidthArgs),
    /// Run a sweep from a TOML config.
    Sweep(SweepArgs),
    /// Search for instances with large point mass or Q(S, t).
    Search(SearchArgs),
}

/// Vectors are comma-separated rationals (`p/q` or integers) or `@path` with one value per line.
#[derive(Debug, Clone, Args)]
pub struct InstanceArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub w: String,
    #[arg(long, allow_hyphen_values = true)]
    pub v: String,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct Query {
    /// Closed interval `lo:hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub interval: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    /// Concentration function at length t.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// Full distribution table (exact only).
    #[arg(long)]
    pub full: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub query: Query,
    #[arg(long, default_value_t = DEFAULT_PERM_CAP)]
    pub cap: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ThreadArgs {
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "ANTICONC_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub query: Query,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub threads: ThreadArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    /// main | sigma | repetition | pawlowski | lemma-with | lemma-without | soze
    #[arg(long)]
    pub statement: String,
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub v: Option<String>,
    /// Interval length |I|.
    #[arg(long = "len-I", visible_alias = "len-i", default_value = "0")]
    pub len_i: String,
    #[arg(long)]
    pub i1: Option<usize>,
    #[arg(long)]
    pub i2: Option<usize>,
    /// Search all valid (i1, i2) for the smallest bound.
    #[arg(long)]
    pub optimize: bool,
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Comma-separated levels for the decay statement.
    #[arg(long = "L", allow_hyphen_values = true, default_value = "0,1,2")]
    pub levels: String,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_PERM_CAP)]
    pub cap: usize,
    #[command(flatten)]
    pub threads: ThreadArgs,
}

#[derive(Debug, Clone, Args)]
pub struct WidthArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Also run the matching-based width oracle.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value_t = anticonc_core::poset::DEFAULT_ORACLE_CAP)]
    pub oracle_cap: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Write the CSV here (overrides the config).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write the summary here (overrides the config).
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[command(flatten)]
    pub threads: ThreadArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveKind {
    PointMass,
    Concentration,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub coord_bound: i64,
    #[arg(long, value_enum, default_value = "point-mass")]
    pub objective: ObjectiveKind,
    /// Window length for the concentration objective.
    #[arg(long, default_value = "0")]
    pub t: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = anticonc_core::experiments::search::DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long, default_value_t = DEFAULT_PERM_CAP)]
    pub cap: usize,
}

/// Failure with the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    Core(Error),
    /// Preconditions failed; `output` still carries the rendered report.
    Violations { output: String, list: Vec<String> },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::CapExceeded { .. } => "cap-exceeded",
        Error::OracleCap { .. } => "oracle-cap",
        Error::LengthMismatch { .. } => "length-mismatch",
        Error::Config(_) => "config",
        Error::Io(_) => "io",
        Error::NoSamples => "no-samples",
        Error::Precondition(_) | Error::NoValidIndices => "precondition",
        _ => "input",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Core(e)) => {
            let reason = e.to_string().replace('\n', " ");
            eprintln!("error: kind={} reason={reason}", error_kind(&e));
            ExitCode::from(if e.is_resource_cap() { 3 } else { 2 })
        }
        Err(Failure::Violations { output, list }) => {
            print!("{output}");
            eprintln!("error: kind=precondition reason={}", list.join("; "));
            ExitCode::from(2)
        }
    }
}
