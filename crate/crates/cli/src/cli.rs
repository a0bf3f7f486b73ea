//! Argument definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dualtree_core::dataset::DuplicatePolicy;

use crate::data::HeaderMode;

#[derive(Debug, Parser)]
#[command(name = "dualtree", version, about = "Cover trees and dual-tree nearest neighbor, KDE and range search")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated dataset as CSV.
    Gen(GenArgs),
    /// Build a cover tree, verify it and write it as JSON.
    Build(BuildArgs),
    /// Verify the invariants of a built or stored tree.
    Check(CheckArgs),
    /// Dataset and tree statistics.
    Stats(StatsArgs),
    /// All nearest neighbors.
    Allnn(AllnnArgs),
    /// Kernel density estimates.
    Kde(KdeArgs),
    /// Range search or range count.
    Range(RangeArgs),
    /// Sweep dataset sizes and seeds, writing one CSV row per run.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Duplicates {
    /// Identical points are an error.
    #[default]
    Reject,
    /// Collapse identical points into one weighted point.
    Weighted,
}

impl From<Duplicates> for DuplicatePolicy {
    fn from(d: Duplicates) -> Self {
        match d {
            Duplicates::Reject => DuplicatePolicy::Reject,
            Duplicates::Weighted => DuplicatePolicy::Weighted,
        }
    }
}

/// How datasets are read or generated.
#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Seed for generator specs.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = HeaderMode::Auto)]
    pub header: HeaderMode,
    #[arg(long, value_enum, default_value_t = Duplicates::Reject)]
    pub duplicates: Duplicates,
    /// Root point: `first`, a point id, or `seeded` (uses --seed).
    #[arg(long, default_value = "first")]
    pub root: String,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Generator spec, e.g. `uniform-ball:N=1000,d=5`.
    pub spec: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub no_header: bool,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// CSV file or generator spec.
    pub data: String,
    #[command(flatten)]
    pub data_args: DataArgs,
    /// Tree JSON destination.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Invariant report destination.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub data: String,
    #[command(flatten)]
    pub data_args: DataArgs,
    /// Verify this stored tree instead of building one.
    #[arg(long)]
    pub tree: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub data: String,
    #[command(flatten)]
    pub data_args: DataArgs,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Options shared by the three algorithms.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Reference dataset: CSV file or generator spec.
    #[arg(long, short = 'r')]
    pub reference: String,
    /// Query dataset; omitted or with --mono the run is monochromatic.
    #[arg(long, short = 'q', conflicts_with = "mono")]
    pub query: Option<String>,
    /// Use the reference set as the query set.
    #[arg(long)]
    pub mono: bool,
    /// Seed for the query generator spec (defaults to --seed + 1).
    #[arg(long)]
    pub query_seed: Option<u64>,
    #[command(flatten)]
    pub data_args: DataArgs,
    /// Compare against a brute-force oracle; mismatches exit with code 2.
    #[arg(long)]
    pub verify_with_oracle: bool,
    /// Follow the pseudocode literally where it differs from the default.
    #[arg(long)]
    pub strict_paper_mode: bool,
    /// Write every traversal event as NDJSON.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Check reference-set separation at every reference recursion.
    #[arg(long)]
    pub audit: bool,
    /// Skip the brute-force bound report.
    #[arg(long, conflicts_with = "bounds")]
    pub no_bounds: bool,
    /// Compute the bound report even above the default size cap.
    #[arg(long)]
    pub bounds: bool,
    /// Also compute the bichromatic c_qr (one expansion scan per query point).
    #[arg(long)]
    pub c_qr: bool,
    /// Results destination.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// JSON report destination.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AllnnArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Allow a monochromatic query point to be its own neighbor.
    #[arg(long)]
    pub include_self: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Mode {
    #[default]
    Absolute,
    Relative,
}

#[derive(Debug, Args)]
pub struct KdeArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Kernel spec, e.g. `gaussian:sigma=1.0`.
    #[arg(long, short = 'k')]
    pub kernel: String,
    #[arg(long, short = 'e')]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = Mode::Absolute)]
    pub mode: Mode,
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, short = 'l')]
    pub lower: f64,
    #[arg(long, short = 'u')]
    pub upper: f64,
    /// Expansion parameter for the difficulty statistics.
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub alpha: f64,
    #[arg(long)]
    pub count_only: bool,
    /// Skip `p_q = p_r` in monochromatic runs.
    #[arg(long)]
    pub exclude_self: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    Allnn,
    Kde,
    Range,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(value_enum)]
    pub problem: Problem,
    /// Generator spec without `N`, e.g. `uniform-ball:d=3`.
    #[arg(long, short = 'g', default_value = "uniform-ball:d=3")]
    pub generator: String,
    #[arg(long, value_delimiter = ',', default_value = "250,500,1000,2000")]
    pub sizes: Vec<usize>,
    /// Number of seeds per size.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    /// First seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "gaussian:sigma=1")]
    pub kernel: String,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = Mode::Absolute)]
    pub mode: Mode,
    #[arg(long, default_value_t = 0.0)]
    pub lower: f64,
    #[arg(long, default_value_t = 0.25)]
    pub upper: f64,
    /// Skip oracle verification entirely.
    #[arg(long)]
    pub no_oracle: bool,
    /// Skip the brute-force bound columns.
    #[arg(long)]
    pub no_bounds: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}
