//! `dvfs`: fit, predict, and plan DVFS-aware DNN inference from the command line.
//!
//! Exit codes: 0 on success (or a feasible plan), 2 when a plan is returned
//! but no candidate satisfies its constraint, 1 on any error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "dvfs", version, about = "DVFS-aware GPU inference latency modeling and planning")]
pub struct Cli {
    /// Profile file (device + network, optionally edge).
    #[arg(long, global = true)]
    pub profile: Option<PathBuf>,
    /// Edge profile file; overrides an `edge` object inside the profile.
    #[arg(long, global = true)]
    pub edge: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit latency models to a trace CSV (`block,freq_ghz,latency_ms`).
    Fit(FitArgs),
    /// Predict latency (and energy) at a frequency.
    Predict(PredictArgs),
    /// Plan a frequency or a partition point.
    #[command(subcommand)]
    Plan(PlanCommand),
    /// Partition plans across a list of communication rates.
    Sweep(SweepArgs),
    /// Emit plot-ready CSV data.
    Figure(FigureArgs),
    /// Check a profile and list every violation.
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    PowerLaw,
    CpuDvfs,
}

impl From<Family> for dvfs_core::ModelFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::PowerLaw => dvfs_core::ModelFamily::PowerLaw,
            Family::CpuDvfs => dvfs_core::ModelFamily::CpuDvfs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitFamily {
    PowerLaw,
    CpuDvfs,
    Both,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub trace: PathBuf,
    #[arg(long = "model", value_enum, default_value = "power-law")]
    pub family: FitFamily,
}

/// How to obtain inverse-frequency baseline models when the profile has none.
#[derive(Debug, Clone, Args)]
pub struct BaselineArgs {
    /// Fit each block's baseline to its power-law curve at scale frequencies up to this value.
    #[arg(long, conflicts_with = "flops_per_cycle")]
    pub baseline_fit_below_ghz: Option<f64>,
    /// Derive each block's baseline from its FLOP count and this per-cycle throughput.
    #[arg(long)]
    pub flops_per_cycle: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub freq: f64,
    /// 1-based block index or block name; whole network when absent.
    #[arg(long)]
    pub block: Option<String>,
    /// Also print the dynamic energy.
    #[arg(long)]
    pub energy: bool,
    #[arg(long = "model", value_enum, default_value = "power-law")]
    pub family: Family,
    #[command(flatten)]
    pub baseline: BaselineArgs,
}

#[derive(Debug, Subcommand)]
pub enum PlanCommand {
    /// Frequency for fully local inference.
    Local(LocalArgs),
    /// Partition point between device and edge.
    Partition(PartitionArgs),
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("constraint").required(true).multiple(false))]
pub struct LocalArgs {
    /// Minimize energy subject to this deadline.
    #[arg(long, group = "constraint")]
    pub deadline_ms: Option<f64>,
    /// Minimize latency subject to this energy budget.
    #[arg(long, group = "constraint")]
    pub energy_j: Option<f64>,
    #[arg(long = "model", value_enum, default_value = "power-law")]
    pub family: Family,
    /// Re-evaluate the chosen plan under this model family.
    #[arg(long, value_enum)]
    pub truth: Option<Family>,
    #[command(flatten)]
    pub baseline: BaselineArgs,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    #[arg(long)]
    pub deadline_ms: f64,
    #[arg(long)]
    pub rate_mbps: f64,
    /// Device frequency in GHz, or `max`.
    #[arg(long, default_value = "max")]
    pub device_freq: String,
    /// Search every frequency of the device scale jointly with the partition point.
    #[arg(long)]
    pub joint_freq: bool,
    #[arg(long = "model", value_enum, default_value = "power-law")]
    pub family: Family,
    #[arg(long, value_enum)]
    pub truth: Option<Family>,
    #[command(flatten)]
    pub baseline: BaselineArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated rates in Mbps.
    #[arg(long, value_delimiter = ',', required = true)]
    pub rates_mbps: Vec<f64>,
    #[arg(long)]
    pub deadline_ms: f64,
    #[arg(long, default_value = "max")]
    pub device_freq: String,
    #[arg(long)]
    pub joint_freq: bool,
    #[arg(long = "model", value_enum, default_value = "power-law")]
    pub family: Family,
    #[command(flatten)]
    pub baseline: BaselineArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    /// freq_ghz, total_ms, energy_j, block<i>_ms
    LatencyVsFreq,
    /// freq_ghz, power_law_ms, cpu_dvfs_ms
    ModelCompare,
    /// constraint, per family: freq_ghz, actual_ms, actual_j, met
    PlanBars,
    /// rate_mbps, partition, freq_ghz, latency_ms, energy_j, feasible
    RateSweep,
    /// partition, freq_ghz, device/upload/edge/total ms, compute/transmit/total J, feasible
    PartitionCurves,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub id: FigureId,
    /// model-compare: fit this trace instead of sampling the profile.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// model-compare: block to compare (1-based index or name); network total when absent.
    #[arg(long)]
    pub block: Option<String>,
    /// plan-bars: deadlines to plan for.
    #[arg(long, value_delimiter = ',', conflicts_with = "energies_j")]
    pub deadlines_ms: Vec<f64>,
    /// plan-bars: energy budgets to plan for.
    #[arg(long, value_delimiter = ',')]
    pub energies_j: Vec<f64>,
    /// rate-sweep: comma-separated rates in Mbps.
    #[arg(long, value_delimiter = ',')]
    pub rates_mbps: Vec<f64>,
    /// partition-curves: communication rate.
    #[arg(long)]
    pub rate_mbps: Option<f64>,
    /// rate-sweep and partition-curves: deadline.
    #[arg(long)]
    pub deadline_ms: Option<f64>,
    #[arg(long, default_value = "max")]
    pub device_freq: String,
    #[arg(long)]
    pub joint_freq: bool,
    #[arg(long = "model", value_enum, default_value = "power-law")]
    pub family: Family,
    #[command(flatten)]
    pub baseline: BaselineArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(commands::Outcome::Success) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Infeasible) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
