use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Clone, Parser)]
#[command(name = "rotor-scatter", version, about = "Born scattering of a planar rigid rotor")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// σ(θ) for the configured engine at the beam wavenumber.
    Profile(RunArgs),
    /// σ(θ, k) matrix over the configured k list.
    Sweep(SweepArgs),
    /// Profiles with and without internal structure, plus their visibilities.
    Compare(CompareArgs),
    /// Run the self-check suite and emit a JSON report.
    Validate(ValidateArgs),
    /// J_n(x) for n = 0..=n_max as CSV on standard output.
    BesselTable(BesselArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "csv")]
    pub format: Vec<Format>,
    /// Worker threads; the output does not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub grid: GridOverrides,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GridOverrides {
    #[arg(long, allow_negative_numbers = true)]
    pub theta_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta_max: Option<f64>,
    #[arg(long)]
    pub theta_steps: Option<i64>,
    /// Comma-separated wavenumbers replacing the configured list.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Also write the matrix of the structureless counterpart.
    #[arg(long)]
    pub paired: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Visibility window `lo,hi` in radians; the θ grid's span by default.
    #[arg(long, value_delimiter = ',', num_args = 2, allow_negative_numbers = true)]
    pub window: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Directory for the JSON report; standard output only when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated check groups, e.g. `ft,matrix`.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct BesselArgs {
    #[arg(long)]
    pub n_max: u32,
    #[arg(long, allow_negative_numbers = true)]
    pub x: f64,
}
