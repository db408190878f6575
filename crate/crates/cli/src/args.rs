use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "circadia",
    version,
    about = "Reduction, spectra and dynamics of nearly singular superconducting circuits"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Directory for tables, plots and the run manifest.
    #[arg(long, global = true, default_value = "circadia-out")]
    pub out: PathBuf,
    /// Worker threads for sweep points; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Consistency-equation branches and the effective potential.
    Reduce(ReduceArgs),
    /// Born–Oppenheimer slow potential along a κ ladder, with a trend verdict.
    BoSweep(BoSweepArgs),
    /// Side-by-side ladders: reduced circuit, Born–Oppenheimer and naive
    /// compact adiabatic.
    Compare(CompareArgs),
    /// Two-coordinate spectra along a κ ladder.
    Spectrum(SpectrumArgs),
    /// Classical trajectories, slow-manifold residuals and shadowing.
    Dynamics(DynamicsArgs),
    /// Foster fit of lossless admittance samples.
    Foster(FosterArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Reduce(_) => "reduce",
            Command::BoSweep(_) => "bo-sweep",
            Command::Compare(_) => "compare",
            Command::Spectrum(_) => "spectrum",
            Command::Dynamics(_) => "dynamics",
            Command::Foster(_) => "foster",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisArg {
    Extended,
    Compact,
}

#[derive(Debug, Args, Serialize)]
pub struct ReduceArgs {
    /// Circuit descriptor (JSON).
    #[arg(long)]
    #[serde(skip)]
    pub circuit: PathBuf,
    /// Number of drive samples over one period.
    #[arg(long, default_value_t = 361)]
    pub grid: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct BoSweepArgs {
    #[arg(long)]
    #[serde(skip)]
    pub circuit: PathBuf,
    /// Strictly decreasing κ values.
    #[arg(long, value_delimiter = ',', default_value = "0.6,0.45,0.3")]
    pub kappa_ladder: Vec<f64>,
    /// Number of slow-coordinate samples on [−x_max, x_max].
    #[arg(long, default_value_t = 21)]
    pub grid: usize,
    #[arg(long, default_value_t = 3.0)]
    pub x_max: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    #[arg(long)]
    #[serde(skip)]
    pub circuit: PathBuf,
    /// κ values for the Born–Oppenheimer and naive columns (default: the
    /// circuit's own κ).
    #[arg(long, value_delimiter = ',')]
    pub kappa_ladder: Option<Vec<f64>>,
    /// Points of the extended phase grid.
    #[arg(long, default_value_t = 400)]
    pub grid: usize,
    /// Half-width of the extended phase box, radians.
    #[arg(long, default_value_t = 4.0 * std::f64::consts::PI)]
    pub box_half_width: f64,
    /// Points of the periodic phase grid (odd).
    #[arg(long, default_value_t = 129)]
    pub phase_points: usize,
    #[arg(long, default_value_t = 6)]
    pub levels: usize,
    /// Use ½ instead of 1 as the charge kinetic coefficient.
    #[arg(long)]
    pub charge_half_factor: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(long)]
    #[serde(skip)]
    pub circuit: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    pub kappa_ladder: Vec<f64>,
    /// Fast-axis basis; both when omitted.
    #[arg(long, value_enum)]
    pub basis: Option<BasisArg>,
    /// Points per axis.
    #[arg(long, default_value_t = 96)]
    pub grid: usize,
    #[arg(long, default_value_t = 6)]
    pub levels: usize,
    #[arg(long)]
    pub charge_half_factor: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct DynamicsArgs {
    #[arg(long)]
    #[serde(skip)]
    pub circuit: PathBuf,
    /// κ values to run (default: the circuit's own κ).
    #[arg(long, value_delimiter = ',')]
    pub kappa_ladder: Option<Vec<f64>>,
    /// Initial slow coordinate; the fast pair starts on the slow manifold.
    #[arg(long, default_value_t = 1.0)]
    pub x0: f64,
    /// Length of the residual run, in units of 1/ω′_r.
    #[arg(long, default_value_t = 60.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = circadia::dynamics::DEFAULT_DT)]
    pub dt: f64,
    #[arg(long, default_value_t = circadia::dynamics::DEFAULT_DRIFT_TOLERANCE)]
    pub drift_tolerance: f64,
    /// Shadowing horizon in slow periods; 0 skips the comparison.
    #[arg(long, default_value_t = 2.0)]
    pub slow_periods: f64,
    /// Also integrate with dt/2 and dt/4 and report the error ratio.
    #[arg(long)]
    pub step_halving: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct FosterArgs {
    /// CSV with columns omega, ImY and optionally ReY.
    #[arg(long)]
    #[serde(skip)]
    pub samples: PathBuf,
    #[arg(long)]
    pub resonances: usize,
}
