//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "dvsound",
    version,
    about = "Dispersion roots and kinetic wave simulation for discrete-velocity quantum gases",
    after_help = "Angles are radians unless suffixed with `deg`, e.g. --theta 45deg.\n\
                  --config FILE reads `key = value` lines (keys are long flag names without \
                  dashes); flags on the command line take precedence.\n\
                  Exit codes: 0 success, 1 invalid arguments or I/O failure, 2 numerical failure."
)]
pub struct Cli {
    /// Read defaults for the subcommand's flags from a `key = value` file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Roots of the dispersion relation at one parameter point.
    #[command(allow_negative_numbers = true)]
    Roots(RootsArgs),
    /// Continuation-tracked roots over an h grid for lists of theta and B.
    #[command(allow_negative_numbers = true)]
    Sweep(SweepArgs),
    /// Localization lengths 1/lambda_i over the same grid as `sweep`.
    #[command(allow_negative_numbers = true)]
    Localization(SweepArgs),
    /// Location and height of the attenuation peak over h.
    #[command(allow_negative_numbers = true)]
    Hmax(HmaxArgs),
    /// Largest attenuation over h in (0, h_cap] as a function of theta.
    #[command(name = "theta-scan", allow_negative_numbers = true)]
    ThetaScan(ThetaScanArgs),
    /// Driven kinetic simulation and measured wavenumber.
    #[command(allow_negative_numbers = true)]
    Simulate(SimulateArgs),
    /// Run the oracle cross-check suite and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StatisticsArg {
    Bose,
    Fermi,
    Boltzmann,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Acoustic,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    LaxWendroff,
    Upwind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DriveArg {
    Mode,
    Uniform,
}

/// One parameter point, either reduced `(h, B)` or physical `(c, S, N0, omega, gamma)`.
#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Rarefaction parameter h = 4 c S N0 / omega.
    #[arg(long)]
    pub h: Option<f64>,
    /// Pauli-blocking parameter B = gamma N0 (must exceed -1).
    #[arg(long = "B")]
    pub blocking: Option<f64>,
    /// Orientation of the velocity set.
    #[arg(long, value_parser = crate::parse::angle, default_value = "0")]
    pub theta: f64,
    /// Half the number of velocities.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Statistics used to derive N0 from B (default: from the sign of B).
    #[arg(long)]
    pub statistics: Option<StatisticsArg>,
    /// Velocity modulus (physical parameterization).
    #[arg(long)]
    pub c: Option<f64>,
    /// Scattering cross section (physical parameterization).
    #[arg(long = "S")]
    pub cross_section: Option<f64>,
    /// Equilibrium density (physical parameterization).
    #[arg(long = "N0")]
    pub density: Option<f64>,
    /// Wave angular frequency (physical parameterization).
    #[arg(long)]
    pub omega: Option<f64>,
    /// Statistics factor (physical parameterization).
    #[arg(long)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RootsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "acoustic")]
    pub branch: PolicyArg,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// Write to FILE instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Grid LO:HI:STEPS over h.
    #[arg(long = "h-range", value_name = "LO:HI:STEPS", default_value = "0.01:100:41")]
    pub h_range: String,
    /// Logarithmic spacing of the h grid (the default).
    #[arg(long, conflicts_with = "linear")]
    pub log: bool,
    /// Linear spacing of the h grid.
    #[arg(long)]
    pub linear: bool,
    /// Comma-separated orientations.
    #[arg(long, value_name = "LIST", default_value = "0")]
    pub theta: String,
    /// Comma-separated blocking parameters.
    #[arg(long = "B", value_name = "LIST", default_value = "0")]
    pub blocking: String,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "acoustic")]
    pub branch: PolicyArg,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HmaxArgs {
    #[arg(long, value_parser = crate::parse::angle, default_value = "0")]
    pub theta: f64,
    #[arg(long = "B", default_value_t = 0.0)]
    pub blocking: f64,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Search interval LO:HI over h, at least two decades wide.
    #[arg(long = "h-range", value_name = "LO:HI", default_value = "0.01:100")]
    pub h_range: String,
    /// `acoustic` or `secondaryK`.
    #[arg(long, default_value = "acoustic")]
    pub branch: String,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThetaScanArgs {
    #[arg(long = "B", default_value_t = 0.0)]
    pub blocking: f64,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Upper end of the h range.
    #[arg(long = "h-cap", default_value_t = 10.0)]
    pub h_cap: f64,
    /// Number of theta intervals over [0, pi/n].
    #[arg(long, default_value_t = 90)]
    pub steps: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Grid points per hydrodynamic wavelength.
    #[arg(long, default_value_t = 40)]
    pub ppw: usize,
    /// Recorded periods.
    #[arg(long, default_value_t = 5)]
    pub periods: usize,
    /// Domain length in wavelengths.
    #[arg(long, default_value_t = 12)]
    pub wavelengths: usize,
    /// Minimum number of discarded periods.
    #[arg(long, default_value_t = 10)]
    pub transient: usize,
    /// Integrate the full collision term instead of the linearized one.
    #[arg(long)]
    pub nonlinear: bool,
    /// Drive amplitude.
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    #[arg(long, value_enum, default_value = "lax-wendroff")]
    pub scheme: SchemeArg,
    #[arg(long, value_enum, default_value = "mode")]
    pub drive: DriveArg,
    /// Snapshot dump file.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Write every STRIDE-th recorded step to the dump.
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Seed for the randomized checks.
    #[arg(long, default_value_t = dvsound::verify::DEFAULT_SEED)]
    pub seed: u64,
}
