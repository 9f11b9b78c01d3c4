//! Command-line front end: each subcommand writes deterministic CSV tables
//! (optionally SVG plots) plus a JSON manifest into the output directory.

mod commands;
mod error;
mod manifest;
mod svg;
mod table;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use error::CliError;
pub use manifest::RunManifest;
pub use table::{fmt_g, Cell, Table};

#[derive(Debug, Parser)]
#[command(
    name = "tma",
    version,
    about = "Oversampled time-modulated array simulator"
)]
pub struct Cli {
    /// JSON config with switch parameters and array geometry.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Also write an SVG line plot next to each CSV.
    #[arg(long, global = true)]
    pub svg: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Time-domain switch schedules.
    Modsig(ModsigArgs),
    /// Harmonic power per replica and versus N.
    Harmonics(HarmonicsArgs),
    /// Effective phase bits versus pulse stretching.
    Resolution(ResolutionArgs),
    /// Array-factor patterns per delay.
    Beampattern(BeampatternArgs),
    /// Worst-case undesired harmonic gain under tapering.
    Tapering(TaperingArgs),
    /// Spectrum of a modulated test signal and predicted replicas.
    Replicas(ReplicasArgs),
    /// Closed forms against the brute-force oracle.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct ModsigArgs {
    /// Single panel with this O_f (needs --o-tau too). Default: the four
    /// factorizations of O = 4.
    #[arg(long, requires = "o_tau")]
    pub o_f: Option<usize>,
    #[arg(long, requires = "o_f")]
    pub o_tau: Option<usize>,
    #[arg(long)]
    pub n_phases: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub delay: usize,
    #[arg(long, default_value_t = 0)]
    pub taper: usize,
    #[arg(long, default_value_t = 1)]
    pub samples_per_slot: usize,
}

#[derive(Debug, Args)]
pub struct HarmonicsArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 4, 8])]
    pub n_phases: Vec<usize>,
    #[arg(long, default_value_t = tma_core::modseq::DEFAULT_I_MAX)]
    pub i_max: usize,
    /// Largest N in the power-versus-N table.
    #[arg(long, default_value_t = 16)]
    pub n_max: usize,
}

#[derive(Debug, Args)]
pub struct ResolutionArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 4, 8, 16])]
    pub n_phases: Vec<usize>,
    #[arg(long, default_value_t = 16)]
    pub o_tau_max: usize,
}

#[derive(Debug, Args)]
pub struct BeampatternArgs {
    #[arg(long)]
    pub n_antennas: Option<usize>,
    /// Element spacing in carrier wavelengths.
    #[arg(long)]
    pub spacing: Option<f64>,
    #[arg(long)]
    pub n_phases: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub o_tau: Option<Vec<usize>>,
    /// Replica indices to plot.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = [0i64])]
    pub harmonic: Vec<i64>,
    /// Delays to plot (default: all).
    #[arg(long, value_delimiter = ',')]
    pub delay: Option<Vec<usize>>,
    /// Angle grid step in degrees.
    #[arg(long, default_value_t = tma_core::beamformer::DEFAULT_GRID_STEP)]
    pub step: f64,
    /// Scale the spacing with the replica frequency.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args)]
pub struct TaperingArgs {
    #[arg(long, default_value_t = 2)]
    pub o_tau: usize,
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    #[arg(long, default_value_t = 32)]
    pub n_max: usize,
    #[arg(long, default_value_t = tma_core::modseq::DEFAULT_I_MAX)]
    pub i_max: usize,
}

#[derive(Debug, Args)]
pub struct ReplicasArgs {
    #[arg(long, default_value_t = 0)]
    pub delay: usize,
    #[arg(long, default_value_t = 0)]
    pub taper: usize,
    #[arg(long, default_value_t = 64)]
    pub n_symbols: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 4)]
    pub samples_per_slot: usize,
    /// Replica table half-width (default: every replica below the
    /// simulation Nyquist rate).
    #[arg(long)]
    pub i_max: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Self-test: perturb one analytic coefficient by this amount.
    #[arg(long)]
    pub inject_fault: Option<f64>,
}

/// Runs one parsed invocation.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    commands::run(cli)
}
