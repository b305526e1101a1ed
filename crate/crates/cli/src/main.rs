mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

/// Disordered Tavis-Cummings-Hubbard cavity arrays: band structures,
/// effective-Hamiltonian spectra, participation metrics, master-equation
/// emission spectra and disorder sweeps.
#[derive(Debug, Parser)]
#[command(name = "tchm", version)]
pub struct Cli {
    /// Run configuration (`key = value` lines, rates in GHz).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Disorder seed; for `sweep`, the master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Output file (a directory for `sweep`). Standard output if omitted.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form polariton bands of the resonant array.
    Bands(BandsArgs),
    /// Eigenvalues and photon/emitter weights of the effective Hamiltonian.
    Eigs(EigsArgs),
    /// Participation ratios and band labels of every eigenstate.
    Metrics,
    /// Emission spectra from the master equation.
    QmeSpectrum(QmeArgs),
    /// Disorder-averaged sweeps and figure presets.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct BandsArgs {
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value = "open")]
    boundary: tchm::model::Boundary,
    #[arg(long, default_value_t = 4.0)]
    omega0: f64,
    #[arg(long, default_value_t = 1.0)]
    j: f64,
    #[arg(long, default_value_t = 0.2)]
    g: f64,
}

#[derive(Debug, Args)]
pub struct EigsArgs {
    /// Also emit per-node photon and emitter weights.
    #[arg(long)]
    occupancies: bool,
}

#[derive(Debug, Args)]
pub struct QmeArgs {
    /// Pumped cavity, 0-based.
    #[arg(long, default_value_t = 0)]
    pump_cavity: usize,
    /// Pump rate `P/2π` in GHz.
    #[arg(long, default_value_t = tchm::lindblad::DEFAULT_PUMP_GHZ)]
    pump_rate: f64,
    #[arg(long, default_value_t = tchm::lindblad::DEFAULT_FOCK_CUTOFF)]
    fock_cutoff: usize,
    /// Sum the spectra over pumping each cavity in turn.
    #[arg(long)]
    sum_pumps: bool,
    /// Lower end of the output grid, rad/ns.
    #[arg(long, allow_negative_numbers = true, requires_all = ["omega_max", "points"])]
    omega_min: Option<f64>,
    /// Upper end of the output grid, rad/ns.
    #[arg(long, allow_negative_numbers = true, requires_all = ["omega_min", "points"])]
    omega_max: Option<f64>,
    #[arg(long, requires_all = ["omega_min", "omega_max"])]
    points: Option<usize>,
    /// Scale each trace to unit maximum.
    #[arg(long)]
    normalize: bool,
    /// Largest truncated-space dimension to attempt.
    #[arg(long, default_value_t = tchm::lindblad::DEFAULT_MAX_DIMENSION)]
    max_dimension: usize,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "source")]
pub struct SweepSource {
    #[arg(long)]
    preset: Option<String>,
    /// Sweep specification, TOML or JSON.
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    source: SweepSource,
    #[arg(long)]
    realizations: Option<usize>,
    /// Worker threads.
    #[arg(long, env = "TCHM_JOBS")]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
