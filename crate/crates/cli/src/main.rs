// Copyright 2026 ness-lab contributors
// SPDX-License-Identifier: Apache-2.0

//! `ness-lab`: reproducible runs of the ness-core analyses, written as CSV
//! or JSON.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ness-lab", version, about = "Entangled steady states of two qubits between thermal baths")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,

    /// Worker threads for parameter sweeps (0 = one per core).
    #[arg(long, env = "NESS_LAB_THREADS", default_value_t = 0, global = true)]
    threads: usize,

    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Steady state, concurrence and heat currents for one set of couplings.
    Steady(ModelArgs),
    /// Largest steady-state concurrence over the couplings on a (z1, z2) grid.
    CmaxMap(CmaxMapArgs),
    /// Sampled (|Q|, C) pairs, their hull and the guaranteed-entanglement interval.
    CqRegion(CqRegionArgs),
    /// |det F(t)| trajectory and the non-divisibility measure.
    Divisibility(DivisibilityArgs),
    /// Collision-model trajectory.
    Collide(CollideArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub z1: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub z2: f64,
    /// Bath coupling Γ₁/Ω.
    #[arg(long, allow_negative_numbers = true)]
    pub g1: f64,
    /// Bath coupling Γ₂/Ω.
    #[arg(long, allow_negative_numbers = true)]
    pub g2: f64,
    /// Memory coupling Υ₁/Ω.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub u1: f64,
    /// Memory coupling Υ₂/Ω.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub u2: f64,
    /// Memory probability.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub p: f64,
}

#[derive(Debug, Clone, Args)]
pub struct CmaxMapArgs {
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
    /// Points per axis over [-1, 1].
    #[arg(long, default_value_t = 41)]
    pub grid_n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Optimizer starts per grid point.
    #[arg(long, default_value_t = 20)]
    pub starts: usize,
}

#[derive(Debug, Clone, Args)]
pub struct CqRegionArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub z1: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub z2: f64,
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Hull bins over [0, max |Q|].
    #[arg(long, default_value_t = 200)]
    pub bins: usize,
}

#[derive(Debug, Clone, Args)]
pub struct DivisibilityArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub z1: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub z2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Use the couplings that maximize the steady-state concurrence.
    #[arg(long, conflicts_with_all = ["g1", "g2", "u1", "u2"])]
    pub use_cmax_params: bool,
    #[arg(long, required_unless_present = "use_cmax_params")]
    pub g1: Option<f64>,
    #[arg(long, required_unless_present = "use_cmax_params")]
    pub g2: Option<f64>,
    #[arg(long)]
    pub u1: Option<f64>,
    #[arg(long)]
    pub u2: Option<f64>,
    /// End of the time window (default: 50 over the slowest dissipation rate).
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Initial number of time steps; doubled until the measure settles.
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    /// Seed for the concurrence optimizer.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitialState {
    /// 𝟙/4
    Mixed,
    /// Both system qubits in the ground state.
    Ground,
    /// Each system qubit at the temperature of its bath.
    Thermal,
}

#[derive(Debug, Clone, Args)]
pub struct CollideArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Collision duration in units of 1/Ω.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long)]
    pub steps: usize,
    /// Initial system state; memory qubits start at their bath temperatures.
    #[arg(long, value_enum, default_value_t = InitialState::Mixed)]
    pub init: InitialState,
    /// Write every n-th step only.
    #[arg(long, default_value_t = 1)]
    pub every: usize,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or model parameters.
    Usage(String),
    /// A solver failed or did not converge.
    Numerical(String),
    Io(std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Numerical(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<ness_core::Error> for CliError {
    fn from(e: ness_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot set up {} threads: {e}", cli.threads)))?;
    }
    let sink = output::Sink::new(cli.out, cli.format);
    match cli.command {
        Command::Steady(a) => commands::steady(&a, &sink),
        Command::CmaxMap(a) => commands::cmax_map(&a, &sink),
        Command::CqRegion(a) => commands::cq_region(&a, &sink),
        Command::Divisibility(a) => commands::divisibility(&a, &sink),
        Command::Collide(a) => commands::collide(&a, &sink),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ness-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
