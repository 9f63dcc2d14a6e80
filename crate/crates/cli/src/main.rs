use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(bubblecasimir::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    CheckFailed(String),
}

impl From<bubblecasimir::Error> for CliError {
    fn from(e: bubblecasimir::Error) -> Self {
        match e {
            bubblecasimir::Error::Config(_) | bubblecasimir::Error::Domain { .. } => {
                CliError::Config(e.to_string())
            }
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Usage(_) | CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bubblecasimir", version, about = "Photon spectra from a sudden index change in a dielectric sphere")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Run configuration (`key = value` per line).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Kernel for the spectral integral: exact, factorized or delta.
    #[arg(long, global = true)]
    kernel: Option<String>,
    /// Integrate the tail strips past the cutoffs out to this bound.
    #[arg(long, global = true, value_name = "BOUND")]
    include_tails: Option<f64>,
    /// Machine-readable summaries.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// dN/dx on a grid, with totals.
    Spectrum,
    /// The five reference scenarios against their expected totals.
    Table,
    /// F(x, y) on a rectangular grid, exact and factorized.
    KernelDump {
        #[arg(long, default_value = "0:12", value_name = "LO:HI")]
        x_range: String,
        #[arg(long, default_value = "0:12", value_name = "LO:HI")]
        y_range: String,
        /// Points per axis.
        #[arg(long, default_value_t = 48)]
        steps: usize,
    },
    /// D(x) from the exact sum next to the fitted form.
    Diagonal {
        #[arg(long, default_value = "0:14", value_name = "LO:HI")]
        range: String,
    },
    /// Closed-form infinite-volume spectrum and totals.
    InfiniteVolume,
    /// Run every identity suite.
    Check {
        #[arg(long, hide = true, default_value_t = 1.0)]
        threshold_scale: f64,
        #[arg(long, hide = true, default_value_t = bubblecasimir::oracles::DEFAULT_SEED)]
        seed: u64,
    },
}

impl GlobalArgs {
    fn run_config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(k) = &self.kernel {
            cfg.kernel_mode = k.parse().map_err(|e: bubblecasimir::Error| CliError::Usage(e.to_string()))?;
        }
        if let Some(bound) = self.include_tails {
            cfg.quad.include_tails = true;
            cfg.quad.tail_upper_bound = bound;
        }
        if self.output.is_some() {
            cfg.output_path = self.output.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    match cli.command {
        Command::Spectrum => commands::spectrum(&g.run_config()?, g.json),
        Command::Table => commands::table(&g.run_config()?, g.json),
        Command::KernelDump { x_range, y_range, steps } => {
            let xr = commands::parse_range(&x_range)?;
            let yr = commands::parse_range(&y_range)?;
            commands::kernel_dump(&g.run_config()?, xr, yr, steps)
        }
        Command::Diagonal { range } => {
            commands::diagonal(&g.run_config()?, commands::parse_range(&range)?)
        }
        Command::InfiniteVolume => commands::infinite_volume(&g.run_config()?, g.json),
        Command::Check { threshold_scale, seed } => {
            commands::check(threshold_scale, seed, g.json)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
