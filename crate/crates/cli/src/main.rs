//! `boost-gpc`: prediction-horizon design and simulation for a GPC-controlled
//! boost converter.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 input error, 3 no stable horizon,
//! 4 numerical blowup in simulation.

mod commands;
mod config;
mod format;
mod range;

use std::path::PathBuf;
use std::process::ExitCode;

use boost_gpc::plant::{Discretization, SmallSignalGain};
use clap::{Parser, Subcommand};

use config::ConfigFile;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "boost-gpc",
    version,
    about = "GPC prediction-horizon design for a boost converter"
)]
struct Cli {
    /// JSON configuration; the 50 V → 70 V reference design when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Discretization of the design model.
    #[arg(long, global = true, value_name = "tustin|zoh")]
    method: Option<Discretization>,
    /// DC gain of the design model.
    #[arg(long, global = true, value_name = "printed|linearized")]
    gain: Option<SmallSignalGain>,
    /// Poles must lie inside the circle of radius 1 − margin.
    #[arg(long, global = true, value_name = "X")]
    margin: Option<f64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Print the effective configuration as JSON and exit.
    #[arg(long)]
    dump_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize the controller and write a report with its closed-loop poles.
    Synthesize {
        /// Override the configured prediction horizon.
        #[arg(long, value_name = "P")]
        horizon: Option<usize>,
    },
    /// Smallest stable prediction horizon.
    MinHorizon {
        #[arg(long, default_value_t = 40, value_name = "N")]
        p_max: usize,
        /// Design for the box R ∈ [rmin, rmax], vref ∈ [vmin, vmax].
        #[arg(long, value_name = "RMIN,RMAX,VMIN,VMAX")]
        corners: Option<String>,
    },
    /// Pole sweep over horizon, λ, load and reference.
    Sweep {
        /// Horizons, e.g. `11:15`.
        #[arg(long = "p", value_name = "AXIS")]
        horizon: Option<String>,
        /// Weights, e.g. `2:2:10`.
        #[arg(long, value_name = "AXIS")]
        lambda: Option<String>,
        /// Load resistances in Ω, e.g. `70:-10:40`.
        #[arg(long, value_name = "AXIS")]
        r: Option<String>,
        /// Output references in V, e.g. `60,70,80,90`.
        #[arg(long, value_name = "AXIS")]
        vref: Option<String>,
    },
    /// Closed-loop simulation of the nonlinear converter.
    Simulate {
        /// Scenario JSON.
        #[arg(long, value_name = "PATH")]
        scenario: PathBuf,
        /// Override the configured prediction horizon.
        #[arg(long, value_name = "P")]
        horizon: Option<usize>,
    },
}

fn effective_config(cli: &Cli) -> Result<ConfigFile, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    if let Some(m) = cli.method {
        cfg.discretization = m;
    }
    if let Some(g) = cli.gain {
        cfg.gain = g;
    }
    if let Some(m) = cli.margin {
        cfg.margin = m;
    }
    if let Some(o) = &cli.out {
        cfg.output_dir = o.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = effective_config(&cli)?;
    if cli.dump_config {
        println!("{}", cfg.to_json());
        return Ok(());
    }
    let Some(command) = cli.command else {
        return Err(CliError::input("no command given; see `boost-gpc --help`"));
    };
    cfg.validate()?;
    match command {
        Command::Synthesize { horizon } => commands::synthesize(&cfg, horizon),
        Command::MinHorizon { p_max, corners } => {
            commands::min_horizon(&cfg, p_max, corners.as_deref())
        }
        Command::Sweep {
            horizon,
            lambda,
            r,
            vref,
        } => commands::sweep(
            &cfg,
            commands::Axes {
                horizon,
                lambda,
                r,
                vref,
            },
        ),
        Command::Simulate { scenario, horizon } => commands::simulate(&cfg, &scenario, horizon),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
