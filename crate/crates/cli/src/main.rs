use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod error;
mod output;

use commands::Axis;
use config::RunConfig;
use error::Result;
use output::Sink;

/// Simulated homodyne readout of a Kerr parametric oscillator.
#[derive(Debug, Parser)]
#[command(name = "kpo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AxisArg {
    Ta,
    Eta,
    DeltaTheta,
    Beta,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Stationary amplitude -> alpha.json
    Alpha(Common),
    /// One conditioned trajectory with its estimates -> trajectory.csv
    Trajectory(Common),
    /// Success probability along one axis -> sweep_<axis>.csv
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        axis: AxisArg,
    },
    /// Jump rate from master-equation relaxation -> omega.json
    FitOmega(Common),
    /// Averaging-time window -> bounds.json
    Bounds(Common),
}

fn load(common: &Common) -> Result<RunConfig> {
    let mut config = RunConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(out) = &common.out {
        config.output_dir = out.clone();
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<()> {
    let (name, common) = match &cli.command {
        Command::Alpha(c) => ("alpha", c),
        Command::Trajectory(c) => ("trajectory", c),
        Command::Sweep { common, .. } => ("sweep", common),
        Command::FitOmega(c) => ("fit-omega", c),
        Command::Bounds(c) => ("bounds", c),
    };
    let config = load(common)?;
    let sink = Sink {
        dir: config.output_dir.clone(),
        command: name,
        config: &config,
    };
    let path = match cli.command {
        Command::Alpha(_) => {
            let (a, path) = commands::alpha(&config, &sink)?;
            println!(
                "alpha = {:.6} {:+.6}i  (|alpha| = {:.6}, arg = {:.6})",
                a.alpha_re, a.alpha_im, a.abs, a.arg
            );
            path
        }
        Command::Trajectory(_) => commands::trajectory(&config, &sink)?,
        Command::Sweep { axis, .. } => {
            let axis = match axis {
                AxisArg::Ta => Axis::Ta,
                AxisArg::Eta => Axis::Eta,
                AxisArg::DeltaTheta => Axis::DeltaTheta,
                AxisArg::Beta => Axis::Beta,
            };
            commands::sweep(&config, axis, &sink)?
        }
        Command::FitOmega(_) => {
            let (o, path) = commands::fit_omega(&config, &sink)?;
            println!(
                "Omega/2pi = {:.4} kHz, E[T_i] = {:.4} us, T_U = {:.4e} us",
                o.omega_over_2pi_khz, o.e_t_i_us, o.t_upper_us
            );
            path
        }
        Command::Bounds(_) => {
            let (b, path) = commands::bounds(&config, &sink)?;
            println!(
                "T_L = {:.4e} us, T_U = {:.4e} us (K = {})",
                b.t_lower_us, b.t_upper_us, b.k_target
            );
            path
        }
    };
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kpo: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
