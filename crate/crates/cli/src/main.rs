//! `motfield` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "motfield",
    version,
    about = "Magnetostatic design toolkit for magneto-optical trap conductors"
)]
struct Cli {
    /// Worker threads for field sampling (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Reserved; no command is stochastic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// Run configuration (JSON, millimetres and amperes).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output` in the config).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Locate the zero, fit gradients, estimate power and write field maps.
    Simulate(Io),
    /// Search the bounded parameters of the objective.
    Optimize(Io),
    /// Print the miniaturization ratios for a linear scale factor.
    Scale {
        #[arg(allow_negative_numbers = true)]
        k: f64,
        /// Also write scaling.json into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the filament geometry as OBJ line elements.
    Export(Io),
}

/// Exit status for a failure: 3 infeasible start, 4 numerical failure,
/// 2 for configuration, usage and I/O problems.
fn exit_code(err: &anyhow::Error) -> u8 {
    use motfield::Error as E;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::InfeasibleStart(_) => 3,
                E::SingularPoint { .. }
                | E::EmptySample
                | E::ZeroNotBracketed(_)
                | E::DegenerateFit(_)
                | E::ObjectiveEvaluation(_) => 4,
                E::InvalidGeometry(_) | E::Clearance(_) | E::InvalidInput(_) => 2,
            };
        }
    }
    2
}

fn run(cli: Cli) -> Result<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()?;
    }
    let load = |io: &Io| -> Result<(RunConfig, PathBuf)> {
        let cfg = RunConfig::load(&io.config)?;
        let out = cfg.output_dir(io.out.as_deref())?;
        Ok((cfg, out))
    };
    match &cli.command {
        Command::Simulate(io) => {
            let (cfg, out) = load(io)?;
            commands::simulate(&cfg, &out)
        }
        Command::Optimize(io) => {
            let (cfg, out) = load(io)?;
            commands::optimize(&cfg, &out)
        }
        Command::Scale { k, out } => commands::scale(*k, out.as_deref()),
        Command::Export(io) => {
            let (cfg, out) = load(io)?;
            commands::export(&cfg, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
