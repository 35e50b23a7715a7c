//! `parmol` binary: clap front end over [`parmol_cli::runner::run`].
//!
//! Exit codes: 0 success, 1 configuration error, 2 computation error,
//! 3 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use parmol_cli::runner::{parse_formats, run, CommandKind, RunArgs};

#[derive(Parser)]
#[command(
    name = "parmol",
    version,
    about = "Parametric excitation of molecular dipoles above a grating: \
             trajectories, Floquet stability maps, thresholds and feasibility estimates"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate one trajectory (sim.model = mathieu | exact | retarded | bloch)
    Simulate(Common),
    /// Chart Floquet exponents over the (nu/omega0, drive amplitude) plane
    FloquetMap(Common),
    /// Parametric threshold: closed form plus Floquet bisection
    Threshold(Common),
    /// Full feasibility report for one scenario
    Estimate(Common),
    /// Sweep one parameter; report growth and threshold columns per point
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// Path to the line-oriented `key = value` config file
    #[arg(long, value_name = "PATH")]
    config: PathBuf,

    /// Output directory, created if missing
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Seed for randomized initial conditions; overrides run.seed
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,

    /// Worker threads for map columns and sweep points (default: all cores)
    #[arg(long, value_name = "INT")]
    workers: Option<usize>,

    /// Comma-separated subset of csv,json,svg,txt (default: every format
    /// the subcommand produces)
    #[arg(long, value_name = "LIST")]
    format: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };

    let (kind, common) = match cli.command {
        Cmd::Simulate(c) => (CommandKind::Simulate, c),
        Cmd::FloquetMap(c) => (CommandKind::FloquetMap, c),
        Cmd::Threshold(c) => (CommandKind::Threshold, c),
        Cmd::Estimate(c) => (CommandKind::Estimate, c),
        Cmd::Sweep(c) => (CommandKind::Sweep, c),
    };

    let formats = match common.format.as_deref().map(parse_formats).transpose() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };

    let args = RunArgs {
        command: kind,
        config_path: common.config,
        out_dir: common.out,
        seed: common.seed,
        workers: common.workers,
        formats,
    };

    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
