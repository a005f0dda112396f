//! `hnlab`: validate HN profiles, evaluate instability bounds, and reproduce
//! the plane-curve examples from the command line.
//!
//! Exit codes: 0 ok, 2 invariant violated, 3 a bound failed, 64 usage,
//! 65 malformed data.

mod cache;
mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hnlab_core::curves::oracle::DEFAULT_BUDGET;

use commands::{bounds::BoundsArgs, curve::CurveArgs, example::ExampleCmd, tower::TowerArgs, Outcome};
use output::{Emitter, Format};

#[derive(Parser, Debug)]
#[command(name = "hnlab", version, about = "Exact Harder-Narasimhan slope calculus under Frobenius pullback")]
pub struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,

    /// Directory for cached oracle values
    #[arg(long, env = "HNLAB_CACHE", global = true)]
    pub cache: Option<PathBuf>,

    /// Largest q^3 the oracle may eliminate
    #[arg(long, default_value_t = DEFAULT_BUDGET, global = true)]
    pub budget: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Profile files
    Profile {
        #[command(subcommand)]
        action: ProfileCmd,
    },
    /// Evaluate one bound over every case in an input file
    Bounds(Box<BoundsArgs>),
    /// Plane trinomial curve data and the brute-force oracle
    Curve(CurveArgs),
    /// Generate the refinement counterexamples
    Example {
        #[command(subcommand)]
        which: ExampleCmd,
    },
    /// Summarize a Frobenius tower file
    Tower(TowerArgs),
}

#[derive(Subcommand, Debug)]
pub enum ProfileCmd {
    /// Validate a profile file and print its slope statistics
    Check { path: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(64) } else { ExitCode::SUCCESS };
        }
    };
    let mut out = Emitter::new(cli.format);
    let result = match &cli.command {
        Command::Profile { action: ProfileCmd::Check { path } } => commands::profile::check(path, &mut out),
        Command::Bounds(args) => commands::bounds::run(args, &mut out),
        Command::Curve(args) => commands::curve::run(args, &cli, &mut out),
        Command::Example { which } => commands::example::run(which, &mut out),
        Command::Tower(args) => commands::tower::run(args, &mut out),
    };
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::BoundFailed) => ExitCode::from(3),
        Err(e) => {
            eprintln!("hnlab: {e}");
            e.exit_code()
        }
    }
}
