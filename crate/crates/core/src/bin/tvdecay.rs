use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tvdecay::cli::{run, Command, RunOptions};

#[derive(Parser)]
#[command(name = "tvdecay", version, about = "TV decay bounds for 1-D diffusions")]
struct Args {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Common {
    /// scenario file
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// number of points of the bounds time grid
    #[arg(long)]
    t_grid: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// inequality constants of the scenario measure
    Analyze(Common),
    /// theoretical envelopes on a log-spaced time grid
    Bounds(Common),
    /// Fokker-Planck simulation and its functionals
    Simulate(Common),
    /// simulation against envelopes, with domination summary
    Compare(Common),
}

fn main() -> ExitCode {
    let args = Args::parse();
    let (command, c) = match args.command {
        Cmd::Analyze(c) => (Command::Analyze, c),
        Cmd::Bounds(c) => (Command::Bounds, c),
        Cmd::Simulate(c) => (Command::Simulate, c),
        Cmd::Compare(c) => (Command::Compare, c),
    };
    let opts = RunOptions {
        command,
        config: c.config,
        out: c.out,
        t_grid: c.t_grid,
        seed: c.seed,
    };
    match run(&opts) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("tvdecay: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
