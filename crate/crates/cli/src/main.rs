use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use weyl_scope::{run, Command, Invocation};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Check,
    Scan,
    Eig,
    Contour,
    Example,
}

/// Numerical checks and scans for Titchmarsh-Weyl M-functions.
#[derive(Debug, Parser)]
#[command(name = "weyl-scope", version)]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for random triples and sample points.
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance for every upper-bound check without its own override.
    #[arg(long)]
    tol: Option<f64>,
}

fn main() {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let command = match args.command {
        Cmd::Check => Command::Check,
        Cmd::Scan => Command::Scan,
        Cmd::Eig => Command::Eig,
        Cmd::Contour => Command::Contour,
        Cmd::Example => Command::Example,
    };
    let inv = Invocation { command, config: args.config, out: args.out, seed: args.seed, tol: args.tol };
    std::process::exit(run(&inv));
}
