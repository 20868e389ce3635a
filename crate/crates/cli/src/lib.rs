//! `weyl-scope`: identity checks, M-function scans, eigenvalue searches,
//! contour integrals and worked examples, driven by JSON configs.

pub mod check;
pub mod config;
pub mod contour;
pub mod eig;
pub mod error;
pub mod example;
pub mod report;
pub mod scan;
pub mod table;

use std::path::PathBuf;

pub use config::{RunConfig, DEFAULT_SEED};
pub use error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Check,
    Scan,
    Eig,
    Contour,
    Example,
}

#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

/// Text to write and whether every check passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub passed: bool,
}

/// Runs a command without touching the filesystem beyond reading inputs.
pub fn execute(inv: &Invocation) -> Result<Outcome> {
    let cfg = match &inv.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let seed = inv.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    Ok(match inv.command {
        Command::Check => {
            let r = check::run_check(&cfg, seed, inv.tol)?;
            Outcome { passed: r.passed, output: r.to_json() }
        }
        Command::Scan => Outcome { output: scan::run_scan(&cfg)?.to_csv(), passed: true },
        Command::Eig => {
            let r = eig::run_eig(&cfg, seed, inv.tol)?;
            Outcome { passed: r.passed, output: r.to_json() }
        }
        Command::Contour => {
            let r = contour::run_contour(&cfg, seed)?;
            let mut output = serde_json::to_string_pretty(&r).expect("reports serialize");
            output.push('\n');
            Outcome { output, passed: true }
        }
        Command::Example => {
            let r = example::run_example(&cfg, seed, inv.tol)?;
            Outcome { passed: r.passed, output: r.to_json() }
        }
    })
}

/// Executes, writes the output to `--out` or stdout, and returns the exit
/// code: 0 when everything passed, 1 on a failed check or runtime error,
/// 2 on a bad configuration.
pub fn run(inv: &Invocation) -> i32 {
    let outcome = match execute(inv) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("weyl-scope: {e}");
            return e.exit_code();
        }
    };
    let written = match &inv.out {
        Some(path) => std::fs::write(path, &outcome.output)
            .map_err(|e| CliError::Output { path: path.display().to_string(), message: e.to_string() }),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(outcome.output.as_bytes())
                .map_err(|e| CliError::Output { path: "stdout".into(), message: e.to_string() })
        }
    };
    if let Err(e) = written {
        eprintln!("weyl-scope: {e}");
        return e.exit_code();
    }
    if outcome.passed {
        0
    } else {
        1
    }
}
