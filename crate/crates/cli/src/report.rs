use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{CliError, Result};

/// How a residual is compared with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    /// Passes when `residual < tolerance`.
    Below,
    /// Passes when `residual ≥ tolerance`.
    Above,
    /// A quantity that should be large: reported as `expected-nonzero`
    /// when `residual > tolerance`, as a failure otherwise.
    Nonzero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    ExpectedNonzero,
}

impl Status {
    pub fn ok(self) -> bool {
        self != Status::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub status: Status,
    /// The identity or statement checked.
    pub anchor: &'static str,
}

/// Default tolerances of a suite, with overrides from the config and the
/// command line.
#[derive(Debug, Clone)]
pub struct Tolerances {
    table: BTreeMap<&'static str, (f64, Bound, &'static str)>,
    overrides: BTreeMap<String, f64>,
    global: Option<f64>,
}

impl Tolerances {
    /// `entries` lists `(name, default tolerance, bound, anchor)`.
    pub fn new(
        entries: &[(&'static str, f64, Bound, &'static str)],
        overrides: &BTreeMap<String, f64>,
        global: Option<f64>,
    ) -> Result<Self> {
        let table: BTreeMap<_, _> = entries.iter().map(|&(n, t, b, a)| (n, (t, b, a))).collect();
        if let Some(unknown) = overrides.keys().find(|k| !table.contains_key(k.as_str())) {
            let known: Vec<_> = table.keys().copied().collect();
            return Err(CliError::Config(format!("unknown tolerance {unknown:?} (known: {})", known.join(", "))));
        }
        if let Some(t) = global {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Config(format!("--tol {t} must be positive")));
            }
        }
        Ok(Self { table, overrides: overrides.clone(), global })
    }

    /// Tolerance for `name`. `--tol` replaces the defaults of upper-bound
    /// checks; a per-check override wins over both.
    pub fn get(&self, name: &str) -> f64 {
        let (default, bound, _) = self.table[name];
        if let Some(&t) = self.overrides.get(name) {
            return t;
        }
        match (bound, self.global) {
            (Bound::Below, Some(g)) => g,
            _ => default,
        }
    }

    pub fn check(&self, name: &'static str, residual: f64) -> Check {
        let (_, bound, anchor) = self.table[name];
        let tolerance = self.get(name);
        let status = match bound {
            Bound::Below if residual < tolerance => Status::Pass,
            Bound::Above if residual >= tolerance => Status::Pass,
            Bound::Nonzero if residual > tolerance => Status::ExpectedNonzero,
            _ => Status::Fail,
        };
        Check { name: name.to_string(), residual, tolerance, bound, status, anchor }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report<T: Serialize> {
    pub command: &'static str,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub details: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: &'static str, seed: u64, checks: Vec<Check>, details: T) -> Self {
        let passed = checks.iter().all(|c| c.status.ok());
        Self { command, seed, passed, checks, details }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}
