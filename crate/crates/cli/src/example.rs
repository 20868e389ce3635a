//! Registry behind `weyl-scope example`: the rank-one Friedrichs examples.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use weyl_models::friedrichs::{fr_example1, fr_example2, fr_example3, hardy_unit, FriedrichsModel, RationalH2};
use weyl_numerics::Complex64;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::report::{Bound, Check, Report, Tolerances};

/// Checks and a JSON payload produced by one example.
pub struct ExampleOutcome {
    pub checks: Vec<Check>,
    pub details: Value,
}

pub trait Example: Sync {
    fn name(&self) -> &'static str;
    fn tolerances(&self) -> &'static [(&'static str, f64, Bound, &'static str)];
    fn run(&self, cfg: &RunConfig, seed: u64, tols: &Tolerances) -> Result<ExampleOutcome>;
}

pub fn examples() -> Vec<Box<dyn Example>> {
    vec![Box::new(HardyFormula), Box::new(NotAPole { upper: false }), Box::new(NotAPole { upper: true }), Box::new(Embedded)]
}

pub fn find_example(name: &str) -> Result<Box<dyn Example>> {
    let all = examples();
    let known = all.iter().map(|e| e.name()).collect::<Vec<_>>().join(", ");
    all.into_iter()
        .find(|e| e.name() == name)
        .ok_or_else(|| CliError::ExampleUnknown { name: name.to_string(), known })
}

pub fn run_example(cfg: &RunConfig, seed: u64, tol: Option<f64>) -> Result<Report<Value>> {
    let name = cfg.example.as_deref().ok_or_else(|| CliError::Config("`example` is required".into()))?;
    let ex = find_example(name)?;
    let tols = Tolerances::new(ex.tolerances(), &cfg.tolerances, tol)?;
    let out = ex.run(cfg, seed, &tols)?;
    Ok(Report::new("example", seed, out.checks, out.details))
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

/// Nonreal points with `|Re λ| ≤ 5` and `10^-3 ≤ |Im λ| ≤ 5`, half in each
/// half plane.
pub fn random_nonreal(rng: &mut ChaCha8Rng, count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|j| {
            let y = 10f64.powf(rng.gen_range(-3.0..5f64.log10()));
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(rng.gen_range(-5.0..5.0), sign * y)
        })
        .collect()
}

struct HardyFormula;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct HardyParams {
    phi: Option<RationalH2>,
    psi: Option<RationalH2>,
    #[serde(rename = "B", default)]
    b: Complex64,
    lambdas: Option<Vec<Complex64>>,
    count: Option<usize>,
}

impl Example for HardyFormula {
    fn name(&self) -> &'static str {
        "ex1"
    }

    fn tolerances(&self) -> &'static [(&'static str, f64, Bound, &'static str)] {
        &[("m_formula", 1e-9, Bound::Below, "M_B(λ) = (sign(Im λ)πi − B)^{-1} for φ, ψ ∈ H²₊")]
    }

    fn run(&self, cfg: &RunConfig, seed: u64, tols: &Tolerances) -> Result<ExampleOutcome> {
        let p: HardyParams = cfg.params_as()?;
        let model = match cfg.model_as::<FriedrichsModel>()? {
            Some(m) => m,
            None => FriedrichsModel::new(
                p.phi.unwrap_or_else(hardy_unit),
                p.psi.unwrap_or_else(hardy_unit),
                p.b,
            )?,
        };
        let lambdas = match p.lambdas {
            Some(l) => l,
            None => random_nonreal(&mut ChaCha8Rng::seed_from_u64(seed), p.count.unwrap_or(100)),
        };
        let r = fr_example1(&model, &lambdas)?;
        let half_plane = |sign: f64| {
            let side: Vec<_> = lambdas.iter().filter(|l| l.im.signum() == sign).collect();
            !side.is_empty() && side.iter().all(|l| r.bracket_zero.contains(l))
        };
        let regime = match (half_plane(1.0), half_plane(-1.0)) {
            (true, _) => Some("upper half plane filled with eigenvalues"),
            (_, true) => Some("lower half plane filled with eigenvalues"),
            _ => None,
        };
        let mut details = to_value(&r);
        details["regime"] = to_value(&regime);
        details["model"] = to_value(&model);
        Ok(ExampleOutcome { checks: vec![tols.check("m_formula", r.max_error)], details })
    }
}

struct NotAPole {
    upper: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NotAPoleParams {
    psi: Option<RationalH2>,
    lambda0: Option<Complex64>,
    probe: Option<RationalH2>,
}

const NOT_A_POLE_LOWER: &[(&str, f64, Bound, &str)] = &[
    ("d_zero", 1e-12, Bound::Below, "D(λ0) = 0 after scaling φ"),
    ("u_phi", 1e-9, Bound::Below, "⟨u, φ⟩ = −1 for u = ψ/(x − λ0)"),
    ("gamma2_abs", 1e-9, Bound::Below, "Γ2u = 0"),
    ("gamma1_abs", 1e-9, Bound::Below, "Γ1u = 0, so u lies in the minimal domain"),
    ("eigen_residual", 1e-7, Bound::Below, "(Ã* − λ0)u = 0 on the evaluation grid"),
    ("m_pole_residual", 1e-10, Bound::Below, "∮ M_0 = 0 around λ0: the eigenvalue is not a pole"),
];

const NOT_A_POLE_UPPER: &[(&str, f64, Bound, &str)] = &[
    ("d_zero", 1e-12, Bound::Below, "D(λ0) = 0 after scaling φ"),
    ("u_phi", 1e-9, Bound::Below, "⟨u, φ⟩ = −1 for u = ψ/(x − λ0)"),
    ("gamma2_abs", 1e-9, Bound::Below, "Γ2u = 0"),
    ("eigen_residual", 1e-7, Bound::Below, "(Ã* − λ0)u = 0 on the evaluation grid"),
    ("m_pole_residual", 1e-10, Bound::Below, "∮ M_0 = 0 around λ0: the eigenvalue is not a pole"),
    ("obstruction", 1e-2, Bound::Above, "(A_C − λ0)g = f has no solution for any C"),
];

impl Example for NotAPole {
    fn name(&self) -> &'static str {
        if self.upper {
            "ex2-upper"
        } else {
            "ex2-lower"
        }
    }

    fn tolerances(&self) -> &'static [(&'static str, f64, Bound, &'static str)] {
        if self.upper {
            NOT_A_POLE_UPPER
        } else {
            NOT_A_POLE_LOWER
        }
    }

    fn run(&self, cfg: &RunConfig, _seed: u64, tols: &Tolerances) -> Result<ExampleOutcome> {
        let p: NotAPoleParams = cfg.params_as()?;
        let lambda0 = p.lambda0.unwrap_or(if self.upper { Complex64::new(0.0, 2.0) } else { Complex64::new(0.0, -1.0) });
        if (lambda0.im > 0.0) != self.upper {
            let half = if self.upper { "upper" } else { "lower" };
            return Err(CliError::Config(format!("{} needs λ0 in the {half} half plane, got {lambda0}", self.name())));
        }
        let psi = p.psi.unwrap_or_else(hardy_unit);
        let r = fr_example2(&psi, lambda0, p.probe.as_ref())?;
        let mut checks = vec![
            tols.check("d_zero", r.d_at_lambda0),
            tols.check("u_phi", (r.u_phi + 1.0).norm()),
            tols.check("gamma2_abs", r.gamma2_u.norm()),
        ];
        if !self.upper {
            checks.push(tols.check("gamma1_abs", r.gamma1_u.norm()));
        }
        checks.push(tols.check("eigen_residual", r.eigen_residual));
        checks.push(tols.check("m_pole_residual", r.m_cauchy_integral));
        if let Some(ob) = &r.obstruction {
            checks.push(tols.check("obstruction", ob.min_residual));
        }
        Ok(ExampleOutcome { checks, details: to_value(&r) })
    }
}

struct Embedded;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct EmbeddedParams {
    g: Option<RationalH2>,
    lambda0: f64,
    #[serde(rename = "B")]
    b: Complex64,
    eps: f64,
}

impl Default for EmbeddedParams {
    fn default() -> Self {
        Self { g: None, lambda0: 1.0, b: Complex64::new(0.0, 0.0), eps: 1e-6 }
    }
}

impl Example for Embedded {
    fn name(&self) -> &'static str {
        "ex3"
    }

    fn tolerances(&self) -> &'static [(&'static str, f64, Bound, &'static str)] {
        &[
            ("eigen_residual", 1e-7, Bound::Below, "(Ã* − λ0)v = 0 at the real point λ0"),
            ("m_jump", 1e-9, Bound::Below, "M(λ0 + iε) − M(λ0 − iε) equals the jump of (sign(Im λ)πi − B)^{-1}"),
            ("symmetry", 1e-9, Bound::Below, "M(λ̄) = conj M(λ) for φ = ψ and real B"),
        ]
    }

    fn run(&self, cfg: &RunConfig, _seed: u64, tols: &Tolerances) -> Result<ExampleOutcome> {
        let p: EmbeddedParams = cfg.params_as()?;
        let g = match p.g {
            Some(g) => g,
            None => RationalH2::pole_term(Complex64::new(0.0, -1.0), 2, Complex64::new(1.0, 0.0))?,
        };
        let r = fr_example3(&g, p.lambda0, p.b, p.eps)?;
        let mut checks = vec![tols.check("eigen_residual", r.eigen_residual), tols.check("m_jump", r.jump_error)];
        if p.b.im == 0.0 {
            checks.push(tols.check("symmetry", r.symmetry_error));
        }
        let mut details = to_value(&r);
        details["normalization_squared_times_pi"] = to_value(&(r.s * r.s * PI));
        Ok(ExampleOutcome { checks, details })
    }
}
