use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use weyl_numerics::Complex64;

use super::rational::{cauchy_merged, RationalH2};
use crate::error::ModelError;
use crate::Result;

/// Below this `|D(λ)|` the M formula is not evaluated.
pub const D_ZERO_TOL: f64 = 1e-12;
/// Below this the bracket is treated as zero and `λ` as a pole of M.
pub const BRACKET_ZERO_TOL: f64 = 1e-12;

/// `(A f)(x) = x f(x) + ⟨f, φ⟩ ψ(x)` on `L²(ℝ)`, paired with `Ã`, which
/// swaps `φ` and `ψ`, and the boundary parameter `B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FriedrichsModel {
    pub phi: RationalH2,
    pub psi: RationalH2,
    #[serde(rename = "B")]
    pub b: Complex64,
}

impl FriedrichsModel {
    pub fn new(phi: RationalH2, psi: RationalH2, b: Complex64) -> Result<Self> {
        if !(b.re.is_finite() && b.im.is_finite()) {
            return Err(ModelError::Invalid(format!("B = {b} must be finite")));
        }
        Ok(Self { phi, psi, b })
    }

    pub fn with_b(&self, b: Complex64) -> Self {
        Self { b, ..self.clone() }
    }
}

fn check_nonreal(lambda: Complex64) -> Result<()> {
    if lambda.im == 0.0 || !lambda.im.is_finite() || !lambda.re.is_finite() {
        return Err(ModelError::RealLambda(lambda));
    }
    Ok(())
}

/// `D(λ) = 1 + ∫ ψ(x) conj(φ(x)) / (x − λ) dx`.
#[allow(non_snake_case)]
pub fn fr_D(model: &FriedrichsModel, lambda: Complex64) -> Result<Complex64> {
    check_nonreal(lambda)?;
    let integrand = model.psi.mul(&model.phi.conj());
    Ok(1.0 + integrand.div_linear(lambda)?.line_integral())
}

/// The pieces of the M formula at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MParts {
    pub d: Complex64,
    /// `sign(Im λ) πi − ⟨(x−λ)^{-1}, ψ̄⟩⟨(x−λ)^{-1}, φ⟩ / D − B`.
    pub bracket: Complex64,
}

pub fn fr_m_parts(model: &FriedrichsModel, lambda: Complex64) -> Result<MParts> {
    let d = fr_D(model, lambda)?;
    if d.norm() < D_ZERO_TOL {
        return Err(ModelError::DZero { lambda, abs: d.norm() });
    }
    let along_psi = cauchy_merged(&model.psi.conj(), lambda)?;
    let along_phi = cauchy_merged(&model.phi, lambda)?;
    let side = Complex64::new(0.0, PI * lambda.im.signum());
    Ok(MParts { d, bracket: side - along_psi * along_phi / d - model.b })
}

/// `M_B(λ) = [sign(Im λ) πi − ⟨(x−λ)^{-1}, ψ̄⟩⟨(x−λ)^{-1}, φ⟩ / D(λ) − B]^{-1}`.
pub fn fr_m(model: &FriedrichsModel, lambda: Complex64) -> Result<Complex64> {
    let parts = fr_m_parts(model, lambda)?;
    if parts.bracket.norm() < BRACKET_ZERO_TOL {
        return Err(ModelError::BracketZero { lambda, abs: parts.bracket.norm() });
    }
    Ok(1.0 / parts.bracket)
}

/// The element of `ker(Ã* − λ)` with `Γ2 f = c`:
/// `f = (c − t ψ) / (x − λ)` with `t D(λ) = c ⟨(x−λ)^{-1}, φ⟩`.
pub fn fr_kernel_element(model: &FriedrichsModel, lambda: Complex64, c: Complex64) -> Result<RationalH2> {
    let d = fr_D(model, lambda)?;
    if d.norm() < D_ZERO_TOL {
        return Err(ModelError::DZero { lambda, abs: d.norm() });
    }
    let t = c * cauchy_merged(&model.phi, lambda)? / d;
    let resolvent_kernel = RationalH2::pole_term(lambda, 1, c)?;
    Ok(resolvent_kernel.sub(&model.psi.div_linear(lambda)?.scale(t)))
}

/// `M_B(λ)` from the boundary values of the kernel element,
/// `Γ2 f / (Γ1 f − B Γ2 f)`.
pub fn fr_m_direct(model: &FriedrichsModel, lambda: Complex64) -> Result<Complex64> {
    let f = fr_kernel_element(model, lambda, Complex64::new(1.0, 0.0))?;
    let den = f.gamma1() - model.b * f.gamma2();
    if den.norm() < BRACKET_ZERO_TOL {
        return Err(ModelError::BracketZero { lambda, abs: den.norm() });
    }
    Ok(f.gamma2() / den)
}

/// `Ã* f = x f − c_f 𝟙 + ⟨f, φ⟩ ψ`.
pub fn fr_adjoint_apply(model: &FriedrichsModel, f: &RationalH2) -> RationalH2 {
    f.times_x_minus_c().add(&model.psi.scale(f.inner(&model.phi)))
}

/// `A* f = x f − c_f 𝟙 + ⟨f, ψ⟩ φ`.
pub fn fr_maximal_apply(model: &FriedrichsModel, f: &RationalH2) -> RationalH2 {
    f.times_x_minus_c().add(&model.phi.scale(f.inner(&model.psi)))
}

/// `|⟨A*f, g⟩ − ⟨f, Ã*g⟩ − Γ1f conj(Γ2g) + Γ2f conj(Γ1g)|`.
pub fn fr_green_residual(model: &FriedrichsModel, f: &RationalH2, g: &RationalH2) -> Complex64 {
    let lhs = fr_maximal_apply(model, f).inner(g) - f.inner(&fr_adjoint_apply(model, g));
    let (g1f, g2f) = (f.gamma1(), f.gamma2());
    let (g1g, g2g) = (g.gamma1(), g.gamma2());
    lhs - (g1f * g2g.conj() - g2f * g1g.conj())
}

/// 2001 Chebyshev–Lobatto points on `[−50, 50]`.
pub fn evaluation_grid() -> Vec<f64> {
    const N: usize = 2000;
    (0..=N).map(|j| -50.0 * (PI * j as f64 / N as f64).cos()).collect()
}

/// Points beyond the grid at which residuals are also sampled.
pub fn tail_points() -> Vec<f64> {
    (2..=6).flat_map(|k| [-(10f64.powi(k)), 10f64.powi(k)]).collect()
}

/// `sup |r(x)|` over the evaluation grid and the tail points.
pub fn sup_on_grid(r: impl Fn(f64) -> Complex64) -> f64 {
    evaluation_grid().into_iter().chain(tail_points()).map(|x| r(x).norm()).fold(0.0, f64::max)
}

/// Pointwise `sup |(Ã* − λ) u|` for a claimed eigenfunction `u`.
pub fn fr_eigen_residual(model: &FriedrichsModel, u: &RationalH2, lambda: Complex64) -> f64 {
    let c = u.c_limit();
    let t = u.inner(&model.phi);
    sup_on_grid(|x| x * u.eval(x) - c + t * model.psi.eval(x) - lambda * u.eval(x))
}

/// One row of a Friedrichs M scan. `m` is NaN where `D` or the bracket
/// vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrScanRow {
    pub lambda: Complex64,
    pub m: Complex64,
    pub abs_d: f64,
    pub bracket_abs: f64,
}

pub fn fr_m_scan(model: &FriedrichsModel, grid: &[Complex64]) -> Result<Vec<FrScanRow>> {
    let nan = Complex64::new(f64::NAN, f64::NAN);
    grid.iter()
        .map(|&lambda| match fr_m_parts(model, lambda) {
            Ok(p) => {
                let m = if p.bracket.norm() < BRACKET_ZERO_TOL { nan } else { 1.0 / p.bracket };
                Ok(FrScanRow { lambda, m, abs_d: p.d.norm(), bracket_abs: p.bracket.norm() })
            }
            Err(ModelError::DZero { abs, .. }) => Ok(FrScanRow { lambda, m: nan, abs_d: abs, bracket_abs: f64::NAN }),
            Err(e) => Err(e),
        })
        .collect()
}

/// `|M(x + iε) − M(x − iε)|` at each `x`.
pub fn fr_jump(model: &FriedrichsModel, xs: &[f64], eps: f64) -> Result<Vec<f64>> {
    if !(eps > 0.0) {
        return Err(ModelError::Invalid(format!("ε = {eps} must be positive")));
    }
    xs.iter()
        .map(|&x| Ok((fr_m(model, Complex64::new(x, eps))? - fr_m(model, Complex64::new(x, -eps))?).norm()))
        .collect()
}
