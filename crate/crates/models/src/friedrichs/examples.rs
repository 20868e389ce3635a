use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use weyl_numerics::{contour_integral_scalar, least_squares, CMatrix, CVector, Complex64, ContourSpec};

use super::model::{fr_D, fr_eigen_residual, fr_m, FriedrichsModel, BRACKET_ZERO_TOL};
use super::rational::{cauchy_merged, RationalH2};
use crate::error::ModelError;
use crate::Result;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `1/(x + i)`.
pub fn hardy_unit() -> RationalH2 {
    RationalH2::new(&[Complex64::new(0.0, -1.0)], &[one()]).expect("nonreal pole")
}

fn require_hardy(name: &str, f: &RationalH2) -> Result<()> {
    if !f.is_hardy_plus() {
        return Err(ModelError::Invalid(format!("{name} must have all its poles in the lower half plane")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardySample {
    pub lambda: Complex64,
    /// `None` where the bracket vanishes.
    pub m: Option<Complex64>,
    pub expected: Option<Complex64>,
    pub error: f64,
}

/// Both `φ` and `ψ` in `H²₊`: `M_B(λ) = (sign(Im λ) πi − B)^{-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example1Report {
    pub b: Complex64,
    pub samples: Vec<HardySample>,
    pub max_error: f64,
    /// Sampled points where M has a pole. For `B = ±πi` this is a whole
    /// half plane.
    pub bracket_zero: Vec<Complex64>,
}

pub fn fr_example1(model: &FriedrichsModel, lambdas: &[Complex64]) -> Result<Example1Report> {
    require_hardy("phi", &model.phi)?;
    require_hardy("psi", &model.psi)?;
    let mut samples = Vec::with_capacity(lambdas.len());
    let mut bracket_zero = Vec::new();
    for &lambda in lambdas {
        let target = Complex64::new(0.0, PI * lambda.im.signum()) - model.b;
        let expected = (target.norm() >= BRACKET_ZERO_TOL).then(|| 1.0 / target);
        let m = match fr_m(model, lambda) {
            Ok(m) => Some(m),
            Err(ModelError::BracketZero { .. }) => {
                bracket_zero.push(lambda);
                None
            }
            Err(e) => return Err(e),
        };
        let error = match (m, expected) {
            (Some(a), Some(b)) => (a - b).norm(),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        };
        samples.push(HardySample { lambda, m, expected, error });
    }
    let max_error = samples.iter().map(|s| s.error).fold(0.0, f64::max);
    Ok(Example1Report { b: model.b, samples, max_error, bracket_zero })
}

/// Checks of the solvability obstruction at an eigenvalue in the upper
/// half plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Obstruction {
    /// `⟨f/(x − λ0), φ⟩ / ‖f‖` for the probe `f`.
    pub inner_probe_phi: Complex64,
    /// Boundary parameters tried.
    pub parameters: Vec<Complex64>,
    /// Least-squares residual of `(A_C − λ0) g = f`, relative to `‖f‖`, for
    /// each parameter.
    pub residuals: Vec<f64>,
    pub min_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example2Report {
    pub lambda0: Complex64,
    /// `φ = scale · ψ`.
    pub scale: Complex64,
    pub d_at_lambda0: f64,
    /// `⟨u, φ⟩` for `u = ψ/(x − λ0)`; should be −1.
    pub u_phi: Complex64,
    pub gamma1_u: Complex64,
    pub gamma2_u: Complex64,
    pub eigen_residual: f64,
    /// `M_0` on a circle around `λ0`.
    pub m_on_circle: Complex64,
    /// `|∮ M_0 dλ|` around `λ0`.
    pub m_cauchy_integral: f64,
    pub obstruction: Option<Obstruction>,
}

/// An eigenvalue of `Ã*` restricted to `ker Γ2` that is not a pole of `M_0`.
///
/// `φ` is taken parallel to `ψ` and scaled so that `D(λ0) = 0`. In the lower
/// half plane the eigenfunction lies in the minimal domain. In the upper half
/// plane `(A_C − λ0) g = probe` is tested for solvability for several `C`;
/// the default probe is `1/(x + ½ + i)`.
pub fn fr_example2(psi: &RationalH2, lambda0: Complex64, probe: Option<&RationalH2>) -> Result<Example2Report> {
    require_hardy("psi", psi)?;
    if lambda0.im == 0.0 {
        return Err(ModelError::RealLambda(lambda0));
    }
    let base = fr_D(&FriedrichsModel::new(psi.clone(), psi.clone(), Complex64::new(0.0, 0.0))?, lambda0)? - 1.0;
    if base.norm() < 1e-14 {
        return Err(ModelError::ConstructionFailed(format!(
            "∫|ψ|²/(x − λ0) vanishes at λ0 = {lambda0}, so no multiple of ψ zeroes D"
        )));
    }
    let scale = (-1.0 / base).conj();
    let model = FriedrichsModel::new(psi.scale(scale), psi.clone(), Complex64::new(0.0, 0.0))?;
    let d = fr_D(&model, lambda0)?;
    let u = psi.div_linear(lambda0)?;
    let u_phi = u.inner(&model.phi);
    let eigen_residual = fr_eigen_residual(&model, &u, lambda0);

    let radius = 0.25 * lambda0.im.abs();
    let contour = ContourSpec::new(lambda0, radius, 128)?;
    let m_on_circle = fr_m(&model, lambda0 + radius)?;
    let m_cauchy_integral = contour_integral_scalar(|l| fr_m(&model, l), &contour)?.norm();

    let obstruction = if lambda0.im > 0.0 {
        let default_probe;
        let f = match probe {
            Some(f) => f,
            None => {
                default_probe = RationalH2::new(&[Complex64::new(-0.5, -1.0)], &[one()])?;
                &default_probe
            }
        };
        Some(obstruction(&model, lambda0, f)?)
    } else {
        None
    };

    Ok(Example2Report {
        lambda0,
        scale,
        d_at_lambda0: d.norm(),
        u_phi,
        gamma1_u: u.gamma1(),
        gamma2_u: u.gamma2(),
        eigen_residual,
        m_on_circle,
        m_cauchy_integral,
        obstruction,
    })
}

/// Solving `(Ã* − λ0) g = f` gives `g = (f + c − t ψ)/(x − λ0)` with
/// `c = Γ2 g` and `t = ⟨g, φ⟩`. Consistency of `t` and the boundary
/// condition `Γ1 g = C Γ2 g` form a 2×2 system in `(c, t)`.
fn obstruction(model: &FriedrichsModel, lambda0: Complex64, probe: &RationalH2) -> Result<Obstruction> {
    let norm = probe.norm();
    if !(norm > 0.0) {
        return Err(ModelError::Invalid("probe must be nonzero".into()));
    }
    let f = probe.scale(Complex64::new(1.0 / norm, 0.0));
    let d = fr_D(model, lambda0)?;
    let resolvent_kernel = RationalH2::pole_term(lambda0, 1, one())?;
    let f_shift = f.div_linear(lambda0)?;
    let psi_shift = model.psi.div_linear(lambda0)?;
    let kernel_phi = cauchy_merged(&model.phi, lambda0)?;
    let inner_probe_phi = f_shift.inner(&model.phi);

    let parameters = vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(-2.5, 0.0),
        Complex64::new(0.0, PI),
        Complex64::new(0.3, -0.7),
    ];
    let mut residuals = Vec::with_capacity(parameters.len());
    for &c in &parameters {
        let a = CMatrix::from_row_slice(
            2,
            2,
            &[-kernel_phi, d, resolvent_kernel.gamma1() - c, -psi_shift.gamma1()],
        );
        let rhs = CVector::from_vec(vec![inner_probe_phi, -f_shift.gamma1()]);
        let (_, r) = least_squares(&a, &rhs, 1e-12)?;
        residuals.push(r);
    }
    let min_residual = residuals.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Obstruction { inner_probe_phi, parameters, residuals, min_residual })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example3Report {
    pub lambda0: f64,
    pub b: Complex64,
    /// `∫ g̃ conj((x − λ0) g̃)`; must be negative.
    pub k: f64,
    pub s: f64,
    pub psi_at_lambda0: Complex64,
    pub eigen_residual: f64,
    pub gamma1_v: Complex64,
    pub gamma2_v: Complex64,
    pub eps: f64,
    pub m_plus: Complex64,
    pub m_minus: Complex64,
    pub jump: Complex64,
    pub expected_jump: Complex64,
    pub jump_error: f64,
    /// `max |M(λ̄) − conj M(λ)|` over sample points; only meaningful for
    /// real `B`.
    pub symmetry_error: f64,
}

/// An embedded eigenvalue `λ0 ∈ ℝ` with `φ = ψ` that M does not see.
///
/// `ψ = s (x − λ0) g̃`, where `g̃ = g` if `c_g = 0` and `g/(x + i)`
/// otherwise, and `s² K = −1`. The eigenfunction is `v = s g̃`.
pub fn fr_example3(g: &RationalH2, lambda0: f64, b: Complex64, eps: f64) -> Result<Example3Report> {
    require_hardy("g", g)?;
    if !lambda0.is_finite() || !(eps > 0.0) {
        return Err(ModelError::Invalid(format!("need finite λ0 and positive ε, got {lambda0}, {eps}")));
    }
    let g_tilde = if g.c_limit().norm() == 0.0 { g.clone() } else { g.mul(&hardy_unit()) };
    let c_g = g_tilde.c_limit();
    if c_g.norm() != 0.0 {
        return Err(ModelError::ConstructionFailed("g̃ must decay like |x|^-2".into()));
    }
    let shifted = g_tilde.times_x_minus_c().sub(&g_tilde.scale(Complex64::new(lambda0, 0.0)));
    let k_complex = g_tilde.inner(&shifted);
    let k = k_complex.re;
    if !(k < 0.0) || k_complex.im.abs() > 1e-12 * (1.0 + k.abs()) {
        return Err(ModelError::ConstructionFailed(format!(
            "∫ g̃ conj((x − λ0) g̃) = {k_complex} is not negative, so no real scaling gives ⟨v, ψ⟩ = −1"
        )));
    }
    let s = (-1.0 / k).sqrt();
    let psi = shifted.scale(Complex64::new(s, 0.0));
    let v = g_tilde.scale(Complex64::new(s, 0.0));
    let model = FriedrichsModel::new(psi.clone(), psi.clone(), b)?;
    let l0 = Complex64::new(lambda0, 0.0);
    let eigen_residual = fr_eigen_residual(&model, &v, l0);

    let m_plus = fr_m(&model, Complex64::new(lambda0, eps))?;
    let m_minus = fr_m(&model, Complex64::new(lambda0, -eps))?;
    let jump = m_plus - m_minus;
    let expected_jump = 1.0 / (Complex64::new(0.0, PI) - b) - 1.0 / (Complex64::new(0.0, -PI) - b);

    let mut symmetry_error: f64 = 0.0;
    for lambda in [
        Complex64::new(lambda0, eps),
        Complex64::new(lambda0 + 1.0, 0.5),
        Complex64::new(lambda0 - 2.0, 3.0),
        Complex64::new(lambda0 + 0.25, 1e-3),
    ] {
        let up = fr_m(&model, lambda)?;
        let down = fr_m(&model, lambda.conj())?;
        symmetry_error = symmetry_error.max((down - up.conj()).norm());
    }

    Ok(Example3Report {
        lambda0,
        b,
        k,
        s,
        psi_at_lambda0: psi.eval(lambda0),
        eigen_residual,
        gamma1_v: v.gamma1(),
        gamma2_v: v.gamma2(),
        eps,
        m_plus,
        m_minus,
        jump,
        expected_jump,
        jump_error: (jump - expected_jump).norm(),
        symmetry_error,
    })
}
