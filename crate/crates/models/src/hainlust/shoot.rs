use serde::{Deserialize, Serialize};
use weyl_numerics::{CMatrix, Complex64};

use super::coeff::eval_poly;
use super::{cot, Cell, HlModel, SINGULAR_CLEARANCE};
use crate::error::ModelError;
use crate::Result;

pub const DEFAULT_ODE_TOL: f64 = 1e-10;

const MAX_STEPS: usize = 1_000_000;
const MAX_REFINEMENTS: usize = 4;

/// Values at `x = 1` of the solutions with `y1(0) = cos α, y1′(0) = sin α`
/// and `y2(0) = −sin α, y2′(0) = cos α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingResult {
    pub lambda: Complex64,
    pub y1_at_1: Complex64,
    pub dy1_at_1: Complex64,
    pub y2_at_1: Complex64,
    pub dy2_at_1: Complex64,
    /// Step tolerance actually used.
    pub ode_tol: f64,
    pub steps: usize,
}

impl ShootingResult {
    pub fn wronskian(&self) -> Complex64 {
        self.y1_at_1 * self.dy2_at_1 - self.dy1_at_1 * self.y2_at_1
    }

    /// `y2′(1) + cot β y2(1)`, which vanishes exactly at eigenvalues.
    pub fn denominator(&self, beta: f64) -> Complex64 {
        self.dy2_at_1 + self.y2_at_1 * cot(beta)
    }
}

// Dormand-Prince 5(4).
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

type State = [Complex64; 4];

fn rhs(cell: &Cell<'_>, lambda: Complex64, x: f64, y: &State) -> State {
    let w = eval_poly(cell.w, x);
    let mut c = eval_poly(cell.q, x) - lambda;
    if w.norm() != 0.0 {
        c += w * w / (lambda - eval_poly(cell.u, x));
    }
    [y[1], c * y[0], y[3], c * y[2]]
}

fn axpy(y: &State, h: f64, coeffs: &[f64], k: &[State]) -> State {
    let mut out = *y;
    for (a, ki) in coeffs.iter().zip(k) {
        if *a != 0.0 {
            for i in 0..4 {
                out[i] += ki[i] * (h * a);
            }
        }
    }
    out
}

fn integrate(model: &HlModel, lambda: Complex64, tol: f64) -> Result<(State, usize)> {
    let (sa, ca) = model.alpha.sin_cos();
    let mut y: State = [
        Complex64::new(ca, 0.0),
        Complex64::new(sa, 0.0),
        Complex64::new(-sa, 0.0),
        Complex64::new(ca, 0.0),
    ];
    let mut steps = 0;
    let mut h = 1e-2;
    for cell in model.ode_cells() {
        let mut x = cell.a;
        let mut k = [[Complex64::new(0.0, 0.0); 4]; 7];
        k[0] = rhs(&cell, lambda, x, &y);
        while x < cell.b {
            let last = x + h >= cell.b;
            let step = if last { cell.b - x } else { h };
            for s in 1..7 {
                let ys = axpy(&y, step, &A[s][..s], &k[..s]);
                k[s] = rhs(&cell, lambda, x + C[s] * step, &ys);
            }
            let y5 = axpy(&y, step, &B5, &k);
            let mut err: f64 = 0.0;
            for i in 0..4 {
                let e: Complex64 = (0..7).map(|s| k[s][i] * (B5[s] - B4[s])).sum::<Complex64>() * step;
                let scale = tol * (1.0 + y[i].norm().max(y5[i].norm()));
                err = err.max(e.norm() / scale);
            }
            steps += 1;
            if steps > MAX_STEPS || !err.is_finite() {
                return Err(ModelError::ToleranceNotMet { tol, x });
            }
            if err <= 1.0 {
                x = if last { cell.b } else { x + step };
                y = y5;
                k[0] = k[6];
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            let next = step * factor;
            if err <= 1.0 && last {
                h = h.max(next);
            } else {
                h = next;
            }
            if h < 1e-14 * (cell.b - cell.a) {
                return Err(ModelError::ToleranceNotMet { tol, x });
            }
        }
    }
    Ok((y, steps))
}

/// Integrates both initial value problems across `[0, 1]` with an adaptive
/// Dormand-Prince 5(4) method, restarting at every coefficient breakpoint.
///
/// The Wronskian `y1 y2′ − y1′ y2` equals one exactly. If the computed one
/// is off by more than `10 tol` the integration is repeated with a tighter
/// step tolerance, a few times at most.
pub fn hl_shoot(model: &HlModel, lambda: Complex64, tol: f64) -> Result<ShootingResult> {
    if !(tol > 0.0) {
        return Err(ModelError::Invalid(format!("ODE tolerance must be positive, got {tol}")));
    }
    let distance = model.singular_distance(lambda);
    if distance <= SINGULAR_CLEARANCE {
        return Err(ModelError::CoefficientSingular { lambda, distance });
    }
    let mut step_tol = tol;
    for _ in 0..=MAX_REFINEMENTS {
        let (y, steps) = integrate(model, lambda, step_tol)?;
        let out = ShootingResult {
            lambda,
            y1_at_1: y[0],
            dy1_at_1: y[1],
            y2_at_1: y[2],
            dy2_at_1: y[3],
            ode_tol: step_tol,
            steps,
        };
        if (out.wronskian() - 1.0).norm() <= 10.0 * tol {
            return Ok(out);
        }
        step_tol /= 10.0;
    }
    Err(ModelError::ToleranceNotMet { tol, x: 1.0 })
}

/// The M-matrix at `λ`, with the shooting data it came from.
pub fn hl_m_matrix_with(model: &HlModel, lambda: Complex64, tol: f64) -> Result<(CMatrix, ShootingResult)> {
    let s = hl_shoot(model, lambda, tol)?;
    let den = s.denominator(model.beta);
    if den.norm() < 1e-12 {
        return Err(ModelError::AtEigenvalue { lambda, denominator: den.norm() });
    }
    let (sa, ca) = model.alpha.sin_cos();
    let cb = cot(model.beta);
    let m11 = -s.y2_at_1 / den;
    let m12 = Complex64::new(sa, 0.0) / den;
    let m22 = sa * ca + sa * sa * (s.dy1_at_1 + s.y1_at_1 * cb) / den;
    Ok((CMatrix::from_row_slice(2, 2, &[m11, m12, m12, m22]), s))
}

pub fn hl_m_matrix(model: &HlModel, lambda: Complex64) -> Result<CMatrix> {
    Ok(hl_m_matrix_with(model, lambda, DEFAULT_ODE_TOL)?.0)
}
