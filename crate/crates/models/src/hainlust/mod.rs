//! Block operator `[−d²/dx² + q, w; w, u]` on `L²(0,1) ⊕ L²(0,1)` with
//! Robin conditions `y′(0) + cot α y(0) = 0`, `y′(1) + cot β y(1) = 0`.
//!
//! Coefficients are piecewise polynomials. Away from the essential range
//! of `u` on `W = {w ≠ 0}` the M-matrix is computed by shooting the scalar
//! equation `−y″ + (q − λ)y + w²/(λ − u) y = 0`.

mod coeff;
mod discrete;
mod essran;
mod roots;
mod shoot;

use serde::{Deserialize, Serialize};

pub use coeff::Piecewise;
pub use discrete::{
    hl_bordered_jump, hl_bordered_scan, hl_discrete_eig_near, hl_discretize, hl_reducing_check,
    hl_reducing_check_with, BorderedRow, Discretization, DEFAULT_SCAN_EPSILON, DEFAULT_SCAN_NODES,
};
pub use essran::{hl_essran, EssentialRange, RangePart};
pub use roots::{hl_eigenvalues, Rectangle};
pub use shoot::{hl_m_matrix, hl_m_matrix_with, hl_shoot, ShootingResult, DEFAULT_ODE_TOL};

use crate::error::ModelError;
use crate::Result;

/// Clearance from the essential range of `u` on `W` that shooting demands.
pub const SINGULAR_CLEARANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct HlModel {
    q: Piecewise,
    u: Piecewise,
    w: Piecewise,
    alpha: f64,
    beta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    q: Piecewise,
    u: Piecewise,
    w: Piecewise,
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawModel> for HlModel {
    type Error = ModelError;
    fn try_from(r: RawModel) -> Result<Self> {
        HlModel::new(r.q, r.u, r.w, r.alpha, r.beta)
    }
}

impl From<HlModel> for RawModel {
    fn from(m: HlModel) -> Self {
        RawModel { q: m.q, u: m.u, w: m.w, alpha: m.alpha, beta: m.beta }
    }
}

/// One cell of the common refinement of the coefficient breakpoints.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Cell<'a> {
    pub a: f64,
    pub b: f64,
    pub q: &'a [weyl_numerics::Complex64],
    pub u: &'a [weyl_numerics::Complex64],
    pub w: &'a [weyl_numerics::Complex64],
}

impl HlModel {
    pub fn new(q: Piecewise, u: Piecewise, w: Piecewise, alpha: f64, beta: f64) -> Result<Self> {
        for (name, angle) in [("alpha", alpha), ("beta", beta)] {
            if !(angle > 0.0 && angle < std::f64::consts::PI) || angle.sin() < 1e-12 {
                return Err(ModelError::Invalid(format!("{name} = {angle} must lie in (0, π)")));
            }
        }
        Ok(Self { q, u, w, alpha, beta })
    }

    /// `q = w = 0`, `u = c`, Neumann conditions at both ends.
    pub fn decoupled_neumann(c: f64) -> Self {
        let half_pi = std::f64::consts::FRAC_PI_2;
        Self::new(Piecewise::constant(0.0), Piecewise::constant(c), Piecewise::constant(0.0), half_pi, half_pi)
            .expect("right angles are valid")
    }

    /// `u = 2` on `[0, ½)` and `3` on `[½, 1]`, `w = 1` on `[0, ½)` and `0`
    /// after, `q = 0`, Neumann conditions. Here `essran(u) = {2, 3}` but only
    /// `2` is seen on `W`.
    pub fn step() -> Self {
        let half_pi = std::f64::consts::FRAC_PI_2;
        let u = Piecewise::steps(&[0.0, 0.5, 1.0], &[2.0, 3.0]).expect("valid steps");
        let w = Piecewise::steps(&[0.0, 0.5, 1.0], &[1.0, 0.0]).expect("valid steps");
        Self::new(Piecewise::constant(0.0), u, w, half_pi, half_pi).expect("right angles are valid")
    }

    pub fn q(&self) -> &Piecewise {
        &self.q
    }

    pub fn u(&self) -> &Piecewise {
        &self.u
    }

    pub fn w(&self) -> &Piecewise {
        &self.w
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The boundary parameter `diag(cot β, −cot α)`.
    pub fn boundary_parameter(&self) -> [f64; 2] {
        [cot(self.beta), -cot(self.alpha)]
    }

    /// `W` as a union of closed intervals, up to sets of measure zero.
    pub fn w_set(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for cell in self.cells() {
            if coeff::is_zero_poly(cell.w) {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.1 == cell.a => last.1 = cell.b,
                _ => out.push((cell.a, cell.b)),
            }
        }
        out
    }

    /// Whether `x` lies in `W`, using the same half-open piece convention as
    /// [`Piecewise::eval`].
    pub fn in_w(&self, x: f64) -> bool {
        self.w.eval(x).norm() != 0.0
    }

    /// Common refinement of all coefficient breakpoints.
    pub(crate) fn cells(&self) -> Vec<Cell<'_>> {
        self.cells_on(self.q.breaks().iter().chain(self.u.breaks()).chain(self.w.breaks()).copied().collect())
    }

    /// Cells for the reduced equation, where `u` only enters through
    /// `w²/(λ − u)`: breakpoints of `u` with `w ≡ 0` on both sides are
    /// skipped.
    pub(crate) fn ode_cells(&self) -> Vec<Cell<'_>> {
        let u_breaks = self.u.breaks().iter().copied().filter(|&b| {
            let left = self.w.piece_left_of(b);
            let right = self.w.piece_at(b);
            !(coeff::is_zero_poly(left) && coeff::is_zero_poly(right))
        });
        self.cells_on(self.q.breaks().iter().chain(self.w.breaks()).copied().chain(u_breaks).collect())
    }

    fn cells_on(&self, mut breaks: Vec<f64>) -> Vec<Cell<'_>> {
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        breaks
            .windows(2)
            .map(|ab| {
                let mid = 0.5 * (ab[0] + ab[1]);
                Cell {
                    a: ab[0],
                    b: ab[1],
                    q: self.q.piece_at(mid),
                    u: self.u.piece_at(mid),
                    w: self.w.piece_at(mid),
                }
            })
            .collect()
    }
}

pub(crate) fn cot(x: f64) -> f64 {
    x.cos() / x.sin()
}
