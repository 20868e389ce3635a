use serde::{Deserialize, Serialize};
use weyl_numerics::Complex64;

use crate::error::ModelError;
use crate::Result;

/// A piecewise polynomial on `[0, 1]`.
///
/// Piece `i` covers `[breaks[i], breaks[i+1])` (the last piece is closed)
/// and holds the coefficients of a polynomial in `x`, lowest degree first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPiecewise", into = "RawPiecewise")]
pub struct Piecewise {
    breaks: Vec<f64>,
    coeffs: Vec<Vec<Complex64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPiecewise {
    breaks: Vec<f64>,
    coeffs: Vec<Vec<Complex64>>,
}

impl TryFrom<RawPiecewise> for Piecewise {
    type Error = ModelError;
    fn try_from(r: RawPiecewise) -> Result<Self> {
        Piecewise::new(r.breaks, r.coeffs)
    }
}

impl From<Piecewise> for RawPiecewise {
    fn from(p: Piecewise) -> Self {
        RawPiecewise { breaks: p.breaks, coeffs: p.coeffs }
    }
}

pub(crate) fn is_zero_poly(c: &[Complex64]) -> bool {
    c.iter().all(|z| z.norm() == 0.0)
}

pub(crate) fn eval_poly(c: &[Complex64], x: f64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a)
}

impl Piecewise {
    pub fn new(breaks: Vec<f64>, coeffs: Vec<Vec<Complex64>>) -> Result<Self> {
        if breaks.len() < 2 || breaks[0] != 0.0 || *breaks.last().unwrap() != 1.0 {
            return Err(ModelError::Invalid("breakpoints must start at 0 and end at 1".into()));
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ModelError::Invalid("breakpoints must be strictly increasing".into()));
        }
        if coeffs.len() != breaks.len() - 1 {
            return Err(ModelError::Invalid(format!(
                "{} breakpoints need {} pieces, got {}",
                breaks.len(),
                breaks.len() - 1,
                coeffs.len()
            )));
        }
        if coeffs.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(ModelError::Invalid("coefficients must be finite".into()));
        }
        Ok(Self { breaks, coeffs })
    }

    pub fn constant(c: f64) -> Self {
        Self { breaks: vec![0.0, 1.0], coeffs: vec![vec![Complex64::new(c, 0.0)]] }
    }

    /// A real step function taking `values[i]` on piece `i`.
    pub fn steps(breaks: &[f64], values: &[f64]) -> Result<Self> {
        Self::new(breaks.to_vec(), values.iter().map(|&v| vec![Complex64::new(v, 0.0)]).collect())
    }

    /// One polynomial on all of `[0, 1]`.
    pub fn polynomial(coeffs: Vec<Complex64>) -> Result<Self> {
        Self::new(vec![0.0, 1.0], vec![coeffs])
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, &[Complex64])> {
        self.breaks.windows(2).zip(&self.coeffs).map(|(ab, c)| (ab[0], ab[1], c.as_slice()))
    }

    fn index(&self, x: f64) -> usize {
        let i = self.breaks.partition_point(|&b| b <= x);
        i.clamp(1, self.coeffs.len()) - 1
    }

    pub(crate) fn piece_at(&self, x: f64) -> &[Complex64] {
        &self.coeffs[self.index(x)]
    }

    /// The piece covering points just below `x`.
    pub(crate) fn piece_left_of(&self, x: f64) -> &[Complex64] {
        let i = self.breaks.partition_point(|&b| b < x);
        &self.coeffs[i.clamp(1, self.coeffs.len()) - 1]
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        eval_poly(self.piece_at(x), x)
    }
}
