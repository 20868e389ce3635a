use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::CMatrix;
use crate::{NumericsError, Result};

/// A circle traversed counter-clockwise, discretized by the trapezoid rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawContour")]
pub struct ContourSpec {
    pub center: Complex64,
    pub radius: f64,
    pub nodes: usize,
}

#[derive(Deserialize)]
struct RawContour {
    center: Complex64,
    radius: f64,
    nodes: usize,
}

impl TryFrom<RawContour> for ContourSpec {
    type Error = NumericsError;
    fn try_from(raw: RawContour) -> Result<Self> {
        ContourSpec::new(raw.center, raw.radius, raw.nodes)
    }
}

impl ContourSpec {
    pub fn new(center: Complex64, radius: f64, nodes: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(NumericsError::InvalidContour(format!("radius must be positive, got {radius}")));
        }
        if nodes < 8 || !nodes.is_multiple_of(2) {
            return Err(NumericsError::InvalidContour(format!(
                "node count must be even and at least 8, got {nodes}"
            )));
        }
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(NumericsError::InvalidContour("center must be finite".into()));
        }
        Ok(Self { center, radius, nodes })
    }

    /// Quadrature points `λ_j` and weights `w_j` with `∮ f dλ ≈ Σ w_j f(λ_j)`.
    pub fn points(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        let h = 2.0 * PI / self.nodes as f64;
        (0..self.nodes).map(move |j| {
            let e = Complex64::from_polar(1.0, h * j as f64);
            let z = self.center + e * self.radius;
            let w = Complex64::i() * e * (self.radius * h);
            (z, w)
        })
    }

    pub fn encloses(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }

    /// Distance from the circle to the nearest of `points`.
    pub fn clearance<'a>(&self, points: impl IntoIterator<Item = &'a Complex64>) -> f64 {
        points
            .into_iter()
            .map(|p| ((p - self.center).norm() - self.radius).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Trapezoid approximation of `∮ f(λ) dλ` over the circle.
///
/// Errors raised by `f` at any node are returned unchanged.
pub fn contour_integral<E, F>(mut f: F, contour: &ContourSpec) -> std::result::Result<CMatrix, E>
where
    F: FnMut(Complex64) -> std::result::Result<CMatrix, E>,
{
    let mut acc: Option<CMatrix> = None;
    for (z, w) in contour.points() {
        let value = f(z)? * w;
        match acc.as_mut() {
            Some(sum) => *sum += value,
            None => acc = Some(value),
        }
    }
    Ok(acc.expect("contour has at least eight nodes"))
}

/// Scalar version of [`contour_integral`].
pub fn contour_integral_scalar<E, F>(mut f: F, contour: &ContourSpec) -> std::result::Result<Complex64, E>
where
    F: FnMut(Complex64) -> std::result::Result<Complex64, E>,
{
    let mut acc = Complex64::new(0.0, 0.0);
    for (z, w) in contour.points() {
        acc += f(z)? * w;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use std::convert::Infallible;

    fn ok<T>(t: T) -> std::result::Result<T, Infallible> {
        Ok(t)
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(ContourSpec::new(c64(0.0, 0.0), 0.0, 16).is_err());
        assert!(ContourSpec::new(c64(0.0, 0.0), 1.0, 6).is_err());
        assert!(ContourSpec::new(c64(0.0, 0.0), 1.0, 9).is_err());
        let bad: std::result::Result<ContourSpec, _> =
            serde_json::from_str(r#"{"center":[0.0,0.0],"radius":-1.0,"nodes":16}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn constant_integrates_to_zero() {
        let c = ContourSpec::new(c64(0.3, -0.2), 1.5, 8).unwrap();
        let m = CMatrix::from_element(2, 2, c64(1.0, 2.0));
        let r = contour_integral(|_| ok(m.clone()), &c).unwrap();
        assert!(r.norm() < 1e-14);
    }

    #[test]
    fn simple_pole_gives_two_pi_i() {
        let c = ContourSpec::new(c64(1.0, 1.0), 0.5, 64).unwrap();
        let r = contour_integral_scalar(|z| ok(1.0 / (z - c.center)), &c).unwrap();
        assert!((r - c64(0.0, 2.0 * PI)).norm() < 1e-10);
    }

    #[test]
    fn diagonal_resolvent_gives_riesz_projection() {
        let c = ContourSpec::new(c64(0.0, 0.0), 1.0, 64).unwrap();
        let r = contour_integral(
            |z| {
                let mut m = CMatrix::zeros(2, 2);
                m[(0, 0)] = 1.0 / (c64(0.0, 0.0) - z);
                m[(1, 1)] = 1.0 / (c64(5.0, 0.0) - z);
                ok(m)
            },
            &c,
        )
        .unwrap();
        // Entrywise residues: only the eigenvalue 0 lies inside.
        assert!((r[(0, 0)] - c64(0.0, -2.0 * PI)).norm() < 1e-10);
        assert!(r[(1, 1)].norm() < 1e-10);
        assert!(r[(0, 1)].norm() == 0.0 && r[(1, 0)].norm() == 0.0);
    }

    #[test]
    fn errors_propagate() {
        let c = ContourSpec::new(c64(0.0, 0.0), 1.0, 8).unwrap();
        let r: std::result::Result<CMatrix, &str> = contour_integral(|_| Err("boom"), &c);
        assert_eq!(r.unwrap_err(), "boom");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn polynomials_integrate_to_zero(
                coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..8),
                cx in -0.5f64..0.5, cy in -0.5f64..0.5, radius in 0.1f64..1.0,
            ) {
                let c = ContourSpec::new(c64(cx, cy), radius, 32).unwrap();
                let r = contour_integral_scalar(|z| {
                    let mut acc = c64(0.0, 0.0);
                    for &(re, im) in coeffs.iter().rev() {
                        acc = acc * z + c64(re, im);
                    }
                    ok(acc)
                }, &c).unwrap();
                prop_assert!(r.norm() <= 1e-12);
            }
        }
    }
}
