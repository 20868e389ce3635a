use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use weyl_numerics::Complex64;

use super::coeff::eval_poly;
use super::essran::{hl_essran, RangePart};
use super::shoot::{hl_shoot, DEFAULT_ODE_TOL};
use super::HlModel;
use crate::error::ModelError;
use crate::Result;

const ESSRAN_CLEARANCE: f64 = 1e-3;
const EDGE_NODES: usize = 32;
const MAX_DEPTH: usize = 40;
const NEWTON_STEPS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rectangle {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        if !(re_max > re_min && im_max > im_min) || ![re_min, re_max, im_min, im_max].iter().all(|x| x.is_finite()) {
            return Err(ModelError::Invalid("rectangle needs finite, strictly ordered sides".into()));
        }
        Ok(Self { re_min, re_max, im_min, im_max })
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }

    fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.re_min - slack && z.re <= self.re_max + slack && z.im >= self.im_min - slack && z.im <= self.im_max + slack
    }

    fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    fn split(&self, fraction: f64) -> (Self, Self) {
        let mut a = *self;
        let mut b = *self;
        if self.width() >= self.height() {
            let cut = self.re_min + fraction * self.width();
            a.re_max = cut;
            b.re_min = cut;
        } else {
            let cut = self.im_min + fraction * self.height();
            a.im_max = cut;
            b.im_min = cut;
        }
        (a, b)
    }
}

/// Distance from the rectangle to a range part; zero if they meet.
fn clearance(rect: &Rectangle, part: &RangePart) -> f64 {
    let box_distance = |z: Complex64| {
        let dx = (rect.re_min - z.re).max(0.0).max(z.re - rect.re_max);
        let dy = (rect.im_min - z.im).max(0.0).max(z.im - rect.im_max);
        dx.hypot(dy)
    };
    match part {
        RangePart::Point { value } => box_distance(*value),
        RangePart::Interval { lo, hi } => {
            let dx = (rect.re_min - hi).max(lo - rect.re_max).max(0.0);
            let dy = rect.im_min.max(-rect.im_max).max(0.0);
            dx.hypot(dy)
        }
        RangePart::Curve { coeffs, a, b } => (0..=1024)
            .map(|i| box_distance(eval_poly(coeffs, a + (b - a) * i as f64 / 1024.0)))
            .fold(f64::INFINITY, f64::min),
    }
}

struct Search<'a> {
    model: &'a HlModel,
    tol: f64,
}

impl Search<'_> {
    fn f(&self, lambda: Complex64) -> Result<Complex64> {
        Ok(hl_shoot(self.model, lambda, self.tol)?.denominator(self.model.beta()))
    }

    /// Change of argument of `F` along a segment, bisecting wherever the
    /// phase moves too fast to be tracked.
    fn arg_change(&self, a: Complex64, fa: Complex64, b: Complex64, fb: Complex64, depth: usize) -> Result<Option<f64>> {
        let step = (fb / fa).arg();
        if step.abs() < PI / 4.0 {
            return Ok(Some(step));
        }
        if depth == 0 {
            return Ok(None);
        }
        let mid = 0.5 * (a + b);
        let fm = self.f(mid)?;
        if fm.norm() == 0.0 {
            return Ok(None);
        }
        let Some(left) = self.arg_change(a, fa, mid, fm, depth - 1)? else { return Ok(None) };
        let Some(right) = self.arg_change(mid, fm, b, fb, depth - 1)? else { return Ok(None) };
        Ok(Some(left + right))
    }

    /// Number of zeros inside the rectangle, or `None` if one sits too
    /// close to the boundary to count reliably.
    fn winding(&self, rect: &Rectangle) -> Result<Option<i64>> {
        let corners = rect.corners();
        let mut points = Vec::with_capacity(4 * EDGE_NODES);
        for e in 0..4 {
            let (a, b) = (corners[e], corners[(e + 1) % 4]);
            for j in 0..EDGE_NODES {
                points.push(a + (b - a) * (j as f64 / EDGE_NODES as f64));
            }
        }
        let values = points.iter().map(|&z| self.f(z)).collect::<Result<Vec<_>>>()?;
        let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if values.iter().any(|v| v.norm() <= 1e-10 * scale) {
            return Ok(None);
        }
        let mut total = 0.0;
        for j in 0..points.len() {
            let k = (j + 1) % points.len();
            match self.arg_change(points[j], values[j], points[k], values[k], 12)? {
                Some(d) => total += d,
                None => return Ok(None),
            }
        }
        Ok(Some((total / (2.0 * PI)).round() as i64))
    }

    fn newton(&self, start: Complex64) -> Result<Option<Complex64>> {
        let mut z = start;
        for _ in 0..NEWTON_STEPS {
            let fz = self.f(z)?;
            let delta = 1e-5 * z.norm().max(1.0);
            let d = (self.f(z + delta)? - self.f(z - delta)?) / (2.0 * delta);
            if d.norm() == 0.0 || !d.norm().is_finite() {
                return Ok(None);
            }
            let step = fz / d;
            z -= step;
            if step.norm() <= 1e-12 * z.norm().max(1.0) {
                return Ok(Some(z));
            }
        }
        Ok(None)
    }

    fn search(&self, rect: &Rectangle, count: i64, depth: usize, out: &mut Vec<Complex64>) -> Result<()> {
        if count <= 0 {
            return Ok(());
        }
        if count == 1 || depth == MAX_DEPTH {
            if let Some(z) = self.newton(rect.center())? {
                if rect.contains(z, 1e-9 * z.norm().max(1.0)) {
                    for _ in 0..count {
                        out.push(z);
                    }
                    return Ok(());
                }
            }
            if depth == MAX_DEPTH {
                return Err(ModelError::Invalid(format!("zero search did not converge near {}", rect.center())));
            }
        }
        for fraction in [0.5 + 0.0317, 0.5 - 0.0419, 0.5 + 0.0773, 0.5 - 0.1123] {
            let (a, b) = rect.split(fraction);
            let (Some(na), Some(nb)) = (self.winding(&a)?, self.winding(&b)?) else { continue };
            if na + nb != count {
                continue;
            }
            self.search(&a, na, depth + 1, out)?;
            self.search(&b, nb, depth + 1, out)?;
            return Ok(());
        }
        Err(ModelError::Invalid(format!("could not split the search rectangle around {}", rect.center())))
    }
}

/// Zeros of `F(λ) = y2′(1, λ) + cot β y2(1, λ)` inside `region`.
///
/// The argument principle on the boundary counts them; the rectangle is
/// bisected until each piece holds one, which Newton's method then
/// polishes. `F` is analytic off the essential range of `u` on `W`, so the
/// closed region must stay clear of that set.
pub fn hl_eigenvalues(model: &HlModel, region: &Rectangle) -> Result<Vec<Complex64>> {
    let (_, on_w) = hl_essran(model);
    let distance = on_w.parts.iter().map(|p| clearance(region, p)).fold(f64::INFINITY, f64::min);
    if distance < ESSRAN_CLEARANCE {
        return Err(ModelError::ContourHitsEssran { distance });
    }
    let search = Search { model, tol: DEFAULT_ODE_TOL };
    let count = search
        .winding(region)?
        .ok_or_else(|| ModelError::Invalid("a zero lies on the boundary of the search region".into()))?;
    let mut out = Vec::new();
    search.search(region, count, 0, &mut out)?;
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use weyl_numerics::c64;

    #[test]
    fn neumann_eigenvalues() {
        let m = HlModel::decoupled_neumann(5.0);
        let region = Rectangle::new(0.5, 50.0, -1.0, 1.0).unwrap();
        let z = hl_eigenvalues(&m, &region).unwrap();
        assert_eq!(z.len(), 2, "{z:?}");
        for (k, root) in z.iter().enumerate() {
            let exact = ((k + 1) as f64 * PI).powi(2);
            assert!((root - exact).norm() < 1e-8, "{root} vs {exact}");
            let f = hl_shoot(&m, *root, DEFAULT_ODE_TOL).unwrap().denominator(m.beta());
            assert!(f.norm() < 1e-9);
        }
    }

    #[test]
    fn empty_region() {
        let m = HlModel::decoupled_neumann(5.0);
        let region = Rectangle::new(12.0, 30.0, -1.0, 1.0).unwrap();
        assert!(hl_eigenvalues(&m, &region).unwrap().is_empty());
    }

    #[test]
    fn region_touching_the_range_on_w_is_refused() {
        let m = HlModel::step();
        let region = Rectangle::new(1.0, 2.5, -1.0, 1.0).unwrap();
        assert!(matches!(hl_eigenvalues(&m, &region), Err(ModelError::ContourHitsEssran { .. })));
        let region = Rectangle::new(2.0005, 2.5, -1.0, 1.0).unwrap();
        assert!(matches!(hl_eigenvalues(&m, &region), Err(ModelError::ContourHitsEssran { .. })));
    }

    #[test]
    fn clearance_of_parts() {
        let r = Rectangle::new(0.0, 1.0, -1.0, 1.0).unwrap();
        assert_eq!(clearance(&r, &RangePart::Point { value: c64(0.5, 0.0) }), 0.0);
        assert!((clearance(&r, &RangePart::Point { value: c64(2.0, 0.0) }) - 1.0).abs() < 1e-15);
        assert!((clearance(&r, &RangePart::Interval { lo: 3.0, hi: 4.0 }) - 2.0).abs() < 1e-15);
        assert_eq!(clearance(&r, &RangePart::Interval { lo: -3.0, hi: 4.0 }), 0.0);
    }
}
