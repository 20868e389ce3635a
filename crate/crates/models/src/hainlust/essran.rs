use serde::{Deserialize, Serialize};
use weyl_numerics::{eigenvalues, CMatrix, Complex64};

use super::coeff::{eval_poly, is_zero_poly};
use super::HlModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RangePart {
    Point { value: Complex64 },
    /// A real interval `[lo, hi]`.
    Interval { lo: f64, hi: f64 },
    /// The image of `[a, b]` under a complex polynomial.
    Curve { coeffs: Vec<Complex64>, a: f64, b: f64 },
}

impl RangePart {
    pub fn distance(&self, z: Complex64) -> f64 {
        match self {
            RangePart::Point { value } => (z - value).norm(),
            RangePart::Interval { lo, hi } => (Complex64::new(z.re.clamp(*lo, *hi), 0.0) - z).norm(),
            RangePart::Curve { coeffs, a, b } => curve_distance(coeffs, *a, *b, z),
        }
    }
}

fn curve_distance(c: &[Complex64], a: f64, b: f64, z: Complex64) -> f64 {
    const SAMPLES: usize = 256;
    let d = |x: f64| (eval_poly(c, x) - z).norm();
    let step = (b - a) / SAMPLES as f64;
    let (best, _) = (0..=SAMPLES)
        .map(|i| (i, d(a + i as f64 * step)))
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .expect("nonempty sample");
    // Golden-section search in the bracketing sample cells.
    let (mut lo, mut hi) = (a + best.saturating_sub(1) as f64 * step, (a + (best + 1) as f64 * step).min(b));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (d(x1), d(x2));
    for _ in 0..80 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = d(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = d(x2);
        }
    }
    f1.min(f2).min(d(a)).min(d(b))
}

/// A finite union of points, real intervals and polynomial arcs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EssentialRange {
    pub parts: Vec<RangePart>,
}

impl EssentialRange {
    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        self.parts.iter().map(|p| p.distance(z)).fold(f64::INFINITY, f64::min)
    }

    fn push(&mut self, part: RangePart) {
        self.parts.push(part);
    }

    /// Merges overlapping real intervals, absorbs points lying in them and
    /// drops duplicate points.
    fn normalize(mut self) -> Self {
        let mut intervals: Vec<(f64, f64)> = Vec::new();
        let mut points: Vec<Complex64> = Vec::new();
        let mut curves = Vec::new();
        for p in self.parts.drain(..) {
            match p {
                RangePart::Interval { lo, hi } => intervals.push((lo, hi)),
                RangePart::Point { value } => points.push(value),
                c @ RangePart::Curve { .. } => curves.push(c),
            }
        }
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (lo, hi) in intervals {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        points.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        points.dedup();
        points.retain(|z| !(z.im == 0.0 && merged.iter().any(|&(lo, hi)| z.re >= lo && z.re <= hi)));
        let mut out = EssentialRange::default();
        for value in points {
            out.push(RangePart::Point { value });
        }
        for (lo, hi) in merged {
            out.push(RangePart::Interval { lo, hi });
        }
        for c in curves {
            out.push(c);
        }
        out
    }

    /// The point values, for ranges made only of points.
    pub fn points(&self) -> Vec<Complex64> {
        self.parts
            .iter()
            .filter_map(|p| match p {
                RangePart::Point { value } => Some(*value),
                _ => None,
            })
            .collect()
    }
}

/// Real critical points of a real polynomial inside `(a, b)`.
fn critical_points(c: &[f64], a: f64, b: f64) -> Vec<f64> {
    let mut d: Vec<f64> = c.iter().enumerate().skip(1).map(|(k, &x)| k as f64 * x).collect();
    while d.last() == Some(&0.0) {
        d.pop();
    }
    if d.len() < 2 {
        return Vec::new();
    }
    let deg = d.len() - 1;
    let lead = d[deg];
    let companion = CMatrix::from_fn(deg, deg, |i, j| {
        if i == 0 {
            Complex64::new(-d[deg - 1 - j] / lead, 0.0)
        } else if j + 1 == i {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    eigenvalues(&companion)
        .unwrap_or_default()
        .into_iter()
        .filter(|z| z.im.abs() < 1e-9 * (1.0 + z.re.abs()) && z.re > a && z.re < b)
        .map(|z| z.re)
        .collect()
}

fn piece_range(c: &[Complex64], a: f64, b: f64) -> RangePart {
    let degree = c.iter().rposition(|z| z.norm() != 0.0).unwrap_or(0);
    if degree == 0 {
        return RangePart::Point { value: c.first().copied().unwrap_or_default() };
    }
    if c.iter().all(|z| z.im == 0.0) {
        let re: Vec<f64> = c.iter().map(|z| z.re).collect();
        let mut candidates = critical_points(&re, a, b);
        candidates.push(a);
        candidates.push(b);
        let values: Vec<f64> = candidates.iter().map(|&x| eval_poly(c, x).re).collect();
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        return RangePart::Interval { lo, hi };
    }
    RangePart::Curve { coeffs: c[..=degree].to_vec(), a, b }
}

/// The essential range of `u` over `[0, 1]` and over `W`.
pub fn hl_essran(model: &HlModel) -> (EssentialRange, EssentialRange) {
    let mut full = EssentialRange::default();
    let mut on_w = EssentialRange::default();
    for cell in model.cells() {
        let part = piece_range(cell.u, cell.a, cell.b);
        if !is_zero_poly(cell.w) {
            on_w.push(part.clone());
        }
        full.push(part);
    }
    (full.normalize(), on_w.normalize())
}

impl HlModel {
    /// Distance from `λ` to the essential range of `u` on `W`, where the
    /// reduced equation has its singular coefficient.
    pub fn singular_distance(&self, lambda: Complex64) -> f64 {
        hl_essran(self).1.distance(lambda)
    }
}
