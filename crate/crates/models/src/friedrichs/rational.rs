use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use weyl_numerics::Complex64;

use crate::error::ModelError;
use crate::Result;

/// `c / (x − a)^order` with `a` off the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub pole: Complex64,
    pub order: u32,
    pub coeff: Complex64,
}

/// A rational function on the real line, `Σ c_k / (x − a_k)^{p_k}`, with
/// every pole off the axis.
///
/// `H²₊` is taken to be the boundary values of functions analytic in the
/// upper half plane, so a member of `H²₊` has all its poles in the lower
/// half plane.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawRational", into = "RawRational")]
pub struct RationalH2 {
    terms: Vec<Term>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRational {
    poles: Vec<Complex64>,
    residues: Vec<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    orders: Option<Vec<u32>>,
}

impl TryFrom<RawRational> for RationalH2 {
    type Error = ModelError;
    fn try_from(r: RawRational) -> Result<Self> {
        let orders = r.orders.unwrap_or_else(|| vec![1; r.poles.len()]);
        RationalH2::with_orders(&r.poles, &orders, &r.residues)
    }
}

impl From<RationalH2> for RawRational {
    fn from(f: RationalH2) -> Self {
        let simple = f.terms.iter().all(|t| t.order == 1);
        RawRational {
            poles: f.terms.iter().map(|t| t.pole).collect(),
            residues: f.terms.iter().map(|t| t.coeff).collect(),
            orders: (!simple).then(|| f.terms.iter().map(|t| t.order).collect()),
        }
    }
}

fn same_pole(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-13 * (1.0 + a.norm())
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl RationalH2 {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Simple poles `a_k` with residues `r_k`.
    pub fn new(poles: &[Complex64], residues: &[Complex64]) -> Result<Self> {
        Self::with_orders(poles, &vec![1; poles.len()], residues)
    }

    pub fn with_orders(poles: &[Complex64], orders: &[u32], coeffs: &[Complex64]) -> Result<Self> {
        if poles.len() != coeffs.len() || poles.len() != orders.len() {
            return Err(ModelError::Invalid(format!(
                "{} poles, {} orders and {} coefficients",
                poles.len(),
                orders.len(),
                coeffs.len()
            )));
        }
        let mut out = Self::zero();
        for ((&a, &p), &c) in poles.iter().zip(orders).zip(coeffs) {
            if !(a.im != 0.0 && a.re.is_finite() && a.im.is_finite()) {
                return Err(ModelError::Invalid(format!("pole {a} must be finite and off the real axis")));
            }
            if p == 0 {
                return Err(ModelError::Invalid("pole orders start at 1".into()));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(ModelError::Invalid("coefficients must be finite".into()));
            }
            out.add_term(a, p, c);
        }
        Ok(out)
    }

    /// `c / (x − a)^order`.
    pub fn pole_term(pole: Complex64, order: u32, coeff: Complex64) -> Result<Self> {
        Self::with_orders(&[pole], &[order], &[coeff])
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    fn add_term(&mut self, pole: Complex64, order: u32, coeff: Complex64) {
        if coeff == Complex64::new(0.0, 0.0) {
            return;
        }
        match self.terms.iter_mut().find(|t| t.order == order && same_pole(t.pole, pole)) {
            Some(t) => t.coeff += coeff,
            None => self.terms.push(Term { pole, order, coeff }),
        }
    }

    pub fn poles(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.terms.iter().map(|t| t.pole)
    }

    /// All poles in the lower half plane.
    pub fn is_hardy_plus(&self) -> bool {
        self.terms.iter().all(|t| t.pole.im < 0.0)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.eval_complex(Complex64::new(x, 0.0))
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.terms.iter().map(|t| t.coeff / (z - t.pole).powu(t.order)).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero();
        for t in &self.terms {
            out.add_term(t.pole, t.order, t.coeff * s);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for t in &other.terms {
            out.add_term(t.pole, t.order, t.coeff);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `x ↦ conj(f(x))` on the real line.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero();
        for t in &self.terms {
            out.add_term(t.pole.conj(), t.order, t.coeff.conj());
        }
        out
    }

    /// Product, reduced back to partial fractions.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for s in &self.terms {
            for t in &other.terms {
                let c = s.coeff * t.coeff;
                if same_pole(s.pole, t.pole) {
                    out.add_term(s.pole, s.order + t.order, c);
                    continue;
                }
                let (a, p, b, q) = (s.pole, s.order, t.pole, t.order);
                for k in 1..=p {
                    let sign = if (p - k) % 2 == 0 { 1.0 } else { -1.0 };
                    let coef = binomial(q + p - k - 1, p - k) * sign / (a - b).powu(q + p - k);
                    out.add_term(a, k, c * coef);
                }
                for k in 1..=q {
                    let sign = if (q - k) % 2 == 0 { 1.0 } else { -1.0 };
                    let coef = binomial(p + q - k - 1, q - k) * sign / (b - a).powu(p + q - k);
                    out.add_term(b, k, c * coef);
                }
            }
        }
        out
    }

    /// `f / (x − λ)` for nonreal `λ`.
    pub fn div_linear(&self, lambda: Complex64) -> Result<Self> {
        if lambda.im == 0.0 {
            return Err(ModelError::RealLambda(lambda));
        }
        Ok(self.mul(&Self::pole_term(lambda, 1, Complex64::new(1.0, 0.0))?))
    }

    /// `c_f = lim x f(x)`, the sum of the simple-pole coefficients.
    pub fn c_limit(&self) -> Complex64 {
        self.terms.iter().filter(|t| t.order == 1).map(|t| t.coeff).sum()
    }

    /// `x f(x) − c_f`, again a rational function in `L²`.
    pub fn times_x_minus_c(&self) -> Self {
        let mut out = Self::zero();
        for t in &self.terms {
            if t.order > 1 {
                out.add_term(t.pole, t.order - 1, t.coeff);
            }
            out.add_term(t.pole, t.order, t.coeff * t.pole);
        }
        out
    }

    /// `lim_{R→∞} ∫_{−R}^{R} f(x) dx`.
    ///
    /// Higher-order terms integrate to zero and `∫ dx/(x − a)` contributes
    /// `iπ sign(Im a)` in the symmetric limit, which is the residue theorem
    /// with the large semicircle accounted for.
    pub fn line_integral(&self) -> Complex64 {
        let s: Complex64 = self.terms.iter().filter(|t| t.order == 1).map(|t| t.coeff * t.pole.im.signum()).sum();
        Complex64::new(0.0, PI) * s
    }

    /// `⟨f, g⟩ = ∫ f conj(g)`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.mul(&other.conj()).line_integral()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    /// `Γ1 f = ∫ (f − c_f sign(x)(x² + 1)^{−1/2}) dx`. The regulariser is
    /// odd, so this is the symmetric limit of `∫ f`.
    pub fn gamma1(&self) -> Complex64 {
        self.line_integral()
    }

    /// `Γ2 f = c_f`.
    pub fn gamma2(&self) -> Complex64 {
        self.c_limit()
    }

    /// Largest coefficient magnitude, for relative tolerances.
    pub fn scale_hint(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).fold(0.0, f64::max)
    }
}

/// `⟨(x − λ)^{-1}, f⟩ = ∫ conj(f(x)) / (x − λ) dx`.
pub fn fr_cauchy(f: &RationalH2, lambda: Complex64) -> Result<Complex64> {
    if lambda.im == 0.0 {
        return Err(ModelError::RealLambda(lambda));
    }
    if f.poles().any(|a| same_pole(a.conj(), lambda)) {
        return Err(ModelError::PoleCollision(lambda));
    }
    cauchy_merged(f, lambda)
}

/// As [`fr_cauchy`], with a pole of `conj f` at `λ` merged into a higher
/// order pole instead of refused.
pub(crate) fn cauchy_merged(f: &RationalH2, lambda: Complex64) -> Result<Complex64> {
    Ok(f.conj().div_linear(lambda)?.line_integral())
}

/// `c_f`.
pub fn fr_c(f: &RationalH2) -> Complex64 {
    f.c_limit()
}

/// `(Γ1 f, Γ2 f)`.
pub fn fr_gamma(f: &RationalH2) -> (Complex64, Complex64) {
    (f.gamma1(), f.gamma2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert, proptest, ProptestConfig};
    use weyl_numerics::{c64, real_line_quadrature_with};

    fn quad(f: impl Fn(f64) -> Complex64, decay: u32) -> Complex64 {
        real_line_quadrature_with(f, decay, 4000).unwrap()
    }

    fn regulariser(x: f64) -> f64 {
        x.signum() / (x * x + 1.0).sqrt()
    }

    fn simple(a: Complex64) -> RationalH2 {
        RationalH2::new(&[a], &[c64(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn cauchy_of_hardy_function() {
        let f = simple(c64(0.0, -1.0));
        assert!(f.is_hardy_plus());
        assert!(fr_cauchy(&f, c64(0.0, 2.0)).unwrap().norm() < 1e-15);
        assert!((fr_cauchy(&f, c64(0.0, -2.0)).unwrap() - 2.0 * PI / 3.0).norm() < 1e-14);
        let f2 = f.scale(c64(2.0, 1.0));
        let l = c64(0.3, -0.7);
        assert!((fr_cauchy(&f2, l).unwrap() - c64(2.0, -1.0) * fr_cauchy(&f, l).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn cauchy_errors() {
        let f = simple(c64(0.0, -1.0));
        assert!(matches!(fr_cauchy(&f, c64(1.0, 0.0)), Err(ModelError::RealLambda(_))));
        assert!(matches!(fr_cauchy(&f, c64(0.0, 1.0)), Err(ModelError::PoleCollision(_))));
    }

    #[test]
    fn limits() {
        assert_eq!(fr_c(&simple(c64(0.0, -1.0))), c64(1.0, 0.0));
        let sq = RationalH2::pole_term(c64(0.0, -1.0), 2, c64(1.0, 0.0)).unwrap();
        assert_eq!(fr_c(&sq), c64(0.0, 0.0));
        let f = RationalH2::new(&[c64(0.0, 3.0), c64(0.0, -1.0)], &[c64(2.0, 0.0), c64(1.0, 0.0)]).unwrap();
        assert_eq!(fr_c(&f), c64(3.0, 0.0));
    }

    #[test]
    fn deficiency_elements() {
        // x u − c_u = ±i u for u = 1/(x ∓ i).
        for s in [1.0, -1.0] {
            let u = simple(c64(0.0, s));
            assert_eq!(u.c_limit(), c64(1.0, 0.0));
            let lhs = u.times_x_minus_c();
            let rhs = u.scale(c64(0.0, s));
            assert!(lhs.sub(&rhs).terms().iter().all(|t| t.coeff.norm() < 1e-15));
        }
    }

    #[test]
    fn gamma_against_quadrature() {
        let f = simple(c64(0.0, -1.0));
        let (g1, g2) = fr_gamma(&f);
        assert_eq!(g2, c64(1.0, 0.0));
        let q = quad(|x| f.eval(x) - regulariser(x), 2);
        assert!((g1 - q).norm() < 1e-8, "{g1} vs {q}");
        assert!((g1 - c64(0.0, -PI)).norm() < 1e-15);

        let sq = RationalH2::pole_term(c64(0.0, -1.0), 2, c64(1.0, 0.0)).unwrap();
        let q = quad(|x| sq.eval(x), 2);
        assert!((sq.gamma1() - q).norm() < 1e-8);
        assert_eq!(sq.gamma2(), c64(0.0, 0.0));
    }

    #[test]
    fn product_matches_pointwise() {
        let f = RationalH2::with_orders(&[c64(1.0, -1.0), c64(-0.5, 2.0)], &[2, 1], &[c64(1.0, 0.5), c64(-0.3, 0.0)])
            .unwrap();
        let g = RationalH2::with_orders(&[c64(0.0, 1.0), c64(1.0, -1.0)], &[3, 1], &[c64(0.2, 0.0), c64(0.0, 1.0)])
            .unwrap();
        let h = f.mul(&g);
        for x in [-3.0, -0.2, 0.0, 0.7, 5.0] {
            assert!((h.eval(x) - f.eval(x) * g.eval(x)).norm() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn residue_integrals_match_quadrature(
            a in -2.0f64..2.0, b in 0.3f64..2.0, c in -2.0f64..2.0, d in 0.3f64..2.0,
            lr in -3.0f64..3.0, li in 0.3f64..3.0, upper in proptest::bool::ANY,
        ) {
            let f = RationalH2::new(&[c64(a, -b), c64(c, d)], &[c64(1.0, 0.5), c64(-0.7, 0.2)]).unwrap();
            let lambda = c64(lr, if upper { li } else { -li });
            let exact = fr_cauchy(&f, lambda).unwrap();
            let q = quad(|x| f.eval(x).conj() / (c64(x, 0.0) - lambda), 2);
            prop_assert!((exact - q).norm() < 1e-8, "{} vs {}", exact, q);
            let n2 = f.inner(&f);
            let q2 = quad(|x| c64(f.eval(x).norm_sqr(), 0.0), 2);
            prop_assert!((n2 - q2).norm() < 1e-8);
        }

        #[test]
        fn cauchy_transform_is_analytic(cr in -2.0f64..2.0, ci in 1.0f64..3.0, upper in proptest::bool::ANY) {
            let f = RationalH2::new(&[c64(0.5, -0.4), c64(-1.0, 0.6)], &[c64(1.0, 0.0), c64(0.3, -0.2)]).unwrap();
            let center = c64(cr, if upper { ci } else { -ci });
            let contour = weyl_numerics::ContourSpec::new(center, 0.25, 64).unwrap();
            let integral = weyl_numerics::contour_integral_scalar(|l| fr_cauchy(&f, l), &contour).unwrap();
            prop_assert!(integral.norm() < 1e-9);
        }
    }
}
