//! The identity suite behind `weyl-scope check`.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use weyl_core::io::SpaceDims;
use weyl_core::spaces::{
    detection_spaces, invariance_residual, morera_residual, saturate, spectral_radius_bound, DetectionSpaces, MoreraOutcome,
    SamplingSpec, Side,
};
use weyl_core::synth::{direct_sum_hidden, random_triple};
use weyl_core::{Extension, FiniteTriple};
use weyl_numerics::{eig_dense, principal_angles, spectral_norm, CMatrix, CVector, Complex64, ContourSpec};

use crate::config::RunConfig;
use crate::eig::load_extension;
use crate::error::Result;
use crate::report::{Bound, Report, Tolerances};

pub const GREEN_PAIRS: usize = 100;
pub const KREIN_DRAWS: usize = 50;
pub const M_PAIRS: usize = 20;
pub const HIDDEN_EIGENVALUE: Complex64 = Complex64::new(2.75, -0.5);

pub const CHECK_TOLERANCES: &[(&str, f64, Bound, &str)] = &[
    ("green", 1e-12, Bound::Below, "(Ã*u, v) − (u, A*v) = (Γ1u, Γ̃2v) − (Γ2u, Γ̃1v)"),
    ("green_matrix", 1e-12, Bound::Below, "Ẽ*T − T̃*E = Γ̃2*Γ1 − Γ̃1*Γ2"),
    ("hilbert", 1e-9, Bound::Below, "S_λ − S_λ0 = (λ − λ0)(A_B − λ)^{-1} S_λ0"),
    ("krein", 1e-9, Bound::Below, "Krein formula for (A_B − λ)^{-1} − (A_C − λ)^{-1}"),
    ("m_equality", 1e-9, Bound::Below, "Γ2 S_λ = Γ2(I + (λ − λ0)(A_B − λ)^{-1}) S_λ0"),
    ("s_equals_t", 1e-8, Bound::Below, "closure of S equals closure of T"),
    ("s_adjoint_equals_t_adjoint", 1e-8, Bound::Below, "closure of S̃ equals closure of T̃"),
    ("s_independent_of_mu0", 1e-8, Bound::Below, "S does not depend on μ0"),
    ("invariance", 1e-8, Bound::Below, "S is invariant under (A_B − μ)^{-1}"),
    ("morera_bordered", 1e-8, Bound::Below, "bordered resolvent is analytic wherever M is"),
    ("morera_full", 0.1, Bound::Nonzero, "full resolvent has a pole at the hidden eigenvalue"),
    ("morera_full_oracle", 1e-8, Bound::Below, "∮(A_B − λ)^{-1} = −2πi P for the Riesz projection P"),
];

#[derive(Debug, Clone, Serialize)]
pub struct TripleSummary {
    pub id: String,
    pub m: usize,
    pub h: usize,
    pub k: usize,
}

impl TripleSummary {
    fn of(tr: &FiniteTriple) -> Self {
        Self { id: tr.id.clone(), m: tr.state_dim(), h: tr.h(), k: tr.k() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckDetails {
    pub triples: Vec<TripleSummary>,
    pub space_triple: String,
    pub dims: SpaceDims,
    pub saturated: bool,
    pub hidden_eigenvalue: Complex64,
    pub contour: ContourSpec,
    pub enclosed: Vec<Complex64>,
    pub m_integral: f64,
}

pub fn rand_c(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn rand_vec(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| rand_c(rng))
}

pub fn rand_mat(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMatrix {
    CMatrix::from_fn(r, c, |_, _| rand_c(rng))
}

/// A point of `[−3, 3]²` at distance more than ¼ from every listed
/// spectrum.
pub fn away_from(rng: &mut ChaCha8Rng, spectra: &[&[Complex64]]) -> Complex64 {
    loop {
        let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        if spectra.iter().copied().flatten().all(|s| (s - z).norm() > 0.25) {
            return z;
        }
    }
}

/// Largest Green residual over random domain vectors, and the matrix
/// form of the identity.
pub fn green_suite(tr: &FiniteTriple, rng: &mut ChaCha8Rng, pairs: usize) -> Result<(f64, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let u = rand_vec(rng, tr.domain_dim());
        let v = rand_vec(rng, tr.adjoint_domain_dim());
        worst = worst.max(tr.green_residual(&u, &v)?);
    }
    Ok((worst, tr.green_matrix_residual()))
}

/// Largest Hilbert and Krein residuals over random `(B, C, λ, λ0)`.
pub fn krein_suite(tr: &Arc<FiniteTriple>, rng: &mut ChaCha8Rng, draws: usize) -> Result<(f64, f64)> {
    let (h, k) = (tr.h(), tr.k());
    let (mut hilbert, mut krein): (f64, f64) = (0.0, 0.0);
    for _ in 0..draws {
        let eb = Extension::new(tr.clone(), rand_mat(rng, h, k))?;
        let ec = eb.with_b(rand_mat(rng, h, k))?;
        let (sb, sc) = (eb.spectrum()?, ec.spectrum()?);
        let l = away_from(rng, &[&sb, &sc]);
        let l0 = away_from(rng, &[&sb, &sc]);
        let f = rand_vec(rng, h);
        hilbert = hilbert.max(eb.hilbert_identity_residual(l, l0, &f)?);
        krein = krein.max(eb.krein_residual(&ec, l)?);
    }
    Ok((hilbert, krein))
}

/// Largest entry difference between the two routes to `M_B(λ)`.
pub fn m_suite(tr: &Arc<FiniteTriple>, rng: &mut ChaCha8Rng, pairs: usize) -> Result<f64> {
    let ext = Extension::new(tr.clone(), rand_mat(rng, tr.h(), tr.k()))?;
    let spectrum = ext.spectrum()?;
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let l = away_from(rng, &[&spectrum]);
        let l0 = away_from(rng, &[&spectrum]);
        let diff = ext.m_function(l)? - ext.m_via_resolvent(l, l0)?;
        worst = worst.max(if diff.is_empty() { 0.0 } else { diff.camax() });
    }
    Ok(worst)
}

fn max_angle(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.ncols() != b.ncols() {
        return Ok(PI / 2.0);
    }
    Ok(principal_angles(a, b)?.into_iter().fold(0.0, f64::max))
}

/// Angle and invariance checks on the saturated detection spaces.
pub struct SpaceChecks {
    pub s_equals_t: f64,
    pub s_adjoint_equals_t_adjoint: f64,
    pub s_independent_of_mu0: f64,
    pub invariance: f64,
    pub dims: SpaceDims,
    pub saturated: bool,
}

pub fn space_suite(ext: &Extension, rng: &mut ChaCha8Rng) -> Result<SpaceChecks> {
    let spec = SamplingSpec::default_for(ext)?;
    let d = detection_spaces(ext, &spec)?;
    let s_equals_t = max_angle(&d.s.basis, &d.t.basis)?;
    let s_adjoint_equals_t_adjoint = max_angle(&d.s_adjoint.basis, &d.t_adjoint.basis)?;
    let r = spectral_radius_bound(ext)?;
    let mut mu0_spread: f64 = 0.0;
    for j in 1..3 {
        let mu0 = Complex64::from_polar(1.75 * r, 0.7 + 2.0 * PI * j as f64 / 3.0);
        let other = saturate(ext, &spec.clone().with_mu0(mu0), Side::S)?.space;
        mu0_spread = mu0_spread.max(max_angle(&d.s.basis, &other.basis)?);
    }
    let spectrum = ext.spectrum()?;
    let mut invariance: f64 = 0.0;
    for _ in 0..3 {
        let mu = away_from(rng, &[&spectrum]);
        invariance = invariance.max(invariance_residual(&d.s, ext, mu)?);
    }
    Ok(SpaceChecks {
        s_equals_t,
        s_adjoint_equals_t_adjoint,
        s_independent_of_mu0: mu0_spread,
        invariance,
        dims: dims_of(&d),
        saturated: d.saturated,
    })
}

pub fn dims_of(d: &DetectionSpaces) -> SpaceDims {
    SpaceDims { s: d.s.dim(), t: d.t.dim(), s_adjoint: d.s_adjoint.dim(), t_adjoint: d.t_adjoint.dim() }
}

/// A random `m = 8, h = k = 2` triple with a one-dimensional block at
/// [`HIDDEN_EIGENVALUE`] that the boundary maps cannot see, and a random
/// `B`.
pub fn hidden_block_extension(rng: &mut ChaCha8Rng) -> Result<Extension> {
    let base = random_triple(rng, 8, 2, 2)?;
    let hidden = CMatrix::from_element(1, 1, HIDDEN_EIGENVALUE);
    let tr = direct_sum_hidden(&base, &hidden)?.with_id("hidden-block-8+1");
    Ok(Extension::new(Arc::new(tr), rand_mat(rng, 2, 2))?)
}

/// Circle around `center` with radius 0.45 times its distance to the rest
/// of the spectrum.
pub fn isolating_contour(ext: &Extension, center: Complex64, nodes: usize) -> Result<ContourSpec> {
    let gap = ext
        .spectrum()?
        .iter()
        .map(|s| (s - center).norm())
        .filter(|&d| d > 1e-8)
        .fold(f64::INFINITY, f64::min);
    let radius = if gap.is_finite() { 0.45 * gap } else { 1.0 };
    Ok(ContourSpec::new(center, radius, nodes)?)
}

/// `2π‖P‖` for the Riesz projection `P = v w*/(w*v)` onto the eigenvalue of
/// `A_B` nearest `z`, built from right and left eigenvectors.
pub fn riesz_oracle(ext: &Extension, z: Complex64) -> Result<f64> {
    let a = ext.matrix_form()?;
    let right = eig_dense(&a)?;
    let left = eig_dense(&a.adjoint())?;
    let nearest = |pairs: &[weyl_numerics::EigenPair], target: Complex64| {
        pairs
            .iter()
            .min_by(|p, q| (p.value - target).norm().total_cmp(&(q.value - target).norm()))
            .map(|p| p.vector.clone())
    };
    let (Some(v), Some(w)) = (nearest(&right, z), nearest(&left, z.conj())) else {
        return Ok(0.0);
    };
    let p = (&v * w.adjoint()) / w.dotc(&v);
    Ok(2.0 * PI * spectral_norm(&p))
}

pub struct MoreraChecks {
    pub outcome: MoreraOutcome,
    pub oracle: f64,
    pub contour: ContourSpec,
    pub dims: SpaceDims,
}

pub fn morera_suite(ext: &Extension) -> Result<MoreraChecks> {
    let spaces = detection_spaces(ext, &SamplingSpec::default_for(ext)?)?;
    let contour = isolating_contour(ext, HIDDEN_EIGENVALUE, 128)?;
    let outcome = morera_residual(ext, &contour, &spaces.s_adjoint.basis, &spaces.s.basis)?;
    let oracle = riesz_oracle(ext, HIDDEN_EIGENVALUE)?;
    Ok(MoreraChecks { outcome, oracle, contour, dims: dims_of(&spaces) })
}

/// The full suite. With a triple in the config, the per-triple checks run
/// on it; the Morera checks always use the seeded hidden-block triple.
pub fn run_check(cfg: &RunConfig, seed: u64, tol: Option<f64>) -> Result<Report<CheckDetails>> {
    let tols = Tolerances::new(CHECK_TOLERANCES, &cfg.tolerances, tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hidden = hidden_block_extension(&mut rng)?;
    let (triples, space_ext) = match cfg.model {
        Some(_) => {
            let ext = load_extension(cfg, seed)?;
            (vec![ext.triple_arc().clone()], ext)
        }
        None => {
            let a = Arc::new(random_triple(&mut rng, 8, 2, 2)?.with_id("random-8"));
            let b = Arc::new(random_triple(&mut rng, 16, 3, 2)?.with_id("random-16"));
            (vec![a, b, hidden.triple_arc().clone()], hidden.clone())
        }
    };

    let (mut green, mut green_matrix, mut hilbert, mut krein, mut m_eq) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for tr in &triples {
        let (g, gm) = green_suite(tr, &mut rng, GREEN_PAIRS)?;
        let (hi, kr) = krein_suite(tr, &mut rng, KREIN_DRAWS)?;
        let me = m_suite(tr, &mut rng, M_PAIRS)?;
        green = green.max(g);
        green_matrix = green_matrix.max(gm);
        hilbert = hilbert.max(hi);
        krein = krein.max(kr);
        m_eq = m_eq.max(me);
    }
    let sp = space_suite(&space_ext, &mut rng)?;
    let mo = morera_suite(&hidden)?;
    let oracle_error = (mo.outcome.full - mo.oracle).abs() / mo.oracle.max(f64::MIN_POSITIVE);

    let checks = vec![
        tols.check("green", green),
        tols.check("green_matrix", green_matrix),
        tols.check("hilbert", hilbert),
        tols.check("krein", krein),
        tols.check("m_equality", m_eq),
        tols.check("s_equals_t", sp.s_equals_t),
        tols.check("s_adjoint_equals_t_adjoint", sp.s_adjoint_equals_t_adjoint),
        tols.check("s_independent_of_mu0", sp.s_independent_of_mu0),
        tols.check("invariance", sp.invariance),
        tols.check("morera_bordered", mo.outcome.bordered),
        tols.check("morera_full", mo.outcome.full),
        tols.check("morera_full_oracle", oracle_error),
    ];
    let details = CheckDetails {
        triples: triples.iter().map(|t| TripleSummary::of(t)).collect(),
        space_triple: space_ext.triple().id.clone(),
        dims: sp.dims,
        saturated: sp.saturated,
        hidden_eigenvalue: HIDDEN_EIGENVALUE,
        contour: mo.contour,
        enclosed: mo.outcome.enclosed,
        m_integral: mo.outcome.m_integral,
    };
    Ok(Report::new("check", seed, checks, details))
}
