//! Detection spaces and bordered resolvents.
//!
//! For an extension `A_B`,
//!
//! ```text
//! S = span{ (A_B − δ)^{-1} Ran S_{μ0,B} : δ ∈ ρ(A_B) }
//! T = span{ Ran S_{μ,B} : μ ∈ ρ(A_B) }
//! ```
//!
//! with the solution operators read on the state space. `S̃` and `T̃` are
//! the same spaces for the adjoint extension `Ã_{B*}` at conjugated sample
//! points. Spans over infinitely many parameters are approximated by
//! finitely many samples, with a saturation loop that keeps adding points
//! until the numerical rank stops growing.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use weyl_numerics::{
    orthonormal_basis, spectral_norm, CMatrix, Complex64, ContourSpec, DEFAULT_RANK_TOL,
};

use crate::error::CoreError;
use crate::extension::Extension;
use crate::Result;

/// Minimum distance between a sample point and the spectrum.
pub const SAMPLE_CLEARANCE: f64 = 1e-6;
/// Minimum distance between contour nodes and the spectrum.
pub const CONTOUR_CLEARANCE: f64 = 1e-4;
/// Consecutive rank-stable additions that count as saturation.
pub const SATURATION_RUN: usize = 8;
const SATURATION_CAP: usize = 96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    S,
    T,
    SAdjoint,
    TAdjoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingSpec {
    pub mu0: Complex64,
    pub delta_samples: Vec<Complex64>,
    pub mu_samples: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    pub basis: CMatrix,
    pub side: Side,
    pub spec: SamplingSpec,
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Orthogonal projector onto the span.
    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }
}

/// Radius of a disc around the origin containing `σ(A_B)`, plus one.
pub fn spectral_radius_bound(ext: &Extension) -> Result<f64> {
    Ok(ext.spectrum()?.iter().map(|z| z.norm()).fold(0.0, f64::max) + 1.0)
}

fn circle(count: usize, radius: f64, phase: f64) -> impl Iterator<Item = Complex64> {
    (0..count).map(move |j| Complex64::from_polar(radius, phase + 2.0 * PI * j as f64 / count as f64))
}

impl SamplingSpec {
    /// Twelve points on each of the circles of radius `1.5R` and `2R`,
    /// `R` one more than the spectral radius, used for both `δ` and `μ`.
    /// `μ0` sits between the circles.
    pub fn default_for(ext: &Extension) -> Result<Self> {
        let r = spectral_radius_bound(ext)?;
        let samples: Vec<Complex64> = circle(12, 1.5 * r, 0.1).chain(circle(12, 2.0 * r, 0.35)).collect();
        Ok(Self { mu0: Complex64::from_polar(1.75 * r, 0.7), delta_samples: samples.clone(), mu_samples: samples })
    }

    /// The same samples reflected across the real axis.
    pub fn conjugated(&self) -> Self {
        Self {
            mu0: self.mu0.conj(),
            delta_samples: self.delta_samples.iter().map(|z| z.conj()).collect(),
            mu_samples: self.mu_samples.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn with_mu0(mut self, mu0: Complex64) -> Self {
        self.mu0 = mu0;
        self
    }
}

fn check_sample(spectrum: &[Complex64], z: Complex64) -> Result<()> {
    if spectrum.iter().any(|s| (s - z).norm() <= SAMPLE_CLEARANCE) {
        return Err(CoreError::SampleInSpectrum(z));
    }
    Ok(())
}

fn sample_pencil<'a>(ext: &'a Extension, spectrum: &[Complex64], z: Complex64) -> Result<crate::Pencil<'a>> {
    check_sample(spectrum, z)?;
    ext.at(z).map_err(|e| match e {
        CoreError::LambdaInSpectrum { .. } => CoreError::SampleInSpectrum(z),
        other => other,
    })
}

fn hcat(blocks: &[CMatrix], rows: usize) -> CMatrix {
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        out.columns_mut(at, b.ncols()).copy_from(b);
        at += b.ncols();
    }
    out
}

/// State parts of `S_{μ,B}` for each sample, as column blocks.
fn t_columns(ext: &Extension, spectrum: &[Complex64], mus: &[Complex64]) -> Result<Vec<CMatrix>> {
    let m = ext.triple().state_dim();
    mus.iter()
        .map(|&mu| Ok(sample_pencil(ext, spectrum, mu)?.solution_matrix()?.rows(0, m).into_owned()))
        .collect()
}

/// `(A_B − δ)^{-1} E S_{μ0,B}` for each sample, as column blocks.
fn s_columns(ext: &Extension, spectrum: &[Complex64], mu0: Complex64, deltas: &[Complex64]) -> Result<Vec<CMatrix>> {
    let m = ext.triple().state_dim();
    let seed = sample_pencil(ext, spectrum, mu0)?.solution_matrix()?.rows(0, m).into_owned();
    deltas
        .iter()
        .map(|&d| {
            let p = sample_pencil(ext, spectrum, d)?;
            Ok(p.resolvent_domain_matrix_apply(&seed)?.rows(0, m).into_owned())
        })
        .collect()
}

fn basis_of(blocks: &[CMatrix], rows: usize) -> CMatrix {
    orthonormal_basis(&hcat(blocks, rows), DEFAULT_RANK_TOL)
}

/// Orthonormal basis of `T` from the `μ` samples.
pub fn build_t(ext: &Extension, spec: &SamplingSpec) -> Result<SubspaceBasis> {
    let spectrum = ext.spectrum()?;
    let blocks = t_columns(ext, &spectrum, &spec.mu_samples)?;
    Ok(SubspaceBasis { basis: basis_of(&blocks, ext.triple().state_dim()), side: Side::T, spec: spec.clone() })
}

/// Orthonormal basis of `S` from `μ0` and the `δ` samples.
pub fn build_s(ext: &Extension, spec: &SamplingSpec) -> Result<SubspaceBasis> {
    let m = ext.triple().state_dim();
    if spec.delta_samples.is_empty() {
        return Ok(SubspaceBasis { basis: CMatrix::zeros(m, 0), side: Side::S, spec: spec.clone() });
    }
    let spectrum = ext.spectrum()?;
    let blocks = s_columns(ext, &spectrum, spec.mu0, &spec.delta_samples)?;
    Ok(SubspaceBasis { basis: basis_of(&blocks, m), side: Side::S, spec: spec.clone() })
}

/// `(S̃, T̃)` built from `Ã_{B*}` at the conjugated samples.
pub fn build_adjoint_spaces(ext: &Extension, spec: &SamplingSpec) -> Result<(SubspaceBasis, SubspaceBasis)> {
    let adj = ext.adjoint();
    let conj = spec.conjugated();
    let mut s = build_s(&adj, &conj)?;
    let mut t = build_t(&adj, &conj)?;
    s.side = Side::SAdjoint;
    t.side = Side::TAdjoint;
    s.spec = spec.clone();
    t.spec = spec.clone();
    Ok((s, t))
}

/// Result of a saturation run.
#[derive(Debug, Clone)]
pub struct Saturated {
    pub space: SubspaceBasis,
    /// Rank after each added point, starting with the initial samples.
    pub rank_history: Vec<usize>,
    pub saturated: bool,
}

/// Grows the sample set of one space until its rank has been stable for
/// [`SATURATION_RUN`] consecutive additions.
///
/// Extra points sit at golden-angle spacing on radii cycling through
/// `1.25R`, `1.5R` and `1.75R`.
pub fn saturate(ext: &Extension, spec: &SamplingSpec, side: Side) -> Result<Saturated> {
    let (target, spec_local) = match side {
        Side::S | Side::T => (ext.clone(), spec.clone()),
        Side::SAdjoint | Side::TAdjoint => (ext.adjoint(), spec.conjugated()),
    };
    let m = target.triple().state_dim();
    let spectrum = target.spectrum()?;
    let r = spectral_radius_bound(&target)?;
    let uses_delta = matches!(side, Side::S | Side::SAdjoint);

    let initial = if uses_delta { &spec_local.delta_samples } else { &spec_local.mu_samples };
    let mut samples = initial.clone();
    let mut blocks = if uses_delta {
        s_columns(&target, &spectrum, spec_local.mu0, &samples)?
    } else {
        t_columns(&target, &spectrum, &samples)?
    };
    let mut rank = basis_of(&blocks, m).ncols();
    let mut history = vec![rank];
    let mut stable = 0;
    let golden = PI * (3.0 - 5f64.sqrt());
    let mut j = 0;
    while stable < SATURATION_RUN && j < SATURATION_CAP {
        let z = Complex64::from_polar((1.25 + 0.25 * (j % 3) as f64) * r, 0.2 + golden * j as f64);
        j += 1;
        let new = if uses_delta {
            s_columns(&target, &spectrum, spec_local.mu0, &[z])?
        } else {
            t_columns(&target, &spectrum, &[z])?
        };
        samples.push(z);
        blocks.extend(new);
        let next = basis_of(&blocks, m).ncols();
        if next == rank {
            stable += 1;
        } else {
            stable = 0;
            rank = next;
        }
        history.push(next);
    }

    let mut grown = spec.clone();
    let reported: Vec<Complex64> = match side {
        Side::SAdjoint | Side::TAdjoint => samples.iter().map(|z| z.conj()).collect(),
        _ => samples,
    };
    if uses_delta {
        grown.delta_samples = reported;
    } else {
        grown.mu_samples = reported;
    }
    Ok(Saturated {
        space: SubspaceBasis { basis: basis_of(&blocks, m), side, spec: grown },
        rank_history: history,
        saturated: stable >= SATURATION_RUN,
    })
}

/// All four spaces, each saturated.
#[derive(Debug, Clone)]
pub struct DetectionSpaces {
    pub s: SubspaceBasis,
    pub t: SubspaceBasis,
    pub s_adjoint: SubspaceBasis,
    pub t_adjoint: SubspaceBasis,
    pub saturated: bool,
}

pub fn detection_spaces(ext: &Extension, spec: &SamplingSpec) -> Result<DetectionSpaces> {
    let s = saturate(ext, spec, Side::S)?;
    let t = saturate(ext, spec, Side::T)?;
    let sa = saturate(ext, spec, Side::SAdjoint)?;
    let ta = saturate(ext, spec, Side::TAdjoint)?;
    let saturated = s.saturated && t.saturated && sa.saturated && ta.saturated;
    Ok(DetectionSpaces { s: s.space, t: t.space, s_adjoint: sa.space, t_adjoint: ta.space, saturated })
}

/// `‖(I − P)(A_B − μ)^{-1}P‖` for the orthogonal projector `P` onto the
/// space.
pub fn invariance_residual(space: &SubspaceBasis, ext: &Extension, mu: Complex64) -> Result<f64> {
    let u = &space.basis;
    if u.ncols() == 0 {
        return Ok(0.0);
    }
    let image = ext.at(mu)?.resolvent_matrix()? * u;
    let leak = &image - u * (u.adjoint() * &image);
    Ok(spectral_norm(&leak))
}

/// `Ũ*(A_B − λ)^{-1}U` for orthonormal bases `Ũ` of the left space and `U`
/// of the right space.
pub fn bordered_resolvent(ext: &Extension, lambda: Complex64, left: &CMatrix, right: &CMatrix) -> Result<CMatrix> {
    let r = ext.at(lambda)?.resolvent_matrix()?;
    Ok(left.adjoint() * r * right)
}

/// Contour integrals of the bordered and the full resolvent.
#[derive(Debug, Clone, PartialEq)]
pub struct MoreraOutcome {
    /// `‖∮ Ũ*(A_B − λ)^{-1}U dλ‖`.
    pub bordered: f64,
    /// `‖∮ (A_B − λ)^{-1} dλ‖`, which is `2π‖P‖` for the Riesz projection
    /// `P` onto the enclosed spectrum.
    pub full: f64,
    /// `‖∮ M_B(λ) dλ‖`; nonzero when a pole of `M_B` is enclosed.
    pub m_integral: f64,
    /// Eigenvalues of `A_B` inside the contour.
    pub enclosed: Vec<Complex64>,
}

pub fn morera_residual(ext: &Extension, contour: &ContourSpec, left: &CMatrix, right: &CMatrix) -> Result<MoreraOutcome> {
    let spectrum = ext.spectrum()?;
    for &s in &spectrum {
        let d = contour.clearance([&s]);
        if d <= CONTOUR_CLEARANCE {
            return Err(CoreError::ContourHitsSpectrum { eigenvalue: s, distance: d });
        }
    }
    let m = ext.triple().state_dim();
    let mut full = CMatrix::zeros(m, m);
    let mut m_sum = CMatrix::zeros(ext.triple().k(), ext.triple().h());
    let mut bordered = CMatrix::zeros(left.ncols(), right.ncols());
    for (z, w) in contour.points() {
        let p = ext.at(z)?;
        let r = p.resolvent_matrix()?;
        bordered += left.adjoint() * &r * right * w;
        full += r * w;
        m_sum += p.m_matrix()? * w;
    }
    Ok(MoreraOutcome {
        bordered: spectral_norm(&bordered),
        full: spectral_norm(&full),
        m_integral: spectral_norm(&m_sum),
        enclosed: spectrum.into_iter().filter(|s| contour.encloses(*s)).collect(),
    })
}

/// `‖z (A_B − z)^{-1}‖` at `z = i t` for each `t`; boundedness as `t` grows
/// is the growth hypothesis under which `S` and `T` have equal closures.
pub fn growth_profile(ext: &Extension, ts: &[f64]) -> Result<Vec<f64>> {
    ts.iter()
        .map(|&t| {
            let z = Complex64::new(0.0, t);
            Ok(spectral_norm(&ext.at(z)?.resolvent_matrix()?) * z.norm())
        })
        .collect()
}
