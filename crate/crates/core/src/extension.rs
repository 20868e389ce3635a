//! Extensions `A_B = Ã*|ker(Γ1 − BΓ2)`, their resolvents, solution
//! operators and M-functions.
//!
//! Everything is computed from the constrained pencil
//!
//! ```text
//! K(λ) = [ T − λE  ]
//!        [ Γ1 − BΓ2 ]
//! ```
//!
//! which is square of size `m + h`. `K(λ)` is invertible exactly when
//! `λ ∈ ρ(A_B)`; the resolvent solves `K u = (f, 0)` and the solution
//! operator solves `K u = (0, g)`.

use std::sync::Arc;

use weyl_numerics::linalg::singular_values;
use weyl_numerics::{eigenvalues, null_space, spectral_norm, CMatrix, CVector, Complex64, Factorized, DEFAULT_RANK_TOL};

use crate::error::CoreError;
use crate::triple::FiniteTriple;
use crate::Result;

/// Relative smallest-singular-value threshold for spectrum membership.
pub const SPECTRUM_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Extension {
    triple: Arc<FiniteTriple>,
    b: CMatrix,
}

impl Extension {
    pub fn new(triple: Arc<FiniteTriple>, b: CMatrix) -> Result<Self> {
        if b.shape() != (triple.h(), triple.k()) {
            return Err(CoreError::DimensionMismatch(format!(
                "boundary parameter is {}x{}, expected {}x{}",
                b.nrows(),
                b.ncols(),
                triple.h(),
                triple.k()
            )));
        }
        Ok(Self { triple, b })
    }

    pub fn triple(&self) -> &FiniteTriple {
        &self.triple
    }

    pub fn triple_arc(&self) -> &Arc<FiniteTriple> {
        &self.triple
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    /// Same triple, different boundary parameter.
    pub fn with_b(&self, b: CMatrix) -> Result<Self> {
        Self::new(self.triple.clone(), b)
    }

    /// `Ã_{B*}`, the adjoint of `A_B`, as an extension of the adjoint triple.
    pub fn adjoint(&self) -> Self {
        Self { triple: Arc::new(self.triple.adjoint()), b: self.b.adjoint() }
    }

    /// `Γ1 − BΓ2`.
    pub fn constraint(&self) -> CMatrix {
        self.triple.g1() - &self.b * self.triple.g2()
    }

    /// The pencil `K(λ)`.
    pub fn system(&self, lambda: Complex64) -> CMatrix {
        let tr = &*self.triple;
        let (m, h) = (tr.state_dim(), tr.h());
        let mut k = CMatrix::zeros(m + h, m + h);
        k.rows_mut(0, m).copy_from(tr.t());
        for i in 0..m {
            k[(i, i)] -= lambda;
        }
        k.rows_mut(m, h).copy_from(&self.constraint());
        k
    }

    /// Factors `K(λ)` after checking that `λ` is in the resolvent set.
    pub fn at(&self, lambda: Complex64) -> Result<Pencil<'_>> {
        let k = self.system(lambda);
        let s = singular_values(&k);
        let top = s.first().copied().unwrap_or(0.0);
        let sigma_min = s.last().copied().unwrap_or(0.0);
        let threshold = SPECTRUM_TOL * top;
        if k.nrows() > 0 && sigma_min < threshold {
            return Err(CoreError::LambdaInSpectrum { lambda, sigma_min, threshold });
        }
        let lu = Factorized::new(&k).map_err(|_| CoreError::LambdaInSpectrum { lambda, sigma_min, threshold })?;
        Ok(Pencil { ext: self, lambda, lu, sigma_min })
    }

    /// Orthonormal basis of `ker(Γ1 − BΓ2)` and the action of `Ã*` on it.
    pub fn extension_matrix(&self) -> (CMatrix, CMatrix) {
        let z = null_space(&self.constraint(), DEFAULT_RANK_TOL);
        let action = self.triple.t() * &z;
        (z, action)
    }

    /// `A_B` as an `m × m` matrix on the state space.
    ///
    /// Requires the domain of `A_B` to project bijectively onto the state
    /// space, which holds whenever the boundary block of `Γ1 − BΓ2` is
    /// invertible.
    pub fn matrix_form(&self) -> Result<CMatrix> {
        let m = self.triple.state_dim();
        let (z, action) = self.extension_matrix();
        if z.ncols() != m {
            return Err(CoreError::DegenerateExtension);
        }
        let ez = z.rows(0, m).into_owned();
        // A_B (E Z) = T Z, solved as (E Z)^T A_B^T = (T Z)^T.
        let f = Factorized::new(&ez.transpose()).map_err(|_| CoreError::DegenerateExtension)?;
        Ok(f.solve_matrix(&action.transpose())?.transpose())
    }

    /// Eigenvalues of `A_B`.
    pub fn spectrum(&self) -> Result<Vec<Complex64>> {
        Ok(eigenvalues(&self.matrix_form()?)?)
    }

    /// `(A_B − λ)^{-1} rhs` on the state space.
    pub fn resolvent_apply(&self, lambda: Complex64, rhs: &CVector) -> Result<CVector> {
        self.at(lambda)?.resolvent(rhs)
    }

    /// `S_{λ,B} f` as a domain vector.
    pub fn solution_operator(&self, lambda: Complex64, f: &CVector) -> Result<CVector> {
        self.at(lambda)?.solution(f)
    }

    /// `S_{λ,B} f` computed from a lift `w` with `(Γ1 − BΓ2)w = f` as
    /// `w − (A_B − λ)^{-1}(Ã* − λ)w`.
    pub fn solution_via_lift(&self, lambda: Complex64, w: &CVector) -> Result<CVector> {
        let tr = &*self.triple;
        if w.len() != tr.domain_dim() {
            return Err(CoreError::DimensionMismatch(format!(
                "lift has length {}, expected {}",
                w.len(),
                tr.domain_dim()
            )));
        }
        let p = self.at(lambda)?;
        let applied = tr.t() * w - tr.state_part(w) * lambda;
        Ok(w - p.resolvent_domain(&applied)?)
    }

    /// `M_B(λ)`, a `k × h` matrix.
    pub fn m_function(&self, lambda: Complex64) -> Result<CMatrix> {
        self.at(lambda)?.m_matrix()
    }

    /// `Γ2 (I + (λ−λ0)(A_B − λ)^{-1}) S_{λ0,B}`, evaluated without forming
    /// `S_{λ,B}`.
    pub fn m_via_resolvent(&self, lambda: Complex64, lambda0: Complex64) -> Result<CMatrix> {
        let s0 = self.at(lambda0)?.solution_matrix()?;
        let p = self.at(lambda)?;
        let m = self.triple.state_dim();
        let moved = p.resolvent_domain_matrix_apply(&s0.rows(0, m).into_owned())?;
        Ok(self.triple.g2() * (s0 + moved * (lambda - lambda0)))
    }

    /// `‖S_{λ,B} f − S_{λ0,B} f − (λ−λ0)(A_B − λ)^{-1} S_{λ0,B} f‖`, with
    /// all three terms taken as domain vectors.
    pub fn hilbert_identity_residual(&self, lambda: Complex64, lambda0: Complex64, f: &CVector) -> Result<f64> {
        let p = self.at(lambda)?;
        let lhs = p.solution(f)?;
        let s0 = self.at(lambda0)?.solution(f)?;
        let moved = p.resolvent_domain(&self.triple.state_part(&s0))?;
        Ok((lhs - s0 - moved * (lambda - lambda0)).norm())
    }

    /// Operator norm of
    /// `(A_B−λ)^{-1} − (A_C−λ)^{-1} + S_{λ,C}(I + (B−C)M_B(λ))(C−B)Γ2(A_C−λ)^{-1}`
    /// on the state space, with `self = A_B`.
    pub fn krein_residual(&self, other: &Extension, lambda: Complex64) -> Result<f64> {
        let direct = self.at(lambda)?.resolvent_matrix()?;
        let correction = self.krein_correction(other, lambda)?;
        let via_c = other.at(lambda)?.resolvent_matrix()? - correction;
        Ok(spectral_norm(&(direct - via_c)))
    }

    /// `S_{λ,C}(I + (B−C)M_B(λ))(C−B)Γ2(A_C−λ)^{-1}` restricted to the state
    /// space, with `self = A_B` and `other = A_C`.
    pub fn krein_correction(&self, other: &Extension, lambda: Complex64) -> Result<CMatrix> {
        if !Arc::ptr_eq(&self.triple, &other.triple) && *self.triple != *other.triple {
            return Err(CoreError::DimensionMismatch("Krein formula needs two extensions of one triple".into()));
        }
        let tr = &*self.triple;
        let m = tr.state_dim();
        let h = tr.h();
        let mb = self.m_function(lambda)?;
        let pc = other.at(lambda)?;
        let sc = pc.solution_matrix()?;
        let rc = pc.resolvent_domain_matrix()?;
        let b_minus_c = &self.b - &other.b;
        let middle = CMatrix::identity(h, h) + &b_minus_c * mb;
        let full = sc * middle * (-b_minus_c) * tr.g2() * rc;
        Ok(full.rows(0, m).into_owned())
    }
}

/// A factored pencil `K(λ)` for one `λ ∈ ρ(A_B)`.
#[derive(Debug, Clone)]
pub struct Pencil<'a> {
    ext: &'a Extension,
    lambda: Complex64,
    lu: Factorized,
    sigma_min: f64,
}

impl Pencil<'_> {
    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    /// Smallest singular value of `K(λ)`, a distance-to-spectrum proxy.
    pub fn sigma_min(&self) -> f64 {
        self.sigma_min
    }

    fn m(&self) -> usize {
        self.ext.triple.state_dim()
    }

    fn h(&self) -> usize {
        self.ext.triple.h()
    }

    /// Domain vector `u ∈ ker(Γ1 − BΓ2)` with `(Ã* − λ)u = rhs`.
    pub fn resolvent_domain(&self, rhs: &CVector) -> Result<CVector> {
        if rhs.len() != self.m() {
            return Err(CoreError::DimensionMismatch(format!(
                "resolvent needs a state vector of length {}, got {}",
                self.m(),
                rhs.len()
            )));
        }
        let mut full = CVector::zeros(self.m() + self.h());
        full.rows_mut(0, self.m()).copy_from(rhs);
        Ok(self.lu.solve(&full)?)
    }

    /// `(A_B − λ)^{-1} rhs`.
    pub fn resolvent(&self, rhs: &CVector) -> Result<CVector> {
        let u = self.resolvent_domain(rhs)?;
        Ok(u.rows(0, self.m()).into_owned())
    }

    /// Domain vectors of `(A_B − λ)^{-1}` applied to each column of `rhs`.
    pub fn resolvent_domain_matrix_apply(&self, rhs: &CMatrix) -> Result<CMatrix> {
        let (m, h) = (self.m(), self.h());
        if rhs.nrows() != m {
            return Err(CoreError::DimensionMismatch(format!("expected {m} rows, got {}", rhs.nrows())));
        }
        let mut full = CMatrix::zeros(m + h, rhs.ncols());
        full.rows_mut(0, m).copy_from(rhs);
        Ok(self.lu.solve_matrix(&full)?)
    }

    /// `(m+h) × m` matrix sending a state vector to the domain vector of
    /// its resolvent image.
    pub fn resolvent_domain_matrix(&self) -> Result<CMatrix> {
        self.resolvent_domain_matrix_apply(&CMatrix::identity(self.m(), self.m()))
    }

    /// `(A_B − λ)^{-1}` as an `m × m` matrix.
    pub fn resolvent_matrix(&self) -> Result<CMatrix> {
        Ok(self.resolvent_domain_matrix()?.rows(0, self.m()).into_owned())
    }

    /// `S_{λ,B} f` as a domain vector.
    pub fn solution(&self, f: &CVector) -> Result<CVector> {
        if f.len() != self.h() {
            return Err(CoreError::DimensionMismatch(format!(
                "boundary data has length {}, expected {}",
                f.len(),
                self.h()
            )));
        }
        let mut full = CVector::zeros(self.m() + self.h());
        full.rows_mut(self.m(), self.h()).copy_from(f);
        Ok(self.lu.solve(&full)?)
    }

    /// `(m+h) × h` matrix of `S_{λ,B}` in the standard boundary basis.
    pub fn solution_matrix(&self) -> Result<CMatrix> {
        let (m, h) = (self.m(), self.h());
        let mut full = CMatrix::zeros(m + h, h);
        full.view_mut((m, 0), (h, h)).fill_with_identity();
        Ok(self.lu.solve_matrix(&full)?)
    }

    /// `M_B(λ) = Γ2 S_{λ,B}`.
    pub fn m_matrix(&self) -> Result<CMatrix> {
        Ok(self.ext.triple.g2() * self.solution_matrix()?)
    }
}
