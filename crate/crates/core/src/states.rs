//! Gaussian Wigner functionals and the polynomial-Gaussian container that
//! heralded states live in.
//!
//! A [`GaussianWigner`] is
//!
//! ```text
//! W(α) = exp(log_prefactor) · exp[−2x*⋄A⋄x − x*⋄B⋄x* − x⋄B*⋄x],   x = α − ξ
//! ```
//!
//! with `A` Hermitian and `B` symmetric. Stacking `z = (x, x̄)` the exponent is
//! `−z†Hz` with `H = [[A, B], [B̄, Ā]]`, which gives the closed forms used
//! below: `∫W ∏d²αᵢ/π = exp(log_prefactor)/(2ᴺ√det H)` and
//! `⟨z z†⟩ = ½H⁻¹`.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::mode::{FieldVector, Kernel, ModeBasis};
use crate::transforms::ab_from_uv;
use crate::{Error, Result, C64};

#[derive(Clone, Debug)]
pub struct GaussianWigner {
    a: Kernel,
    b: Kernel,
    mean: FieldVector,
    log_prefactor: f64,
    log_det_h: f64,
    // blocks of ½H⁻¹: ⟨x x†⟩ and ⟨x xᵀ⟩
    cov11: DMatrix<C64>,
    cov12: DMatrix<C64>,
}

impl GaussianWigner {
    /// Gaussian with an explicit (natural log) prefactor.
    pub fn new(a: Kernel, b: Kernel, mean: FieldVector, log_prefactor: f64) -> Result<Self> {
        if a.basis() != b.basis() || a.basis() != mean.basis() {
            return Err(Error::BasisMismatch);
        }
        if !a.is_hermitian() {
            return Err(Error::NotStructured("Hermitian (A)"));
        }
        if !b.is_symmetric() {
            return Err(Error::NotStructured("symmetric (B)"));
        }
        let n = a.dim();
        let mut h = DMatrix::<C64>::zeros(2 * n, 2 * n);
        // symmetrize away roundoff so the Cholesky factor sees an exactly
        // Hermitian matrix
        let am = (a.matrix() + a.matrix().adjoint()) * C64::new(0.5, 0.0);
        let bm = (b.matrix() + b.matrix().transpose()) * C64::new(0.5, 0.0);
        h.view_mut((0, 0), (n, n)).copy_from(&am);
        h.view_mut((0, n), (n, n)).copy_from(&bm);
        h.view_mut((n, 0), (n, n)).copy_from(&bm.map(|z| z.conj()));
        h.view_mut((n, n), (n, n)).copy_from(&am.map(|z| z.conj()));
        let chol = Cholesky::new(h).ok_or(Error::NotIntegrable)?;
        // the complex factorization takes square roots of negative pivots
        // instead of failing, so positivity is checked on the diagonal
        if chol.l_dirty().diagonal().iter().any(|z| !(z.re > 0.0) || z.im.abs() > 1e-12 * z.re) {
            return Err(Error::NotIntegrable);
        }
        let log_det_h = 2.0 * chol.l_dirty().diagonal().iter().map(|z| z.re.ln()).sum::<f64>();
        let cov = chol.inverse() * C64::new(0.5, 0.0);
        let cov11 = cov.view((0, 0), (n, n)).into_owned();
        let cov12 = cov.view((0, n), (n, n)).into_owned();
        let basis = a.basis().clone();
        Ok(Self {
            a: Kernel::from_matrix(&basis, am),
            b: Kernel::from_matrix(&basis, bm),
            mean,
            log_prefactor,
            log_det_h,
            cov11,
            cov12,
        })
    }

    /// Gaussian scaled to unit mass under `∏ d²αᵢ/π`.
    pub fn normalized(a: Kernel, b: Kernel, mean: FieldVector) -> Result<Self> {
        let mut g = Self::new(a, b, mean, 0.0)?;
        g.log_prefactor = g.normalized_log_prefactor();
        Ok(g)
    }

    /// `2ᴺ exp(−2|α|²)` per mode.
    pub fn vacuum(basis: &ModeBasis) -> Self {
        Self::coherent(&FieldVector::zeros(basis))
    }

    /// Displaced vacuum with amplitude `ξ`.
    pub fn coherent(xi: &FieldVector) -> Self {
        let basis = xi.basis();
        Self::normalized(Kernel::identity(basis), Kernel::zeros(basis), xi.clone())
            .expect("identity kernel is positive definite")
    }

    pub fn thermal(spec: &ThermalSpec) -> Self {
        let basis = spec.theta.basis();
        Self::normalized(spec.kernel(), Kernel::zeros(basis), FieldVector::zeros(basis))
            .expect("thermal kernel is positive definite")
    }

    /// Squeezed vacuum from a Bogoliubov pair via `A = U⋄U + V⋄V*`,
    /// `B = U⋄V + V⋄U*`.
    pub fn squeezed_vacuum(u: &Kernel, v: &Kernel) -> Result<Self> {
        let (a, b) = ab_from_uv(u, v)?;
        let mean = FieldVector::zeros(a.basis());
        Self::normalized(a, b, mean)
    }

    pub fn basis(&self) -> &ModeBasis {
        self.a.basis()
    }

    pub fn n_modes(&self) -> usize {
        self.a.dim()
    }

    pub fn a(&self) -> &Kernel {
        &self.a
    }

    pub fn b(&self) -> &Kernel {
        &self.b
    }

    pub fn mean(&self) -> &FieldVector {
        &self.mean
    }

    pub fn log_prefactor(&self) -> f64 {
        self.log_prefactor
    }

    /// `ln det H`; zero for pure states.
    pub fn log_det_h(&self) -> f64 {
        self.log_det_h
    }

    fn normalized_log_prefactor(&self) -> f64 {
        self.n_modes() as f64 * std::f64::consts::LN_2 + 0.5 * self.log_det_h
    }

    /// `∫ W ∏ d²αᵢ/π`.
    pub fn mass(&self) -> f64 {
        (self.log_prefactor - self.normalized_log_prefactor()).exp()
    }

    /// Same shape with a different prefactor.
    pub fn with_log_prefactor(&self, log_prefactor: f64) -> Self {
        Self {
            log_prefactor,
            ..self.clone()
        }
    }

    /// Second moments `(M11, M20)` with `M11[k',k] = ⟨α(k')α*(k)⟩` and
    /// `M20[k',k] = ⟨α(k')α(k)⟩`, including the mean. Mass is not divided
    /// out, so these are moments of the normalized state.
    pub fn moments(&self) -> (Kernel, Kernel) {
        let xi = self.mean.dvector();
        let m11 = xi * xi.adjoint() + &self.cov11;
        let m20 = xi * xi.transpose() + &self.cov12;
        let basis = self.basis();
        (Kernel::from_matrix(basis, m11), Kernel::from_matrix(basis, m20))
    }

    pub(crate) fn cov11(&self) -> &DMatrix<C64> {
        &self.cov11
    }

    pub(crate) fn cov12(&self) -> &DMatrix<C64> {
        &self.cov12
    }

    pub fn eval(&self, alpha: &FieldVector) -> Result<f64> {
        if alpha.basis() != self.basis() {
            return Err(Error::BasisMismatch);
        }
        Ok(self.eval_raw(alpha.dvector()))
    }

    pub(crate) fn eval_raw(&self, alpha: &DVector<C64>) -> f64 {
        (self.log_prefactor - self.exponent(alpha)).exp()
    }

    fn exponent(&self, alpha: &DVector<C64>) -> f64 {
        let x = alpha - self.mean.dvector();
        let ax = self.a.matrix() * &x;
        let bx = self.b.matrix() * x.map(|z| z.conj());
        2.0 * x.dotc(&ax).re + 2.0 * x.dotc(&bx).re
    }

    /// `g = A⋄x + B⋄x*`, so that `∂W/∂α*ₖ = −2gₖW` and `∂W/∂αₖ = −2ḡₖW`.
    pub(crate) fn gradient_vector(&self, alpha: &DVector<C64>) -> DVector<C64> {
        let x = alpha - self.mean.dvector();
        self.a.matrix() * &x + self.b.matrix() * x.map(|z| z.conj())
    }

    /// First and second derivatives at `α` (see [`Derivatives`]).
    pub fn derivatives(&self, alpha: &FieldVector) -> Result<Derivatives> {
        if alpha.basis() != self.basis() {
            return Err(Error::BasisMismatch);
        }
        let a = alpha.dvector();
        let w = self.eval_raw(a);
        let g = self.gradient_vector(a);
        let gc = g.map(|z| z.conj());
        let two = C64::new(2.0, 0.0);
        let four = C64::new(4.0, 0.0);
        let wc = C64::new(w, 0.0);
        Ok(Derivatives {
            value: w,
            d_conj: &g * (-two * wc),
            d: &gc * (-two * wc),
            dd_conj: (&g * gc.transpose() * four - self.a.matrix() * two) * wc,
            dd: (&gc * gc.transpose() * four - self.b.matrix().map(|z| z.conj()) * two) * wc,
            dd_conj_conj: (&g * g.transpose() * four - self.b.matrix() * two) * wc,
        })
    }
}

/// Closed-form derivatives of a Gaussian at one point.
///
/// `d_conj[k] = ∂W/∂α*ₖ`, `d[k] = ∂W/∂αₖ`, `dd_conj[(k,l)] = ∂²W/∂α*ₖ∂αₗ`,
/// `dd[(k,l)] = ∂²W/∂αₖ∂αₗ`, `dd_conj_conj[(k,l)] = ∂²W/∂α*ₖ∂α*ₗ`.
#[derive(Clone, Debug)]
pub struct Derivatives {
    pub value: f64,
    pub d_conj: DVector<C64>,
    pub d: DVector<C64>,
    pub dd_conj: DMatrix<C64>,
    pub dd: DMatrix<C64>,
    pub dd_conj_conj: DMatrix<C64>,
}

/// Max-norm residual of the purity identity `A − B⋄A*⁻¹⋄B* = A⁻¹`.
pub fn purity_check(g: &GaussianWigner) -> Result<f64> {
    let a_inv = g.a.inverse()?;
    let a_conj_inv = g.a.conj().inverse()?;
    let lhs = g
        .a
        .sub(&g.b.compose(&a_conj_inv)?.compose(&g.b.conj())?)?;
    lhs.max_diff(&a_inv)
}

/// Thermal state parameters: mean photon number `τ` in the normalized mode `Θ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThermalSpec {
    tau: f64,
    theta: FieldVector,
}

impl ThermalSpec {
    /// `theta` is normalized here; a zero mode is rejected.
    pub fn new(tau: f64, theta: &FieldVector) -> Result<Self> {
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(Error::Domain(format!("thermal photon number must be >= 0, got {tau}")));
        }
        Ok(Self {
            tau,
            theta: theta.normalized()?,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn theta(&self) -> &FieldVector {
        &self.theta
    }

    /// `T = 𝟙 − τ/(1+τ) ΘΘ*`.
    pub fn kernel(&self) -> Kernel {
        let proj = Kernel::outer(&self.theta, &self.theta).expect("same basis");
        Kernel::identity(self.theta.basis())
            .sub(&proj.scale(C64::new(self.tau / (1.0 + self.tau), 0.0)))
            .expect("same basis")
    }

    /// `det T = (1+τ)⁻¹`.
    pub fn determinant(&self) -> f64 {
        1.0 / (1.0 + self.tau)
    }
}

/// Degree-two Hermitian polynomial times a Gaussian:
///
/// ```text
/// P(α) = c + (lin*⋄α + c.c.) + α*⋄quad⋄α + (α*⋄anom⋄α* + c.c.)
/// ```
#[derive(Clone, Debug)]
pub struct PolyGaussian {
    pub(crate) base: GaussianWigner,
    pub(crate) c: f64,
    pub(crate) lin: FieldVector,
    pub(crate) quad: Kernel,
    pub(crate) anom: Kernel,
}

impl PolyGaussian {
    pub fn new(
        base: GaussianWigner,
        c: f64,
        lin: FieldVector,
        quad: Kernel,
        anom: Kernel,
    ) -> Result<Self> {
        let basis = base.basis();
        if lin.basis() != basis || quad.basis() != basis || anom.basis() != basis {
            return Err(Error::BasisMismatch);
        }
        if !quad.is_hermitian() {
            return Err(Error::NotStructured("Hermitian (quadratic coefficient)"));
        }
        if !anom.is_symmetric() {
            return Err(Error::NotStructured("symmetric (anomalous coefficient)"));
        }
        Ok(Self {
            base,
            c,
            lin,
            quad,
            anom,
        })
    }

    /// Constant polynomial `c`.
    pub fn constant(base: GaussianWigner, c: f64) -> Self {
        let basis = base.basis().clone();
        Self {
            base,
            c,
            lin: FieldVector::zeros(&basis),
            quad: Kernel::zeros(&basis),
            anom: Kernel::zeros(&basis),
        }
    }

    /// `|u(α)|² − κ` for an affine form `u`.
    pub(crate) fn affine_square(base: GaussianWigner, u: &AffineForm, kappa: f64) -> Self {
        let basis = base.basis().clone();
        let (p, q) = (u.p.dvector(), u.q.dvector());
        let lin = p * u.c0 + q * u.c0.conj();
        let quad = p * p.adjoint() + q * q.adjoint();
        let anom = (p * q.transpose() + q * p.transpose()) * C64::new(0.5, 0.0);
        Self {
            base,
            c: u.c0.norm_sqr() - kappa,
            lin: FieldVector::from_dvector(&basis, lin),
            quad: Kernel::from_matrix(&basis, quad),
            anom: Kernel::from_matrix(&basis, anom),
        }
    }

    pub fn base(&self) -> &GaussianWigner {
        &self.base
    }

    pub fn basis(&self) -> &ModeBasis {
        self.base.basis()
    }

    pub fn constant_term(&self) -> f64 {
        self.c
    }

    pub fn linear(&self) -> &FieldVector {
        &self.lin
    }

    pub fn quadratic(&self) -> &Kernel {
        &self.quad
    }

    pub fn anomalous(&self) -> &Kernel {
        &self.anom
    }

    /// The polynomial summed term by term without taking real parts; its
    /// imaginary part vanishes for consistent coefficients.
    pub fn polynomial_complex(&self, alpha: &FieldVector) -> Result<C64> {
        if alpha.basis() != self.basis() {
            return Err(Error::BasisMismatch);
        }
        let a = alpha.dvector();
        let ac = a.map(|z| z.conj());
        let l = self.lin.dvector().dotc(a);
        let qd = a.dotc(&(self.quad.matrix() * a));
        let an = a.dotc(&(self.anom.matrix() * &ac));
        let an_cc = a.dot(&(self.anom.matrix().map(|z| z.conj()) * a));
        Ok(C64::new(self.c, 0.0) + l + l.conj() + qd + an + an_cc)
    }

    pub fn polynomial(&self, alpha: &FieldVector) -> Result<f64> {
        if alpha.basis() != self.basis() {
            return Err(Error::BasisMismatch);
        }
        Ok(self.polynomial_raw(alpha.dvector()))
    }

    pub(crate) fn polynomial_raw(&self, a: &DVector<C64>) -> f64 {
        let l = self.lin.dvector().dotc(a).re;
        let qd = a.dotc(&(self.quad.matrix() * a)).re;
        let an = a.dotc(&(self.anom.matrix() * a.map(|z| z.conj()))).re;
        self.c + 2.0 * l + qd + 2.0 * an
    }

    pub fn eval(&self, alpha: &FieldVector) -> Result<f64> {
        Ok(self.polynomial(alpha)? * self.base.eval(alpha)?)
    }

    pub(crate) fn eval_raw(&self, a: &DVector<C64>) -> f64 {
        self.polynomial_raw(a) * self.base.eval_raw(a)
    }

    /// Expectation of the polynomial under the normalized base Gaussian.
    pub fn polynomial_mean(&self) -> f64 {
        let (m11, m20) = self.base.moments();
        let mean = self.base.mean.dvector();
        let l = self.lin.dvector().dotc(mean).re;
        let qd = (self.quad.matrix() * m11.matrix()).trace().re;
        let an: C64 = self
            .anom
            .matrix()
            .iter()
            .zip(m20.matrix().iter())
            .map(|(k, m)| k * m.conj())
            .sum();
        self.c + 2.0 * l + qd + 2.0 * an.re
    }

    /// `∫ P·W ∏ d²αᵢ/π`.
    pub fn mass(&self) -> f64 {
        self.polynomial_mean() * self.base.mass()
    }

    /// Multiplies the polynomial by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let f = C64::new(factor, 0.0);
        Self {
            base: self.base.clone(),
            c: self.c * factor,
            lin: self.lin.scale(f),
            quad: self.quad.scale(f),
            anom: self.anom.scale(f),
        }
    }

    /// Largest coefficient magnitude in the polynomial.
    pub(crate) fn coefficient_scale(&self) -> f64 {
        self.c
            .abs()
            .max(self.lin.max_abs())
            .max(self.quad.max_abs())
            .max(self.anom.max_abs())
    }
}

/// `u(α) = c₀ + p*⋄α + (q*⋄α)*`.
#[derive(Clone, Debug)]
pub(crate) struct AffineForm {
    pub c0: C64,
    pub p: FieldVector,
    pub q: FieldVector,
}

impl AffineForm {
    #[cfg(test)]
    pub fn eval(&self, alpha: &FieldVector) -> C64 {
        self.c0 + self.p.inner(alpha).unwrap() + self.q.inner(alpha).unwrap().conj()
    }
}
