//! Heralded single-photon subtraction and addition.
//!
//! A number-resolving detector with a single-mode kernel `D = MM*` heralds
//! one photon in the auxiliary beam. To leading order in the beamsplitter
//! reflectivity (or the down-conversion strength) this maps a Gaussian input
//! `W` onto a degree-two polynomial times the same Gaussian:
//!
//! ```text
//! subtraction:  (|u|² − ½η) W,          u = M*⋄(α − A⋄x − B⋄x*)
//! addition:     (|w|² − ½M_V*⋄(A+𝟙)⋄M_V) W,   w = M_V*⋄(α + A⋄x + B⋄x*)
//! ```
//!
//! with `x = α − ξ`, `η = M*⋄(A−𝟙)⋄M` and `M_V = V⋄M*`. Dividing by the
//! inverse normalization `𝒩⁻¹` gives a unit-mass state. The same results follow
//! from the generating functionals in `J` below by taking `∂_J` at `J = 0`.

use nalgebra::DVector;

use crate::mode::{gram_schmidt, FieldVector, Kernel, ALGEBRA_TOL};
use crate::reduction::marginalize;
use crate::states::{AffineForm, GaussianWigner, PolyGaussian};
use crate::transforms::WeakBogoliubov;
use crate::{Error, Result, C64};

/// Below this inverse normalization a herald is treated as impossible.
pub const HERALD_THRESHOLD: f64 = 1e-12;

/// Single-mode number-resolving detector, `D(k₁,k₂) = M(k₁)M*(k₂)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectorKernel {
    mode: FieldVector,
    kernel: Kernel,
}

impl DetectorKernel {
    /// Detector in the (normalized) mode `m`.
    pub fn new(m: &FieldVector) -> Result<Self> {
        let mode = m.normalized()?;
        let kernel = Kernel::outer(&mode, &mode)?;
        Ok(Self { mode, kernel })
    }

    /// Accepts only rank-one projectors with unit trace.
    pub fn from_kernel(d: &Kernel) -> Result<Self> {
        let scale = d.max_abs().max(1.0);
        let tr = d.trace();
        if !d.is_hermitian()
            || (tr - C64::new(1.0, 0.0)).norm() > ALGEBRA_TOL * scale
            || d.compose(d)?.max_diff(d)? > 1e-10 * scale
        {
            return Err(Error::MultimodeDetector);
        }
        // the largest column of a rank-one projector is M·M̄ⱼ
        let m = d.matrix();
        let j = (0..d.dim())
            .max_by(|&a, &b| m[(a, a)].re.total_cmp(&m[(b, b)].re))
            .expect("non-empty basis");
        let col = FieldVector::new(d.basis(), m.column(j).iter().copied().collect())?;
        Self::new(&col)
    }

    pub fn mode(&self) -> &FieldVector {
        &self.mode
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }
}

/// Moment of the heralding weight `𝒱[β]`, see [`projector_moments`].
#[derive(Clone, Debug, PartialEq)]
pub enum ProjectorMoment {
    Scalar(C64),
    Vector(FieldVector),
    Kernel(Kernel),
}

/// Moments `M_{m,n} = ∫ β*ᵐ βⁿ 𝒱[β] 𝒟°[β]` of the vacuum-weighted projector
/// generating function:
/// `M₀₀ = 1`, `M₁₁ = ½𝟙 − ¼(1−J)D`, `M₂₀ = M₀₂ = 0`, odd orders vanish.
pub fn projector_moments(det: &DetectorKernel, j: f64, m: u32, n: u32) -> Result<ProjectorMoment> {
    if !(j >= 0.0) {
        return Err(Error::Domain(format!("generating parameter J must be >= 0, got {j}")));
    }
    let basis = det.mode.basis();
    match (m, n) {
        _ if m + n > 2 => Err(Error::Unsupported(format!(
            "projector moment of total order {} (only orders <= 2 enter single-photon heralding)",
            m + n
        ))),
        (0, 0) => Ok(ProjectorMoment::Scalar(C64::new(1.0, 0.0))),
        (1, 0) | (0, 1) => Ok(ProjectorMoment::Vector(FieldVector::zeros(basis))),
        (1, 1) => Ok(ProjectorMoment::Kernel(
            Kernel::identity(basis)
                .scale(C64::new(0.5, 0.0))
                .sub(&det.kernel.scale(C64::new(0.25 * (1.0 - j), 0.0)))?,
        )),
        _ => Ok(ProjectorMoment::Kernel(Kernel::zeros(basis))),
    }
}

/// Which heralding map produced a state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeraldKind {
    Subtraction,
    Addition,
}

/// Normalized heralded state together with its normalization data.
#[derive(Clone, Debug)]
pub struct HeraldedState {
    kind: HeraldKind,
    state: PolyGaussian,
    norm_inverse: f64,
    subspace: Vec<FieldVector>,
    transformed_modes: Vec<FieldVector>,
}

impl HeraldedState {
    pub fn kind(&self) -> HeraldKind {
        self.kind
    }

    pub fn state(&self) -> &PolyGaussian {
        &self.state
    }

    /// `𝒩⁻¹`.
    pub fn norm_inverse(&self) -> f64 {
        self.norm_inverse
    }

    /// `𝒩`.
    pub fn norm_constant(&self) -> f64 {
        1.0 / self.norm_inverse
    }

    /// Orthonormal span of the polynomial's support.
    pub fn subspace(&self) -> &[FieldVector] {
        &self.subspace
    }

    /// `[M_E, M_B]` for subtraction, `[M_V]` for addition.
    pub fn transformed_modes(&self) -> &[FieldVector] {
        &self.transformed_modes
    }

    /// Heralding probability to leading order, `s²·𝒩⁻¹`, where `s` is the
    /// amplitude reflectivity `ζ` (subtraction) or the squeezing strength `ξ`
    /// (addition) whose square is dropped from the heralded state.
    pub fn success_probability(&self, strength: f64) -> f64 {
        strength * strength * self.norm_inverse
    }

    /// The heralded state before division by `𝒩⁻¹`.
    pub fn unnormalized(&self) -> PolyGaussian {
        self.state.scaled(self.norm_inverse)
    }

    pub fn eval(&self, alpha: &FieldVector) -> Result<f64> {
        self.state.eval(alpha)
    }

    /// Marginal on [`Self::subspace`].
    pub fn reduce(&self) -> Result<PolyGaussian> {
        marginalize(&self.state, &self.subspace)
    }
}

fn check_basis(w_in: &GaussianWigner, det: &DetectorKernel) -> Result<()> {
    if w_in.basis() != det.mode.basis() {
        return Err(Error::BasisMismatch);
    }
    Ok(())
}

/// `𝒩⁻¹ = tr{D⋄M₁₁} − ½tr{D}` for photon subtraction.
pub fn normalize_subtract(w_in: &GaussianWigner, det: &DetectorKernel) -> Result<f64> {
    check_basis(w_in, det)?;
    let (m11, _) = w_in.moments();
    let ninv = (det.kernel.compose(&m11)?.trace() - det.kernel.trace() * 0.5).re;
    if ninv < HERALD_THRESHOLD {
        return Err(Error::HeraldImpossible(ninv));
    }
    Ok(ninv)
}

/// `𝒩⁻¹ = M_V*⋄M₁₁⋄M_V + tr{D⋄F}` for photon addition.
pub fn normalize_add(w_in: &GaussianWigner, wb: &WeakBogoliubov, det: &DetectorKernel) -> Result<f64> {
    check_basis(w_in, det)?;
    let (m11, _) = w_in.moments();
    let mv = wb.transformed_mode(&det.mode)?;
    let ninv = (m11.sandwich(&mv, &mv)? + det.kernel.compose(wb.f())?.trace()).re;
    if ninv < HERALD_THRESHOLD {
        return Err(Error::HeraldImpossible(ninv));
    }
    Ok(ninv)
}

fn support_subspace(vs: &[&FieldVector]) -> Result<Vec<FieldVector>> {
    let nonzero: Vec<FieldVector> = vs.iter().filter(|v| v.norm() > 0.0).map(|v| (*v).clone()).collect();
    if nonzero.is_empty() {
        return Ok(Vec::new());
    }
    Ok(gram_schmidt(&nonzero)?.vectors)
}

/// Heralded single-photon subtraction from a Gaussian input.
pub fn subtract_photon(w_in: &GaussianWigner, det: &DetectorKernel) -> Result<HeraldedState> {
    let ninv = normalize_subtract(w_in, det)?;
    let m = &det.mode;
    let a = w_in.a();
    let b = w_in.b();
    let xi = w_in.mean();
    let m_e = a.apply(m)?.sub(m)?;
    let m_b = b.apply(&m.conj())?;
    let eta = m.inner(&m_e)?.re;
    let c0 = m.inner(&a.apply(xi)?.add(&b.apply(&xi.conj())?)?)?;
    let u = AffineForm {
        c0,
        p: m_e.scale(C64::new(-1.0, 0.0)),
        q: m_b.scale(C64::new(-1.0, 0.0)),
    };
    let raw = PolyGaussian::affine_square(w_in.clone(), &u, 0.5 * eta);
    Ok(HeraldedState {
        kind: HeraldKind::Subtraction,
        state: raw.scaled(1.0 / ninv),
        norm_inverse: ninv,
        subspace: support_subspace(&[&m_e, &m_b])?,
        transformed_modes: vec![m_e, m_b],
    })
}

/// Heralded single-photon addition by weak stimulated down-conversion.
pub fn add_photon(w_in: &GaussianWigner, wb: &WeakBogoliubov, det: &DetectorKernel) -> Result<HeraldedState> {
    if wb.basis() != w_in.basis() {
        return Err(Error::BasisMismatch);
    }
    let ninv = normalize_add(w_in, wb, det)?;
    let a = w_in.a();
    let b = w_in.b();
    let xi = w_in.mean();
    let mv = wb.transformed_mode(&det.mode)?;
    let p = a.apply(&mv)?.add(&mv)?;
    let q = b.apply(&mv.conj())?;
    let kappa = 0.5 * mv.inner(&p)?.re;
    let c0 = -mv.inner(&a.apply(xi)?.add(&b.apply(&xi.conj())?)?)?;
    let w = AffineForm { c0, p: p.clone(), q: q.clone() };
    let raw = PolyGaussian::affine_square(w_in.clone(), &w, kappa);
    Ok(HeraldedState {
        kind: HeraldKind::Addition,
        state: raw.scaled(1.0 / ninv),
        norm_inverse: ninv,
        subspace: support_subspace(&[&p, &q])?,
        transformed_modes: vec![mv],
    })
}

fn re(z: C64) -> f64 {
    z.re
}

/// Generating functional `𝒲₁ₚₛ[α](J)` of heralded subtraction, built term by
/// term from functional derivatives of the Gaussian input (reflectivity
/// factor `ζ²` dropped). Affine in `J`; `∂_J` at `J = 0` is the unnormalized
/// single-photon-subtracted state.
pub fn subtraction_generating_function(
    w_in: &GaussianWigner,
    det: &DetectorKernel,
    alpha: &FieldVector,
    j: f64,
) -> Result<f64> {
    check_basis(w_in, det)?;
    let dv = w_in.derivatives(alpha)?;
    let a = alpha.dvector();
    let ac: DVector<C64> = a.map(|z| z.conj());
    let d = det.kernel.matrix();
    let w = C64::new(dv.value, 0.0);
    let n = w_in.n_modes() as f64;

    let free = dv.dd_conj.trace() * 0.5 + dv.d.dot(a) * 0.5 + ac.dot(&dv.d_conj) * 0.5 + w * n;
    let herald = (d * &dv.dd_conj).trace()
        + det.kernel.trace() * w * 2.0
        + a.dotc(&(d * a)) * w * 4.0
        + dv.d.dot(&(d * a)) * 2.0
        + a.dotc(&(d * &dv.d_conj)) * 2.0;
    Ok(re(free - herald * (0.25 * (1.0 - j))))
}

/// Generating functional `𝒲₁ₚₐ[α](J)` of heralded addition (squeezing factor
/// `ξ²` dropped); `∂_J` at `J = 0` is the unnormalized photon-added state.
pub fn addition_generating_function(
    w_in: &GaussianWigner,
    wb: &WeakBogoliubov,
    det: &DetectorKernel,
    alpha: &FieldVector,
    j: f64,
) -> Result<f64> {
    check_basis(w_in, det)?;
    let dv = w_in.derivatives(alpha)?;
    let a = alpha.dvector();
    let ac: DVector<C64> = a.map(|z| z.conj());
    let f = wb.f().matrix();
    let w = C64::new(dv.value, 0.0);
    let mv = wb.transformed_mode(&det.mode)?;
    let g = mv.dvector();
    let g_alpha = g.dotc(a);

    let free = (f * &dv.dd_conj).trace() - dv.d.dot(&(f * a)) - ac.dot(&(f * &dv.d_conj)) - f.trace() * w * 2.0;
    let herald = g.dotc(&(&dv.dd_conj * g))
        - (det.kernel.matrix() * f).trace() * w * 4.0
        + C64::new(g_alpha.norm_sqr(), 0.0) * w * 4.0
        - g_alpha * g.dot(&dv.d) * 2.0
        - g.dotc(&dv.d_conj) * g_alpha.conj() * 2.0;
    Ok(re(free - herald * (0.25 * (1.0 - j))))
}
