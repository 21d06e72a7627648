//! Finite orthonormal mode basis and the `⋄` contraction algebra.
//!
//! The continuous measure over wavevectors is absorbed into the basis, so a
//! contraction `x*⋄K⋄y` is the sesquilinear product `x†·K·y`. Field vectors
//! and kernels are immutable values tagged with the basis they live in.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result, C64};

/// Default relative tolerance for algebraic identities.
pub const ALGEBRA_TOL: f64 = 1e-12;

/// Ordered set of orthonormal modes, identified by opaque labels.
#[derive(Clone)]
pub struct ModeBasis {
    labels: Arc<[String]>,
}

impl ModeBasis {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Domain("a mode basis needs at least one mode".into()));
        }
        Ok(Self { labels: labels.into() })
    }

    /// Basis with labels `{prefix}0 .. {prefix}{n-1}`.
    pub fn numbered(prefix: &str, n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| format!("{prefix}{i}")).collect())
    }

    pub fn n_modes(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    fn check(&self, other: &ModeBasis) -> Result<()> {
        if self.n_modes() != other.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes(),
                got: other.n_modes(),
            });
        }
        if self != other {
            return Err(Error::BasisMismatch);
        }
        Ok(())
    }
}

impl PartialEq for ModeBasis {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels
    }
}

impl fmt::Debug for ModeBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.labels.iter()).finish()
    }
}

/// Complex amplitudes of a field variable or mode function in a [`ModeBasis`].
#[derive(Clone, Debug, PartialEq)]
pub struct FieldVector {
    basis: ModeBasis,
    amps: DVector<C64>,
}

impl FieldVector {
    pub fn new(basis: &ModeBasis, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != basis.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: basis.n_modes(),
                got: amps.len(),
            });
        }
        Ok(Self {
            basis: basis.clone(),
            amps: DVector::from_vec(amps),
        })
    }

    pub fn from_real(basis: &ModeBasis, amps: &[f64]) -> Result<Self> {
        Self::new(basis, amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(basis: &ModeBasis) -> Self {
        Self {
            basis: basis.clone(),
            amps: DVector::zeros(basis.n_modes()),
        }
    }

    /// The `i`-th basis mode.
    pub fn unit(basis: &ModeBasis, i: usize) -> Result<Self> {
        if i >= basis.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: basis.n_modes(),
                got: i + 1,
            });
        }
        let mut v = Self::zeros(basis);
        v.amps[i] = C64::new(1.0, 0.0);
        Ok(v)
    }

    pub(crate) fn from_dvector(basis: &ModeBasis, amps: DVector<C64>) -> Self {
        debug_assert_eq!(amps.len(), basis.n_modes());
        Self {
            basis: basis.clone(),
            amps,
        }
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amps(&self) -> &[C64] {
        self.amps.as_slice()
    }

    pub(crate) fn dvector(&self) -> &DVector<C64> {
        &self.amps
    }

    /// `x*⋄y = Σᵢ x̄ᵢ yᵢ`, conjugating `self`.
    pub fn inner(&self, other: &FieldVector) -> Result<C64> {
        self.basis.check(&other.basis)?;
        Ok(self.amps.dotc(&other.amps))
    }

    /// `Σᵢ xᵢ yᵢ` without conjugation.
    pub fn bilinear(&self, other: &FieldVector) -> Result<C64> {
        self.basis.check(&other.basis)?;
        Ok(self.amps.dot(&other.amps))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.amps.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn conj(&self) -> Self {
        Self::from_dvector(&self.basis, self.amps.map(|z| z.conj()))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_dvector(&self.basis, &self.amps * c)
    }

    pub fn add(&self, other: &FieldVector) -> Result<Self> {
        self.basis.check(&other.basis)?;
        Ok(Self::from_dvector(&self.basis, &self.amps + &other.amps))
    }

    pub fn sub(&self, other: &FieldVector) -> Result<Self> {
        self.basis.check(&other.basis)?;
        Ok(Self::from_dvector(&self.basis, &self.amps - &other.amps))
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }
}

/// Two-point kernel `K(k₁,k₂)` as a square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    basis: ModeBasis,
    entries: DMatrix<C64>,
}

impl Kernel {
    pub fn new(basis: &ModeBasis, entries: DMatrix<C64>) -> Result<Self> {
        let n = basis.n_modes();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: entries.nrows().max(entries.ncols()),
            });
        }
        Ok(Self {
            basis: basis.clone(),
            entries,
        })
    }

    /// Row-major entries.
    pub fn from_rows(basis: &ModeBasis, rows: &[C64]) -> Result<Self> {
        let n = basis.n_modes();
        if rows.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: rows.len(),
            });
        }
        Self::new(basis, DMatrix::from_row_slice(n, n, rows))
    }

    pub(crate) fn from_matrix(basis: &ModeBasis, entries: DMatrix<C64>) -> Self {
        debug_assert_eq!(entries.nrows(), basis.n_modes());
        Self {
            basis: basis.clone(),
            entries,
        }
    }

    pub fn identity(basis: &ModeBasis) -> Self {
        let n = basis.n_modes();
        Self::from_matrix(basis, DMatrix::identity(n, n))
    }

    pub fn zeros(basis: &ModeBasis) -> Self {
        let n = basis.n_modes();
        Self::from_matrix(basis, DMatrix::zeros(n, n))
    }

    pub fn diagonal(basis: &ModeBasis, diag: &[C64]) -> Result<Self> {
        if diag.len() != basis.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: basis.n_modes(),
                got: diag.len(),
            });
        }
        Ok(Self::from_matrix(
            basis,
            DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        ))
    }

    /// Rank-one kernel `x y*`, i.e. `K(k₁,k₂) = x(k₁) ȳ(k₂)`.
    pub fn outer(x: &FieldVector, y: &FieldVector) -> Result<Self> {
        x.basis.check(&y.basis)?;
        Ok(Self::from_matrix(&x.basis, x.amps.clone() * y.amps.adjoint()))
    }

    /// Rank-one kernel `x yᵀ` without conjugation.
    pub fn outer_bilinear(x: &FieldVector, y: &FieldVector) -> Result<Self> {
        x.basis.check(&y.basis)?;
        Ok(Self::from_matrix(&x.basis, x.amps.clone() * y.amps.transpose()))
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[(i, j)]
    }

    /// `K⋄y`.
    pub fn apply(&self, y: &FieldVector) -> Result<FieldVector> {
        self.basis.check(&y.basis)?;
        Ok(FieldVector::from_dvector(&self.basis, &self.entries * &y.amps))
    }

    /// `K⋄L`.
    pub fn compose(&self, other: &Kernel) -> Result<Kernel> {
        self.basis.check(&other.basis)?;
        Ok(Self::from_matrix(&self.basis, &self.entries * &other.entries))
    }

    /// `x*⋄K⋄y`.
    pub fn sandwich(&self, x: &FieldVector, y: &FieldVector) -> Result<C64> {
        self.basis.check(&x.basis)?;
        self.basis.check(&y.basis)?;
        Ok(x.amps.dotc(&(&self.entries * &y.amps)))
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_matrix(&self.basis, self.entries.adjoint())
    }

    pub fn conj(&self) -> Self {
        Self::from_matrix(&self.basis, self.entries.map(|z| z.conj()))
    }

    pub fn transpose(&self) -> Self {
        Self::from_matrix(&self.basis, self.entries.transpose())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_matrix(&self.basis, &self.entries * c)
    }

    pub fn add(&self, other: &Kernel) -> Result<Self> {
        self.basis.check(&other.basis)?;
        Ok(Self::from_matrix(&self.basis, &self.entries + &other.entries))
    }

    pub fn sub(&self, other: &Kernel) -> Result<Self> {
        self.basis.check(&other.basis)?;
        Ok(Self::from_matrix(&self.basis, &self.entries - &other.entries))
    }

    pub fn inverse(&self) -> Result<Self> {
        self.entries
            .clone()
            .try_inverse()
            .map(|m| Self::from_matrix(&self.basis, m))
            .ok_or(Error::Singular("kernel inverse"))
    }

    pub fn determinant(&self) -> C64 {
        self.entries.determinant()
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.entries)
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_hermitian_within(ALGEBRA_TOL)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_symmetric_within(ALGEBRA_TOL)
    }

    pub fn is_hermitian_within(&self, rel: f64) -> bool {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        max_abs(&(&self.entries - self.entries.adjoint())) <= rel * scale
    }

    pub fn is_symmetric_within(&self, rel: f64) -> bool {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        max_abs(&(&self.entries - self.entries.transpose())) <= rel * scale
    }

    /// Largest entry magnitude of `self − other`.
    pub fn max_diff(&self, other: &Kernel) -> Result<f64> {
        self.basis.check(&other.basis)?;
        Ok(max_abs(&(&self.entries - &other.entries)))
    }
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Result of [`gram_schmidt`]: an orthonormal set and the expansion
/// coefficients of every input vector in it (`coeffs[(input, output)]`).
#[derive(Clone, Debug)]
pub struct GramSchmidt {
    pub vectors: Vec<FieldVector>,
    pub coeffs: DMatrix<C64>,
}

/// Orthonormalize `vs`, dropping residuals below `1e-12 · max‖v‖`.
pub fn gram_schmidt(vs: &[FieldVector]) -> Result<GramSchmidt> {
    gram_schmidt_with_tol(vs, ALGEBRA_TOL)
}

pub fn gram_schmidt_with_tol(vs: &[FieldVector], rel_tol: f64) -> Result<GramSchmidt> {
    let first = vs
        .first()
        .ok_or_else(|| Error::Domain("gram_schmidt needs at least one vector".into()))?;
    let basis = first.basis.clone();
    for v in vs {
        basis.check(&v.basis)?;
    }
    let max_norm = vs.iter().map(FieldVector::norm).fold(0.0, f64::max);
    let cutoff = rel_tol * max_norm;

    let mut out: Vec<DVector<C64>> = Vec::new();
    for v in vs {
        let mut r = v.amps.clone();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for e in &out {
                let c = e.dotc(&r);
                r -= e * c;
            }
        }
        let n = r.norm();
        if max_norm > 0.0 && n > cutoff {
            out.push(r / C64::new(n, 0.0));
        }
    }

    let mut coeffs = DMatrix::zeros(vs.len(), out.len());
    for (i, v) in vs.iter().enumerate() {
        for (j, e) in out.iter().enumerate() {
            coeffs[(i, j)] = e.dotc(&v.amps);
        }
    }
    Ok(GramSchmidt {
        vectors: out
            .into_iter()
            .map(|a| FieldVector::from_dvector(&basis, a))
            .collect(),
        coeffs,
    })
}
