//! Field-variable transformations: the homogeneous beamsplitter and the weak
//! twin-beam Bogoliubov transform, plus the kernel relations tying Bogoliubov
//! pairs to squeezed-state kernels.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::mode::{FieldVector, Kernel, ModeBasis};
use crate::{Error, Result, C64};

/// Tolerance used when validating Bogoliubov-derived kernels.
const PAIR_TOL: f64 = 1e-10;

/// Homogeneous beamsplitter with amplitude reflectivity `ζ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamsplitterSpec {
    zeta: f64,
}

impl BeamsplitterSpec {
    pub fn new(zeta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&zeta) {
            return Err(Error::Domain(format!("reflectivity must lie in [0, 1], got {zeta}")));
        }
        Ok(Self { zeta })
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// `α → √(1−ζ²)α + iζβ`, `β → √(1−ζ²)β + iζα`.
    pub fn map(&self, alpha: &FieldVector, beta: &FieldVector) -> Result<(FieldVector, FieldVector)> {
        let t = C64::new((1.0 - self.zeta * self.zeta).sqrt(), 0.0);
        let r = C64::new(0.0, self.zeta);
        let a = alpha.scale(t).add(&beta.scale(r))?;
        let b = beta.scale(t).add(&alpha.scale(r))?;
        Ok((a, b))
    }
}

/// Weak-squeezing Bogoliubov kernels `U → 𝟙 + ξ²F`, `V → ξV` with
/// `F = ½V⋄V*`.
///
/// The same `V` acts on both arms, which is only consistent for a symmetric
/// kernel; non-symmetric `V` is rejected.
#[derive(Clone, Debug)]
pub struct WeakBogoliubov {
    v: Kernel,
    f: Kernel,
    xi: f64,
}

impl WeakBogoliubov {
    pub fn new(v: Kernel, xi: f64) -> Result<Self> {
        if !(xi >= 0.0) || !xi.is_finite() {
            return Err(Error::Domain(format!("squeezing strength must be >= 0, got {xi}")));
        }
        if !v.is_symmetric_within(PAIR_TOL) {
            return Err(Error::InvalidPair("twin-beam kernel V must be symmetric".into()));
        }
        let f = v.compose(&v.conj())?.scale(C64::new(0.5, 0.0));
        Ok(Self { v, f, xi })
    }

    pub fn v(&self) -> &Kernel {
        &self.v
    }

    pub fn f(&self) -> &Kernel {
        &self.f
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn basis(&self) -> &ModeBasis {
        self.v.basis()
    }

    /// Same kernels at a different strength.
    pub fn with_xi(&self, xi: f64) -> Result<Self> {
        Self::new(self.v.clone(), xi)
    }

    /// Transformed detector mode `M_V = V⋄M*`.
    pub fn transformed_mode(&self, detector_mode: &FieldVector) -> Result<FieldVector> {
        self.v.apply(&detector_mode.conj())
    }

    /// `α → (𝟙+ξ²F)⋄α + ξV⋄β*`, `β → (𝟙+ξ²F)⋄β + ξV⋄α*`.
    pub fn map(&self, alpha: &FieldVector, beta: &FieldVector) -> Result<(FieldVector, FieldVector)> {
        let xi = self.xi;
        let u = Kernel::identity(self.basis()).add(&self.f.scale(C64::new(xi * xi, 0.0)))?;
        let xv = self.v.scale(C64::new(xi, 0.0));
        let a = u.apply(alpha)?.add(&xv.apply(&beta.conj())?)?;
        let b = u.apply(beta)?.add(&xv.apply(&alpha.conj())?)?;
        Ok((a, b))
    }
}

/// `A = U⋄U + V⋄V*`, `B = U⋄V + V⋄U*`, validated Hermitian / symmetric.
pub fn ab_from_uv(u: &Kernel, v: &Kernel) -> Result<(Kernel, Kernel)> {
    let a = u.compose(u)?.add(&v.compose(&v.conj())?)?;
    let b = u.compose(v)?.add(&v.compose(&u.conj())?)?;
    if !a.is_hermitian_within(PAIR_TOL) {
        return Err(Error::InvalidPair("A = U⋄U + V⋄V* is not Hermitian".into()));
    }
    if !b.is_symmetric_within(PAIR_TOL) {
        return Err(Error::InvalidPair("B = U⋄V + V⋄U* is not symmetric".into()));
    }
    Ok((a, b))
}

/// Bogoliubov pair diagonal in the columns of the unitary `modes`:
/// `U = W diag(cosh rᵢ) W†`, `V = W diag(e^{iφᵢ} sinh rᵢ) Wᵀ`.
pub fn squeezer_pair_in_modes(
    basis: &ModeBasis,
    modes: &DMatrix<C64>,
    r: &[f64],
    phi: &[f64],
) -> Result<(Kernel, Kernel)> {
    let n = basis.n_modes();
    if r.len() != n || phi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: r.len().min(phi.len()),
        });
    }
    if modes.nrows() != n || modes.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: modes.nrows(),
        });
    }
    let id = DMatrix::<C64>::identity(n, n);
    if crate::mode::max_abs(&(modes.adjoint() * modes - &id)) > PAIR_TOL {
        return Err(Error::InvalidPair("mode transform is not unitary".into()));
    }
    let ch = DMatrix::from_fn(n, n, |i, j| if i == j { C64::new(r[i].cosh(), 0.0) } else { C64::new(0.0, 0.0) });
    let sh = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::from_polar(r[i].sinh(), phi[i])
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let u = modes * ch * modes.adjoint();
    let v = modes * sh * modes.transpose();
    Ok((Kernel::new(basis, u)?, Kernel::new(basis, v)?))
}

/// [`squeezer_pair_in_modes`] with a Haar-random mode transform.
pub fn squeezer_pair<R: Rng + ?Sized>(
    basis: &ModeBasis,
    r: &[f64],
    phi: &[f64],
    rng: &mut R,
) -> Result<(Kernel, Kernel)> {
    let w = random_unitary(basis.n_modes(), rng);
    squeezer_pair_in_modes(basis, &w, r, phi)
}

/// Haar-random unitary from the QR decomposition of a complex Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Deterministic RNG used for mode embeddings and Monte-Carlo.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{purity_check, GaussianWigner};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn beamsplitter_examples() {
        let b = ModeBasis::numbered("m", 2).unwrap();
        let a = FieldVector::unit(&b, 0).unwrap();
        let bb = FieldVector::unit(&b, 1).unwrap();
        let (a0, b0) = BeamsplitterSpec::new(0.0).unwrap().map(&a, &bb).unwrap();
        assert_eq!((a0, b0), (a.clone(), bb.clone()));
        let (a1, b1) = BeamsplitterSpec::new(1.0).unwrap().map(&a, &bb).unwrap();
        assert!(a1.sub(&bb.scale(c(0.0, 1.0))).unwrap().norm() < 1e-15);
        assert!(b1.sub(&a.scale(c(0.0, 1.0))).unwrap().norm() < 1e-15);
        let (a6, b6) = BeamsplitterSpec::new(0.6).unwrap().map(&a, &bb).unwrap();
        let want_a = FieldVector::new(&b, vec![c(0.8, 0.0), c(0.0, 0.6)]).unwrap();
        let want_b = FieldVector::new(&b, vec![c(0.0, 0.6), c(0.8, 0.0)]).unwrap();
        assert!(a6.sub(&want_a).unwrap().norm() < 1e-15);
        assert!(b6.sub(&want_b).unwrap().norm() < 1e-15);
        assert!(BeamsplitterSpec::new(1.2).is_err());
    }

    #[test]
    fn twin_beam_examples() {
        let b = ModeBasis::numbered("m", 1).unwrap();
        let v = Kernel::identity(&b);
        let wb = WeakBogoliubov::new(v, 0.1).unwrap();
        assert!((wb.f().get(0, 0) - c(0.5, 0.0)).norm() < 1e-15);
        let a = FieldVector::from_real(&b, &[1.0]).unwrap();
        let z = FieldVector::zeros(&b);
        let (a1, b1) = wb.map(&a, &z).unwrap();
        assert!((a1.amps()[0] - c(1.005, 0.0)).norm() < 1e-15);
        assert!((b1.amps()[0] - c(0.1, 0.0)).norm() < 1e-15);
        let (a0, b0) = wb.with_xi(0.0).unwrap().map(&a, &z).unwrap();
        assert_eq!((a0, b0), (a, z));
    }

    #[test]
    fn twin_beam_rejects_asymmetric_kernel() {
        let b = ModeBasis::numbered("m", 2).unwrap();
        let v = Kernel::from_rows(&b, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(WeakBogoliubov::new(v, 0.1), Err(Error::InvalidPair(_))));
    }

    #[test]
    fn ab_from_uv_examples() {
        let b = ModeBasis::numbered("m", 2).unwrap();
        let (a, bb) = ab_from_uv(&Kernel::identity(&b), &Kernel::zeros(&b)).unwrap();
        assert_eq!(a, Kernel::identity(&b));
        assert_eq!(bb, Kernel::zeros(&b));

        let b1 = ModeBasis::numbered("m", 1).unwrap();
        let r: f64 = 0.8;
        let u = Kernel::diagonal(&b1, &[c(r.cosh(), 0.0)]).unwrap();
        let v = Kernel::diagonal(&b1, &[c(r.sinh(), 0.0)]).unwrap();
        let (a, bb) = ab_from_uv(&u, &v).unwrap();
        assert!((a.get(0, 0) - c((2.0 * r).cosh(), 0.0)).norm() < 1e-14);
        assert!((bb.get(0, 0) - c((2.0 * r).sinh(), 0.0)).norm() < 1e-14);

        // non-Hermitian U gives a non-Hermitian A
        let u = Kernel::from_rows(&b, &[c(1.0, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matches!(ab_from_uv(&u, &Kernel::zeros(&b)), Err(Error::InvalidPair(_))));
    }

    #[test]
    fn weak_form_expands_to_first_order_in_f() {
        // A = (𝟙+ξ²F)² + ξ²V⋄V* = 𝟙 + 4ξ²F + O(ξ⁴) with F = ½V⋄V*, so
        // A − 𝟙 − 4ξ²F shrinks like ξ⁴.
        let b = ModeBasis::numbered("m", 3).unwrap();
        let mut rng = seeded_rng(5);
        let (_, v) = squeezer_pair(&b, &[0.9, 0.4, 0.2], &[0.3, 1.0, -0.5], &mut rng).unwrap();
        let wb = WeakBogoliubov::new(v, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for &xi in &[0.1, 0.05, 0.025] {
            let x2 = C64::new(xi * xi, 0.0);
            let u = Kernel::identity(&b).add(&wb.f().scale(x2)).unwrap();
            let vv = wb.v().scale(C64::new(xi, 0.0));
            let (a, _) = ab_from_uv(&u, &vv).unwrap();
            let lead = Kernel::identity(&b).add(&wb.f().scale(x2 * 4.0)).unwrap();
            let res = a.max_diff(&lead).unwrap();
            assert!(res <= 2.0 * xi.powi(4) * wb.f().max_abs().powi(2) + 1e-15);
            assert!(res < prev);
            prev = res;
        }
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = seeded_rng(1);
        let w = random_unitary(6, &mut rng);
        let id = DMatrix::<C64>::identity(6, 6);
        assert!(crate::mode::max_abs(&(w.adjoint() * &w - id)) < 1e-13);
    }

    #[test]
    fn exact_pairs_are_pure() {
        let mut rng = seeded_rng(2);
        for n in 1..=6 {
            let b = ModeBasis::numbered("m", n).unwrap();
            let r: Vec<f64> = (0..n).map(|i| 0.1 + 0.15 * i as f64).collect();
            let phi: Vec<f64> = (0..n).map(|i| 0.7 * i as f64).collect();
            let (u, v) = squeezer_pair(&b, &r, &phi, &mut rng).unwrap();
            let g = GaussianWigner::squeezed_vacuum(&u, &v).unwrap();
            assert!(purity_check(&g).unwrap() <= 1e-10);
        }
    }

    fn arb_c() -> impl Strategy<Value = C64> {
        (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C64::new(a, b))
    }

    proptest! {
        #[test]
        fn beamsplitter_is_unitary(zeta in 0.0..=1.0f64, a in prop::collection::vec(arb_c(), 3), b in prop::collection::vec(arb_c(), 3)) {
            let basis = ModeBasis::numbered("m", 3).unwrap();
            let a = FieldVector::new(&basis, a).unwrap();
            let b = FieldVector::new(&basis, b).unwrap();
            let (a1, b1) = BeamsplitterSpec::new(zeta).unwrap().map(&a, &b).unwrap();
            let before = a.norm_sqr() + b.norm_sqr();
            let after = a1.norm_sqr() + b1.norm_sqr();
            prop_assert!((before - after).abs() <= 1e-13 * before.max(1.0));
        }

        #[test]
        fn twin_beam_inverse_to_second_order(xi in 0.0..=0.1f64, seed in 0u64..1000) {
            let basis = ModeBasis::numbered("m", 3).unwrap();
            let mut rng = seeded_rng(seed);
            let (_, v) = squeezer_pair(&basis, &[0.8, 0.5, 0.3], &[0.0, 1.0, 2.0], &mut rng).unwrap();
            let v = v.scale(C64::new(1.0 / v.max_abs(), 0.0));
            let fwd = WeakBogoliubov::new(v.clone(), xi).unwrap();
            let back = WeakBogoliubov::new(v.scale(C64::new(-1.0, 0.0)), xi).unwrap();
            let a = FieldVector::new(&basis, vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8), C64::new(0.0, 0.0)]).unwrap();
            let b = FieldVector::new(&basis, vec![C64::new(0.0, 0.0), C64::new(0.6, 0.0), C64::new(0.0, -0.8)]).unwrap();
            let (a1, b1) = fwd.map(&a, &b).unwrap();
            let (a2, b2) = back.map(&a1, &b1).unwrap();
            let res = a2.sub(&a).unwrap().norm().max(b2.sub(&b).unwrap().norm());
            prop_assert!(res <= 3.0 * xi * xi + 1e-15);
        }

        #[test]
        fn twin_beam_amplifies_vacuum_seeded_idler(xi in 0.0..=0.1f64, seed in 0u64..1000, a in prop::collection::vec(arb_c(), 3)) {
            // with a vacuum idler input, ‖α'‖² + ‖β'‖² − ‖α‖² = ξ²(2α*⋄F⋄α + ‖V⋄α*‖²) + O(ξ⁴) ≥ 0
            let basis = ModeBasis::numbered("m", 3).unwrap();
            let mut rng = seeded_rng(seed);
            let (_, v) = squeezer_pair(&basis, &[0.8, 0.5, 0.3], &[0.0, 1.0, 2.0], &mut rng).unwrap();
            let wb = WeakBogoliubov::new(v, xi).unwrap();
            let a = FieldVector::new(&basis, a).unwrap();
            let (a1, b1) = wb.map(&a, &FieldVector::zeros(&basis)).unwrap();
            prop_assert!(a1.norm_sqr() + b1.norm_sqr() - a.norm_sqr() >= -1e-14);
        }

        #[test]
        fn twin_beam_conserves_photon_difference(xi in 0.0..=0.1f64, seed in 0u64..1000, a in prop::collection::vec(arb_c(), 3), b in prop::collection::vec(arb_c(), 3)) {
            let basis = ModeBasis::numbered("m", 3).unwrap();
            let mut rng = seeded_rng(seed);
            let (_, v) = squeezer_pair(&basis, &[0.8, 0.5, 0.3], &[0.0, 1.0, 2.0], &mut rng).unwrap();
            let v = v.scale(C64::new(1.0 / v.max_abs(), 0.0));
            let wb = WeakBogoliubov::new(v, xi).unwrap();
            let a = FieldVector::new(&basis, a).unwrap();
            let b = FieldVector::new(&basis, b).unwrap();
            let (a1, b1) = wb.map(&a, &b).unwrap();
            let d0 = a.norm_sqr() - b.norm_sqr();
            let d1 = a1.norm_sqr() - b1.norm_sqr();
            prop_assert!((d1 - d0).abs() <= 50.0 * xi.powi(3) + 1e-14);
        }
    }
}
