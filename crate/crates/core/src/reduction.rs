//! Marginals onto low-dimensional subspaces, grid sampling and negativity
//! metrics.
//!
//! A heralded state's polynomial only depends on a handful of directions (the
//! transformed detector modes). Tracing out the orthogonal complement leaves
//! the polynomial untouched and replaces the Gaussian by its exact marginal,
//! giving a one- or two-mode Wigner function that can be sampled densely.

use nalgebra::{DMatrix, DVector};

use crate::mode::{max_abs, FieldVector, Kernel, ModeBasis};
use crate::states::{GaussianWigner, PolyGaussian};
use crate::{Error, Result, C64};

/// Tolerance for the polynomial leaving the reduction subspace, relative to
/// its largest coefficient.
pub const REDUCTION_TOL: f64 = 1e-10;

/// `|a*⋄b|² / (‖a‖²‖b‖²)`.
pub fn mode_overlap(a: &FieldVector, b: &FieldVector) -> Result<f64> {
    let (na, nb) = (a.norm_sqr(), b.norm_sqr());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((a.inner(b)?.norm_sqr() / (na * nb)).min(1.0))
}

fn subspace_matrix(p: &PolyGaussian, subspace: &[FieldVector]) -> Result<DMatrix<C64>> {
    if subspace.is_empty() {
        return Err(Error::Domain("reduction subspace is empty".into()));
    }
    let n = p.basis().n_modes();
    let k = subspace.len();
    let mut s = DMatrix::<C64>::zeros(n, k);
    for (j, v) in subspace.iter().enumerate() {
        if v.basis() != p.basis() {
            return Err(Error::BasisMismatch);
        }
        s.set_column(j, v.dvector());
    }
    let gram = s.adjoint() * &s - DMatrix::<C64>::identity(k, k);
    if max_abs(&gram) > 1e-10 {
        return Err(Error::Domain("reduction subspace is not orthonormal".into()));
    }
    Ok(s)
}

/// Trace out everything orthogonal to the orthonormal `subspace`. The reduced
/// coordinates are `cⱼ = subspace[j]*⋄α`.
pub fn marginalize(p: &PolyGaussian, subspace: &[FieldVector]) -> Result<PolyGaussian> {
    let s = subspace_matrix(p, subspace)?;
    let k = subspace.len();
    let sc = s.map(|z| z.conj());
    let proj = &s * s.adjoint();
    let proj_c = proj.map(|z| z.conj());

    let lin = p.linear().dvector();
    let quad = p.quadratic().matrix();
    let anom = p.anomalous().matrix();
    let residual = (lin - &proj * lin)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(max_abs(&(quad - &proj * quad * &proj)))
        .max(max_abs(&(anom - &proj * anom * &proj_c)));
    let scale = p.coefficient_scale();
    if residual > REDUCTION_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidReduction(residual / scale));
    }

    let labels = (0..k).map(|j| format!("s{j}")).collect();
    let rb = ModeBasis::new(labels)?;
    let base = p.base();
    let c11 = s.adjoint() * base.cov11() * &s;
    let c12 = s.adjoint() * base.cov12() * &sc;
    let mut cov = DMatrix::<C64>::zeros(2 * k, 2 * k);
    cov.view_mut((0, 0), (k, k)).copy_from(&c11);
    cov.view_mut((0, k), (k, k)).copy_from(&c12);
    cov.view_mut((k, 0), (k, k)).copy_from(&c12.adjoint());
    cov.view_mut((k, k), (k, k)).copy_from(&c11.map(|z| z.conj()));
    let h = cov
        .try_inverse()
        .ok_or(Error::Singular("reduced covariance"))?
        * C64::new(0.5, 0.0);
    let a_r = h.view((0, 0), (k, k)).into_owned();
    let b_r = h.view((0, k), (k, k)).into_owned();
    let herm = |m: DMatrix<C64>| (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let sym = |m: DMatrix<C64>| (&m + m.transpose()) * C64::new(0.5, 0.0);
    let mean = FieldVector::from_dvector(&rb, s.adjoint() * base.mean().dvector());
    let g = GaussianWigner::normalized(
        Kernel::from_matrix(&rb, herm(a_r)),
        Kernel::from_matrix(&rb, sym(b_r)),
        mean,
    )?;
    let g = g.with_log_prefactor(g.log_prefactor() + base.mass().ln());

    let quad_r = s.adjoint() * quad * &s;
    let anom_r = s.adjoint() * anom * &sc;
    PolyGaussian::new(
        g,
        p.constant_term(),
        FieldVector::from_dvector(&rb, s.adjoint() * lin),
        Kernel::from_matrix(&rb, herm(quad_r)),
        Kernel::from_matrix(&rb, sym(anom_r)),
    )
}

/// Uniform axis `min..=max` with `n` points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        let ax = Self { min, max, n };
        ax.validate()?;
        Ok(ax)
    }

    /// Default reduced-state axis, `[−4, 4]` with 161 points.
    pub fn standard() -> Self {
        Self {
            min: -4.0,
            max: 4.0,
            n: 161,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::InvalidGrid("axis bounds must be finite".into()));
        }
        if self.n < 2 {
            return Err(Error::InvalidGrid(format!("axis needs at least 2 points, got {}", self.n)));
        }
        if self.step() <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "axis step must be positive (min {}, max {})",
                self.min, self.max
            )));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.n as f64 - 1.0)
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.max
        } else {
            self.min + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.point(i))
    }
}

/// Sampled reduced Wigner function on a 2D `(q, p)` or 4D `(q1, p1, q2, p2)`
/// grid, stored row-major with the first axis outermost.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedWignerGrid {
    axes: Vec<Axis>,
    values: Vec<f64>,
    labels: Vec<String>,
}

/// Output of [`ReducedWignerGrid::negativity_metrics`].
#[derive(Clone, Debug, PartialEq)]
pub struct NegativityMetrics {
    pub min_value: f64,
    pub argmin: Vec<f64>,
    pub negative_volume: f64,
}

impl ReducedWignerGrid {
    pub fn new(axes: Vec<Axis>, values: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        if axes.len() != 2 && axes.len() != 4 {
            return Err(Error::InvalidGrid(format!("grid must be 2D or 4D, got {}D", axes.len())));
        }
        if labels.len() * 2 != axes.len() {
            return Err(Error::InvalidGrid("need one mode label per (q, p) axis pair".into()));
        }
        for ax in &axes {
            ax.validate()?;
        }
        let len: usize = axes.iter().map(|a| a.n).product();
        if values.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: values.len(),
            });
        }
        Ok(Self { axes, values, labels })
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Grid coordinates of the flat index `idx`.
    pub fn coords(&self, idx: usize) -> Vec<f64> {
        let mut rem = idx;
        let mut out = vec![0.0; self.axes.len()];
        for (d, ax) in self.axes.iter().enumerate().rev() {
            out[d] = ax.point(rem % ax.n);
            rem /= ax.n;
        }
        out
    }

    /// `∏ dqᵢ dpᵢ / π` for one cell.
    pub fn cell_measure(&self) -> f64 {
        let k = (self.axes.len() / 2) as i32;
        self.axes.iter().map(Axis::step).product::<f64>() / std::f64::consts::PI.powi(k)
    }

    /// Riemann sum of the grid under `∏ d²αᵢ/π`.
    pub fn quadrature(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_measure()
    }

    pub fn negativity_metrics(&self) -> NegativityMetrics {
        let (imin, &min_value) = self
            .values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("grid is non-empty");
        let neg: f64 = self.values.iter().filter(|&&w| w < 0.0).map(|w| -w).sum();
        NegativityMetrics {
            min_value,
            argmin: self.coords(imin),
            negative_volume: neg * self.cell_measure(),
        }
    }

    /// 2D section of a 4D grid: keep mode `keep` and fix the other mode's
    /// `(q, p)` axis indices.
    pub fn section(&self, keep: usize, fixed: (usize, usize)) -> Result<ReducedWignerGrid> {
        if self.dims() != 4 || keep > 1 {
            return Err(Error::InvalidGrid("sections need a 4D grid and keep ∈ {0, 1}".into()));
        }
        let other = 1 - keep;
        if fixed.0 >= self.axes[2 * other].n || fixed.1 >= self.axes[2 * other + 1].n {
            return Err(Error::InvalidGrid("section index out of range".into()));
        }
        let n: Vec<usize> = self.axes.iter().map(|a| a.n).collect();
        let stride = [n[1] * n[2] * n[3], n[2] * n[3], n[3], 1];
        let (qa, pa) = (self.axes[2 * keep], self.axes[2 * keep + 1]);
        let mut values = Vec::with_capacity(qa.n * pa.n);
        for i in 0..qa.n {
            for j in 0..pa.n {
                let mut idx = [0usize; 4];
                idx[2 * keep] = i;
                idx[2 * keep + 1] = j;
                idx[2 * other] = fixed.0;
                idx[2 * other + 1] = fixed.1;
                values.push(self.values[idx.iter().zip(stride).map(|(a, s)| a * s).sum::<usize>()]);
            }
        }
        ReducedWignerGrid::new(vec![qa, pa], values, vec![self.labels[keep].clone()])
    }
}

fn eval_rows<F>(rows: usize, row_len: usize, f: F) -> Vec<f64>
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    let mut values = vec![0.0; rows * row_len];
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        values
            .par_chunks_mut(row_len)
            .enumerate()
            .for_each(|(i, chunk)| f(i, chunk));
    }
    #[cfg(not(feature = "parallel"))]
    for (i, chunk) in values.chunks_mut(row_len).enumerate() {
        f(i, chunk);
    }
    values
}

/// Dense evaluation of a one- or two-mode reduced state. `axes` are
/// `[q, p]` or `[q1, p1, q2, p2]`.
pub fn sample_grid(reduced: &PolyGaussian, axes: &[Axis]) -> Result<ReducedWignerGrid> {
    let k = reduced.basis().n_modes();
    if !(k == 1 || k == 2) || axes.len() != 2 * k {
        return Err(Error::InvalidGrid(format!(
            "{}-mode state cannot be sampled on a {}D grid (2D or 4D only)",
            k,
            axes.len()
        )));
    }
    for ax in axes {
        ax.validate()?;
    }
    let inner: usize = axes[1..].iter().map(|a| a.n).product();
    let values = eval_rows(axes[0].n, inner, |i, row| {
        let q1 = axes[0].point(i);
        let mut alpha = DVector::<C64>::zeros(k);
        for (r, out) in row.iter_mut().enumerate() {
            if k == 1 {
                alpha[0] = C64::new(q1, axes[1].point(r));
            } else {
                let (n2, n3) = (axes[2].n, axes[3].n);
                let p1 = axes[1].point(r / (n2 * n3));
                alpha[0] = C64::new(q1, p1);
                alpha[1] = C64::new(axes[2].point((r / n3) % n2), axes[3].point(r % n3));
            }
            *out = reduced.eval_raw(&alpha);
        }
    });
    ReducedWignerGrid::new(axes.to_vec(), values, reduced.basis().labels().to_vec())
}

/// 2D plane through a multimode reduced state: mode `vary` runs over the
/// `(q, p)` axes, all other modes are held at `fixed`.
pub fn sample_section(
    reduced: &PolyGaussian,
    vary: usize,
    fixed: &FieldVector,
    q: Axis,
    p: Axis,
) -> Result<ReducedWignerGrid> {
    if fixed.basis() != reduced.basis() {
        return Err(Error::BasisMismatch);
    }
    let k = reduced.basis().n_modes();
    if vary >= k {
        return Err(Error::DimensionMismatch { expected: k, got: vary });
    }
    q.validate()?;
    p.validate()?;
    let values = eval_rows(q.n, p.n, |i, row| {
        let mut alpha = fixed.dvector().clone();
        for (j, out) in row.iter_mut().enumerate() {
            alpha[vary] = C64::new(q.point(i), p.point(j));
            *out = reduced.eval_raw(&alpha);
        }
    });
    ReducedWignerGrid::new(vec![q, p], values, vec![reduced.basis().labels()[vary].clone()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heralding::{add_photon, subtract_photon, DetectorKernel};
    use crate::mode::gram_schmidt;
    use crate::states::ThermalSpec;
    use crate::transforms::{random_unitary, seeded_rng, squeezer_pair_in_modes, WeakBogoliubov};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn b(n: usize) -> ModeBasis {
        ModeBasis::numbered("m", n).unwrap()
    }

    fn unit_col(basis: &ModeBasis, w: &DMatrix<C64>, j: usize) -> FieldVector {
        FieldVector::new(basis, w.column(j).iter().copied().collect()).unwrap()
    }

    fn eval1(p: &PolyGaussian, z: C64) -> f64 {
        p.eval(&FieldVector::new(p.basis(), vec![z]).unwrap()).unwrap()
    }

    fn added_coherent(xi0: C64, v_scale: f64) -> PolyGaussian {
        let b3 = b(3);
        let w = random_unitary(3, &mut seeded_rng(5));
        let g = unit_col(&b3, &w, 0);
        let r = unit_col(&b3, &w, 2);
        let v = Kernel::outer_bilinear(&g, &g)
            .unwrap()
            .add(&Kernel::outer_bilinear(&r, &r).unwrap().scale(c(0.5, 0.0)))
            .unwrap()
            .scale(c(v_scale, 0.0));
        let wb = WeakBogoliubov::new(v, 0.1).unwrap();
        let h = add_photon(
            &GaussianWigner::coherent(&g.scale(xi0)),
            &wb,
            &DetectorKernel::new(&g).unwrap(),
        )
        .unwrap();
        h.reduce().unwrap()
    }

    #[test]
    fn mode_overlap_examples() {
        let b2 = b(2);
        let e0 = FieldVector::unit(&b2, 0).unwrap();
        let e1 = FieldVector::unit(&b2, 1).unwrap();
        assert_eq!(mode_overlap(&e0, &e0).unwrap(), 1.0);
        assert_eq!(mode_overlap(&e0, &e1).unwrap(), 0.0);
        assert_eq!(mode_overlap(&e0, &FieldVector::zeros(&b2)).unwrap_err(), Error::ZeroVector);
        let a = FieldVector::new(&b2, vec![c(1.0, 1.0), c(0.0, 0.0)]).unwrap();
        assert!((mode_overlap(&a, &e0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn overlap_of_detector_and_m_e_for_aligned_squeezing() {
        let b3 = b(3);
        let w = random_unitary(3, &mut seeded_rng(8));
        let (u, v) = squeezer_pair_in_modes(&b3, &w, &[0.5, 0.0, 0.0], &[0.3, 0.0, 0.0]).unwrap();
        let sv = GaussianWigner::squeezed_vacuum(&u, &v).unwrap();
        let m = unit_col(&b3, &w, 0);
        let h = subtract_photon(&sv, &DetectorKernel::new(&m).unwrap()).unwrap();
        assert!((mode_overlap(&m, &h.transformed_modes()[0]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vacuum_marginal() {
        let b3 = b(3);
        let p = PolyGaussian::constant(GaussianWigner::vacuum(&b3), 1.0);
        let m = FieldVector::new(&b3, vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)]).unwrap();
        let r = marginalize(&p, &[m]).unwrap();
        for z in [c(0.0, 0.0), c(0.3, -0.7), c(1.0, 1.0)] {
            assert!((eval1(&r, z) - 2.0 * (-2.0 * z.norm_sqr()).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn photon_added_coherent_reduction() {
        for xi0 in [c(1.0, 0.0), c(0.3, 0.9), c(1.5, -0.5)] {
            let r = added_coherent(xi0, 1.0);
            let n = xi0.norm_sqr();
            for z in [c(0.0, 0.0), c(0.5, 0.0), c(-0.4, 0.8), xi0, xi0 * 0.5] {
                let want = 2.0 * ((z * 2.0 - xi0).norm_sqr() - 1.0) / (n + 1.0) * (-2.0 * (z - xi0).norm_sqr()).exp();
                assert!((eval1(&r, z) - want).abs() < 1e-12, "{z}: {} vs {want}", eval1(&r, z));
            }
            assert!((r.mass() - 1.0).abs() < 1e-12);
        }
        let r = added_coherent(c(1.0, 0.0), 1.0);
        assert!((eval1(&r, c(0.5, 0.0)) + (-0.5f64).exp()).abs() < 1e-12);
        assert!(eval1(&r, c(1.0, 0.0)).abs() < 1e-14);
    }

    #[test]
    fn photon_added_thermal_reduction() {
        let b2 = b(2);
        let w = random_unitary(2, &mut seeded_rng(2));
        let theta = unit_col(&b2, &w, 0);
        for tau in [0.0, 1.0, 5.0, 10.0] {
            let th = GaussianWigner::thermal(&ThermalSpec::new(tau, &theta).unwrap());
            let wb = WeakBogoliubov::new(Kernel::outer_bilinear(&theta, &theta).unwrap(), 0.1).unwrap();
            let h = add_photon(&th, &wb, &DetectorKernel::new(&theta).unwrap()).unwrap();
            let r = h.reduce().unwrap();
            let t1 = 1.0 + tau;
            for z in [c(0.0, 0.0), c(0.5, 0.0), c(-1.0, 2.0)] {
                let a2 = z.norm_sqr();
                let want = 2.0 / (t1 * t1) * (2.0 * (2.0 + tau) / t1 * a2 - 1.0) * (-2.0 * a2 / t1).exp();
                assert!((eval1(&r, z) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn subtracted_squeezed_reduction_origin() {
        let b4 = b(4);
        let w = random_unitary(4, &mut seeded_rng(12));
        let (u, v) = squeezer_pair_in_modes(&b4, &w, &[0.7, 0.0, 0.0, 0.0], &[1.1, 0.0, 0.0, 0.0]).unwrap();
        let sv = GaussianWigner::squeezed_vacuum(&u, &v).unwrap();
        let m = unit_col(&b4, &w, 0)
            .scale(c(0.6f64.sqrt(), 0.0))
            .add(&unit_col(&b4, &w, 1).scale(c(0.4f64.sqrt(), 0.0)))
            .unwrap();
        let h = subtract_photon(&sv, &DetectorKernel::new(&m).unwrap()).unwrap();
        assert!((h.eval(&FieldVector::zeros(&b4)).unwrap() + 16.0).abs() < 1e-9);
        let r = h.reduce().unwrap();
        assert_eq!(r.basis().n_modes(), 1);
        assert!((eval1(&r, c(0.0, 0.0)) + 2.0).abs() < 1e-10);
        let grid = sample_grid(&r, &[Axis::standard(), Axis::standard()]).unwrap();
        let neg = grid.negativity_metrics();
        assert!((neg.min_value + 2.0).abs() < 1e-10);
        assert!(neg.argmin.iter().all(|x| x.abs() < 1e-12));
        assert!((grid.quadrature() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn two_mode_reduction_and_sections() {
        let b3 = b(3);
        let w = random_unitary(3, &mut seeded_rng(13));
        let (u, v) = squeezer_pair_in_modes(&b3, &w, &[0.5, 0.3, 0.0], &[0.0, 0.7, 0.0]).unwrap();
        let sv = GaussianWigner::squeezed_vacuum(&u, &v).unwrap();
        let m = unit_col(&b3, &w, 0)
            .scale(c(0.8f64.sqrt(), 0.0))
            .add(&unit_col(&b3, &w, 1).scale(c(0.2f64.sqrt(), 0.0)))
            .unwrap();
        let h = subtract_photon(&sv, &DetectorKernel::new(&m).unwrap()).unwrap();
        let r = h.reduce().unwrap();
        assert_eq!(r.basis().n_modes(), 2);
        assert!((r.mass() - 1.0).abs() < 1e-12);
        let ax = Axis::new(-4.0, 4.0, 33).unwrap();
        let grid = sample_grid(&r, &[ax, ax, ax, ax]).unwrap();
        assert_eq!(grid.values().len(), 33usize.pow(4));
        assert!((grid.quadrature() - 1.0).abs() < 2e-3, "{}", grid.quadrature());
        let sec = grid.section(0, (16, 16)).unwrap();
        let direct = sample_section(&r, 0, &FieldVector::zeros(r.basis()), ax, ax).unwrap();
        for (x, y) in sec.values().iter().zip(direct.values()) {
            assert!((x - y).abs() < 1e-14);
        }
        assert!(grid.section(2, (0, 0)).is_err());
    }

    #[test]
    fn invalid_reduction_is_detected() {
        let b2 = b(2);
        let e0 = FieldVector::unit(&b2, 0).unwrap();
        let e1 = FieldVector::unit(&b2, 1).unwrap();
        let p = PolyGaussian::new(
            GaussianWigner::vacuum(&b2),
            1.0,
            e1.clone(),
            Kernel::zeros(&b2),
            Kernel::zeros(&b2),
        )
        .unwrap();
        assert!(matches!(marginalize(&p, std::slice::from_ref(&e0)), Err(Error::InvalidReduction(_))));
        let nonortho = FieldVector::new(&b2, vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap().normalized().unwrap();
        assert!(marginalize(&p, &[e1.clone(), nonortho]).is_err());
        assert!(marginalize(&p, &[]).is_err());
    }

    #[test]
    fn grid_errors_and_layout() {
        assert!(Axis::new(1.0, 1.0, 10).is_err());
        assert!(Axis::new(1.0, -1.0, 10).is_err());
        assert!(Axis::new(-1.0, 1.0, 1).is_err());
        let b1 = b(1);
        let p = PolyGaussian::constant(GaussianWigner::vacuum(&b1), 1.0);
        let q = Axis::new(-1.0, 1.0, 3).unwrap();
        let pp = Axis::new(0.0, 2.0, 5).unwrap();
        let g = sample_grid(&p, &[q, pp]).unwrap();
        assert_eq!(g.coords(0), vec![-1.0, 0.0]);
        assert_eq!(g.coords(1), vec![-1.0, 0.5]);
        assert_eq!(g.coords(5), vec![0.0, 0.0]);
        assert!((g.values()[7] - eval1(&p, c(0.0, 1.0))).abs() < 1e-15);
        assert!(sample_grid(&p, &[q, pp, q, pp]).is_err());
        assert_eq!(g.negativity_metrics().negative_volume, 0.0);
    }

    #[test]
    fn photon_added_grids_are_normalized() {
        let r = added_coherent(c(1.0, 0.0), 1.0);
        let g = sample_grid(&r, &[Axis::standard(), Axis::standard()]).unwrap();
        assert!((g.quadrature() - 1.0).abs() < 1e-4);
        assert!((g.values()[80 * 161 + 80] - eval1(&r, c(0.0, 0.0))).abs() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn marginal_matches_embedding_for_isotropic_complement(
            re in prop::collection::vec(-1.0..1.0f64, 6),
            im in prop::collection::vec(-1.0..1.0f64, 6),
            z in (-1.5..1.5f64, -1.5..1.5f64),
            seed in 0u64..1000,
        ) {
            let b3 = b(3);
            let w = random_unitary(3, &mut seeded_rng(seed));
            let g = unit_col(&b3, &w, 0);
            // Gaussian isotropic outside g: coherent state with mean along g
            let base = GaussianWigner::coherent(&g.scale(c(re[0], im[0])));
            let lin = g.scale(c(re[1], im[1]));
            let quad = Kernel::outer(&g, &g).unwrap().scale(c(re[2].abs(), 0.0));
            let anom = Kernel::outer_bilinear(&g, &g).unwrap().scale(c(re[3], im[3]));
            let p = PolyGaussian::new(base, re[4], lin, quad, anom).unwrap();
            let r = marginalize(&p, std::slice::from_ref(&g)).unwrap();
            let zc = c(z.0, z.1);
            // embedded point: α = z g; the complement contributes the vacuum
            // factor 2^{N-1} at zero
            let direct = p.eval(&g.scale(zc)).unwrap() / 4.0;
            prop_assert!((eval1(&r, zc) - direct).abs() < 1e-10 * direct.abs().max(1.0));
        }

        #[test]
        fn subtracted_minimum_is_rotation_invariant(angle in 0.0..std::f64::consts::TAU, seed in 0u64..200) {
            let b3 = b(3);
            let w = random_unitary(3, &mut seeded_rng(seed));
            let (u, v) = squeezer_pair_in_modes(&b3, &w, &[0.5, 0.0, 0.0], &[0.0; 3]).unwrap();
            let sv = GaussianWigner::squeezed_vacuum(&u, &v).unwrap();
            let m = unit_col(&b3, &w, 0)
                .scale(c(angle.cos(), 0.0))
                .add(&unit_col(&b3, &w, 1).scale(C64::from_polar(angle.sin(), 0.4)))
                .unwrap();
            prop_assume!(angle.cos().abs() > 0.05);
            let h = subtract_photon(&sv, &DetectorKernel::new(&m).unwrap()).unwrap();
            let r = h.reduce().unwrap();
            let ax = Axis::new(-2.0, 2.0, 41).unwrap();
            let grid = sample_grid(&r, &[ax, ax]).unwrap();
            prop_assert!((grid.negativity_metrics().min_value + 2.0).abs() < 1e-9);
        }

        #[test]
        fn transformed_mode_magnitude_cancels(scale in prop::sample::select(vec![0.1, 3.0, 0.5, 7.0])) {
            let r1 = added_coherent(c(1.0, 0.2), 1.0);
            let r2 = added_coherent(c(1.0, 0.2), scale);
            let ax = Axis::new(-3.0, 3.0, 31).unwrap();
            let g1 = sample_grid(&r1, &[ax, ax]).unwrap();
            let g2 = sample_grid(&r2, &[ax, ax]).unwrap();
            for (x, y) in g1.values().iter().zip(g2.values()) {
                prop_assert!((x - y).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn gram_schmidt_subspace_reduces_heralded_states() {
        // addition onto a multimode squeezed state spans (1+A)G and BG*
        let b4 = b(4);
        let w = random_unitary(4, &mut seeded_rng(31));
        let (u, v) = squeezer_pair_in_modes(&b4, &w, &[0.4, 0.2, 0.1, 0.0], &[0.0, 1.0, 2.0, 0.0]).unwrap();
        let sv = GaussianWigner::squeezed_vacuum(&u, &v).unwrap();
        let g = unit_col(&b4, &w, 0);
        let vv = Kernel::outer_bilinear(&g, &g).unwrap();
        let h = add_photon(&sv, &WeakBogoliubov::new(vv, 0.1).unwrap(), &DetectorKernel::new(&g).unwrap()).unwrap();
        let span = gram_schmidt(h.subspace()).unwrap();
        assert_eq!(span.vectors.len(), h.subspace().len());
        let r = h.reduce().unwrap();
        assert!((r.mass() - 1.0).abs() < 1e-12);
    }
}
