//! Brute-force phase-space quadrature used to cross-check the closed forms.
//!
//! Integrals are taken under `∏ d²αᵢ/π` with a tensor Gauss–Hermite rule
//! (N ≤ 2) or importance-sampled Monte-Carlo (N ≤ 4). Both substitute
//! `x = c + s·L·t` in the real coordinates `x = (q₁, p₁, q₂, p₂, …)`, so a
//! sensible centre `c`, scale `s` and shape `L` matter;
//! [`QuadratureSpec::matched`] fits them to a Gaussian.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand_distr::{Distribution, Normal};

use crate::mode::{FieldVector, ModeBasis};
use crate::reduction::{Axis, ReducedWignerGrid};
use crate::states::GaussianWigner;
use crate::transforms::seeded_rng;
use crate::{Error, Result, C64};

const MAX_GH_MODES: usize = 2;
const MAX_MC_MODES: usize = 4;
const MAX_GH_ORDER: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scheme {
    GaussHermite { order: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub scheme: Scheme,
    /// Stretch applied to every real coordinate.
    pub scale: f64,
    /// Centre of the rule; origin when `None`.
    pub center: Option<FieldVector>,
    /// Real `2N×2N` shape matrix `L`; identity when `None`.
    pub shape: Option<DMatrix<f64>>,
}

impl QuadratureSpec {
    pub fn gauss_hermite(order: usize) -> Self {
        Self {
            scheme: Scheme::GaussHermite { order },
            scale: std::f64::consts::FRAC_1_SQRT_2,
            center: None,
            shape: None,
        }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        Self {
            scheme: Scheme::MonteCarlo { samples, seed },
            scale: std::f64::consts::FRAC_1_SQRT_2,
            center: None,
            shape: None,
        }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_center(mut self, center: FieldVector) -> Self {
        self.center = Some(center);
        self
    }

    pub fn with_shape(mut self, shape: DMatrix<f64>) -> Self {
        self.shape = Some(shape);
        self
    }

    /// Centre on the mean of `g` and take `L = √2·Σ^{1/2}` from its real
    /// covariance `Σ`, so that `g` itself becomes the Hermite weight.
    pub fn matched(self, g: &GaussianWigner) -> Self {
        self.with_scale(1.0)
            .with_shape(gaussian_shape(g))
            .with_center(g.mean().clone())
    }
}

/// Covariance of the real coordinates `(q₁, p₁, q₂, p₂, …)` of `g`.
pub fn real_covariance(g: &GaussianWigner) -> DMatrix<f64> {
    let n = g.n_modes();
    let (c11, c12) = (g.cov11(), g.cov12());
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let (a, b) = (i / 2, j / 2);
        let (x, y) = (c11[(a, b)], c12[(a, b)]);
        0.5 * match (i % 2, j % 2) {
            (0, 0) => (y + x).re,
            (0, 1) => (y - x).im,
            (1, 0) => (y + x).im,
            _ => (x - y).re,
        }
    })
}

/// `√2·Σ^{1/2}` for the real covariance `Σ` of `g`.
pub fn gaussian_shape(g: &GaussianWigner) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(real_covariance(g));
    let root = eig.eigenvalues.map(|l| (2.0 * l.max(0.0)).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&root) * eig.eigenvectors.transpose()
}

/// Integral value with a standard-error estimate (`None` for deterministic
/// rules).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: C64,
    pub std_error: Option<f64>,
}

/// Gauss–Hermite nodes `tᵢ` and weights `wᵢ·exp(tᵢ²)` for `∫ g(t) dt`.
pub fn gauss_hermite_rule(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(2..=MAX_GH_ORDER).contains(&order) {
        return Err(Error::Domain(format!(
            "Gauss-Hermite order must lie in [2, {MAX_GH_ORDER}], got {order}"
        )));
    }
    // eigenvalues of the Jacobi matrix as starting points, then Newton on the
    // orthonormal recurrence carrying exp(−t²/2) so weights stay accurate in
    // the tails
    let jac = DMatrix::<f64>::from_fn(order, order, |i, j| {
        if i + 1 == j || j + 1 == i {
            ((i.max(j)) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let mut roots: Vec<f64> = SymmetricEigen::new(jac).eigenvalues.iter().copied().collect();
    roots.sort_by(f64::total_cmp);
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let mut weights = Vec::with_capacity(order);
    for z in roots.iter_mut() {
        let mut pp = 0.0;
        for _ in 0..4 {
            let (mut p1, mut p2) = (pim4 * (-0.5 * *z * *z).exp(), 0.0);
            for j in 1..=order {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = *z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * order as f64).sqrt() * p2;
            *z -= p1 / pp;
        }
        weights.push(2.0 / (pp * pp));
    }
    Ok((roots, weights))
}

/// `∫ f(α) ∏ d²αᵢ/π` over `basis`.
pub fn integrate_complex<F>(f: F, basis: &ModeBasis, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(&FieldVector) -> C64 + Sync,
{
    let n = basis.n_modes();
    if !(spec.scale > 0.0) {
        return Err(Error::Domain(format!("quadrature scale must be positive, got {}", spec.scale)));
    }
    let center = match &spec.center {
        Some(c) if c.basis() != basis => return Err(Error::BasisMismatch),
        Some(c) => c.dvector().clone(),
        None => DVector::zeros(n),
    };
    let d = 2 * n;
    let shape = match &spec.shape {
        Some(l) if l.nrows() != d || l.ncols() != d => {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: l.nrows(),
            })
        }
        Some(l) => l * spec.scale,
        None => DMatrix::<f64>::identity(d, d) * spec.scale,
    };
    let jac = shape.determinant().abs();
    if !(jac > 0.0) {
        return Err(Error::Singular("quadrature shape"));
    }
    let point = |t: &[f64]| {
        let x = &shape * DVector::from_column_slice(t);
        let amps = (0..n).map(|i| center[i] + C64::new(x[2 * i], x[2 * i + 1])).collect();
        FieldVector::new(basis, amps).expect("length matches basis")
    };
    match spec.scheme {
        Scheme::GaussHermite { order } => {
            if n > MAX_GH_MODES {
                return Err(Error::Unsupported(format!(
                    "Gauss-Hermite quadrature over {n} modes (at most {MAX_GH_MODES})"
                )));
            }
            let (t, w) = gauss_hermite_rule(order)?;
            let inner = order.pow(d as u32 - 1);
            let slab = |i0: usize| {
                let mut acc = C64::new(0.0, 0.0);
                let mut tt = vec![0.0; d];
                for rest in 0..inner {
                    tt[0] = t[i0];
                    let mut wt = w[i0];
                    let mut r = rest;
                    for k in (1..d).rev() {
                        let i = r % order;
                        r /= order;
                        tt[k] = t[i];
                        wt *= w[i];
                    }
                    acc += f(&point(&tt)) * wt;
                }
                acc
            };
            let parts = partials(order, slab);
            let total: C64 = parts.into_iter().sum();
            let norm = jac / std::f64::consts::PI.powi(n as i32);
            Ok(Estimate {
                value: total * norm,
                std_error: None,
            })
        }
        Scheme::MonteCarlo { samples, seed } => {
            if n > MAX_MC_MODES {
                return Err(Error::Unsupported(format!(
                    "Monte-Carlo quadrature over {n} modes (at most {MAX_MC_MODES})"
                )));
            }
            if samples < 2 {
                return Err(Error::Domain("Monte-Carlo needs at least 2 samples".into()));
            }
            // t ~ N(0, ½) per real coordinate has density exp(−t²)/√π
            let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid sigma");
            let mut rng = seeded_rng(seed);
            let mut tt = vec![0.0; d];
            let (mut sum, mut sum_sq) = (C64::new(0.0, 0.0), 0.0);
            for _ in 0..samples {
                let mut r2 = 0.0;
                for x in tt.iter_mut() {
                    *x = normal.sample(&mut rng);
                    r2 += *x * *x;
                }
                let v = f(&point(&tt)) * r2.exp();
                sum += v;
                sum_sq += v.norm_sqr();
            }
            let m = samples as f64;
            let mean = sum / m;
            let var = ((sum_sq / m - mean.norm_sqr()) * m / (m - 1.0)).max(0.0);
            Ok(Estimate {
                value: mean * jac,
                std_error: Some(jac * (var / m).sqrt()),
            })
        }
    }
}

/// Real-valued [`integrate_complex`].
pub fn integrate<F>(f: F, basis: &ModeBasis, spec: &QuadratureSpec) -> Result<(f64, Option<f64>)>
where
    F: Fn(&FieldVector) -> f64 + Sync,
{
    let e = integrate_complex(|a| C64::new(f(a), 0.0), basis, spec)?;
    Ok((e.value.re, e.std_error))
}

#[cfg(feature = "parallel")]
fn partials<F: Fn(usize) -> C64 + Sync>(n: usize, f: F) -> Vec<C64> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(&f).collect()
}

#[cfg(not(feature = "parallel"))]
fn partials<F: Fn(usize) -> C64 + Sync>(n: usize, f: F) -> Vec<C64> {
    (0..n).map(f).collect()
}

/// `|∫ α ∂W/∂α d²α/π + 1|` for a single-mode Gaussian, with the derivative
/// `∂_α = ½(∂_q − i∂_p)` taken by central differences.
pub fn verify_partial_integration(w: &GaussianWigner) -> Result<f64> {
    if w.n_modes() != 1 {
        return Err(Error::Unsupported("partial-integration check is single-mode".into()));
    }
    let h = 1e-4;
    let basis = w.basis();
    let at = |z: C64| w.eval_raw(&DVector::from_element(1, z));
    let spec = QuadratureSpec::gauss_hermite(48).matched(w);
    let e = integrate_complex(
        |a| {
            let z = a.amps()[0];
            let dq = (at(z + h) - at(z - h)) / (2.0 * h);
            let dp = (at(z + C64::new(0.0, h)) - at(z - C64::new(0.0, h))) / (2.0 * h);
            z * C64::new(0.5 * dq, -0.5 * dp)
        },
        basis,
        &spec,
    )?;
    Ok((e.value + 1.0).norm())
}

/// Vacuum-weighted projector generating function
/// `2e^{−2|β|²} · (2/(1+J)) exp(−2(1−J)/(1+J)·|β|²)` for a single-mode
/// detector. Its `Jⁿ` coefficients are the Wigner functions of `|n⟩⟨n|`
/// weighted by the vacuum.
pub fn projector_weight(beta: C64, j: f64) -> f64 {
    let r2 = beta.norm_sqr();
    2.0 * (-2.0 * r2).exp() * 2.0 / (1.0 + j) * (-2.0 * (1.0 - j) / (1.0 + j) * r2).exp()
}

/// Single-mode heralding channel checked by [`herald_oracle`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OracleKind {
    /// Beamsplitter tap of the signal onto a vacuum auxiliary mode.
    Subtract,
    /// Two-mode squeezing of signal and vacuum idler with coupling `v`.
    Add { v: C64 },
}

const ORACLE_STEP: f64 = 1e-3;
const ORACLE_RICHARDSON_TOL: f64 = 1e-4;
const ORACLE_BETA_ORDER: usize = 40;

/// Unnormalized heralded single-mode state obtained without any of the
/// closed forms: the joint input `W(α)·W_vac(β)` is pushed through the exact
/// beamsplitter (or two-mode squeezer), the auxiliary mode is integrated
/// against the projector generating function, the second-order coefficient
/// in the coupling is taken by Richardson-extrapolated central differences,
/// and the one-photon part is extracted as the `J`-slope.
pub fn herald_oracle(kind: OracleKind, input: &GaussianWigner, q: Axis, p: Axis) -> Result<ReducedWignerGrid> {
    if input.n_modes() != 1 {
        return Err(Error::Unsupported("heralding oracle is single-mode".into()));
    }
    let grid = ReducedWignerGrid::new(vec![q, p], vec![0.0; q.n * p.n], input.basis().labels().to_vec())?;
    let (nodes, weights) = gauss_hermite_rule(ORACLE_BETA_ORDER)?;
    let w_in = |z: C64| input.eval_raw(&DVector::from_element(1, z));
    let w_vac = |z: C64| 2.0 * (-2.0 * z.norm_sqr()).exp();

    // inverse map of the coupling at strength g, applied to (α, β)
    let pull_back = |g: f64, a: C64, b: C64| -> (C64, C64) {
        match kind {
            OracleKind::Subtract => {
                let t = (1.0 - g * g).sqrt();
                let r = C64::new(0.0, -g);
                (a * t + b * r, b * t + a * r)
            }
            OracleKind::Add { v } => {
                let (m, ph) = (v.norm(), v.arg());
                let u = (g * m).cosh();
                let s = -C64::from_polar((g * m).sinh(), ph);
                (a * u + s * b.conj(), b * u + s * a.conj())
            }
        }
    };
    let f = |a: C64, g: f64, j: f64| -> f64 {
        let s = (1.0 + j).sqrt() / 2.0;
        let mut acc = 0.0;
        for (tq, wq) in nodes.iter().zip(&weights) {
            for (tp, wp) in nodes.iter().zip(&weights) {
                let b = C64::new(s * tq, s * tp);
                let (a2, b2) = pull_back(g, a, b);
                let pj = 2.0 / (1.0 + j) * (-2.0 * (1.0 - j) / (1.0 + j) * b.norm_sqr()).exp();
                acc += wq * wp * w_in(a2) * w_vac(b2) * pj;
            }
        }
        acc * s * s / std::f64::consts::PI
    };
    let c2 = |a: C64, h: f64, j: f64| (f(a, h, j) + f(a, -h, j) - 2.0 * f(a, 0.0, j)) / (2.0 * h * h);

    let mut values = Vec::with_capacity(q.n * p.n);
    for qi in q.points() {
        for pi in p.points() {
            let a = C64::new(qi, pi);
            let mut slope = [0.0; 2];
            for (k, j) in [0.0, 1.0].into_iter().enumerate() {
                let coarse = c2(a, ORACLE_STEP, j);
                let fine = c2(a, ORACLE_STEP / 2.0, j);
                if (coarse - fine).abs() > ORACLE_RICHARDSON_TOL {
                    return Err(Error::Verification(format!(
                        "heralding oracle step-size instability at {a}: {coarse} vs {fine}"
                    )));
                }
                slope[k] = (4.0 * fine - coarse) / 3.0;
            }
            // the second-order coefficient is affine in J
            values.push(slope[1] - slope[0]);
        }
    }
    ReducedWignerGrid::new(grid.axes().to_vec(), values, grid.labels().to_vec())
}
