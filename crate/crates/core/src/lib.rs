//! Heralded single-photon subtraction and addition on multimode Wigner
//! functionals.
//!
//! Every spatiotemporal degree of freedom is discretized onto a finite
//! orthonormal mode basis. Field variables become complex vectors, two-point
//! kernels become square complex matrices and the `⋄` contraction becomes a
//! plain matrix product. On top of that algebra the crate provides
//!
//! - Gaussian Wigner functionals (vacuum, coherent, thermal, squeezed vacuum)
//!   and their second moments ([`states`]),
//! - the homogeneous beamsplitter and the weak twin-beam Bogoliubov transform
//!   ([`transforms`]),
//! - the heralded photon-subtraction and photon-addition maps with their
//!   normalization constants ([`heralding`]),
//! - marginalization onto transformed detector modes, grid sampling and
//!   negativity metrics ([`reduction`]),
//! - brute-force quadrature used to cross-check all of the above
//!   ([`oracle`]),
//! - ready-made scenarios shared by the CLI and the browser demo
//!   ([`scenario`]).
//!
//! Phase-space integrals use the measure `∏ᵢ d²αᵢ/π` with `αᵢ = qᵢ + i pᵢ`,
//! under which the single-mode vacuum is `2·exp(−2|α|²)`.

#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod heralding;
pub mod mode;
pub mod oracle;
pub mod reduction;
pub mod scenario;
pub mod states;
pub mod transforms;

pub use error::{Error, Result};
pub use heralding::{add_photon, subtract_photon, DetectorKernel, HeraldedState};
pub use mode::{FieldVector, Kernel, ModeBasis};
pub use reduction::{marginalize, mode_overlap, Axis, NegativityMetrics, ReducedWignerGrid};
pub use states::{GaussianWigner, PolyGaussian, ThermalSpec};
pub use transforms::{BeamsplitterSpec, WeakBogoliubov};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
