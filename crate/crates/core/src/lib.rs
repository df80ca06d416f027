//! Spectral analysis of one-dimensional Schrödinger operators with nonlocal
//! one-point interactions.
//!
//! The operator is `-f''` on the line with interface conditions at `x = 0`
//! that couple `f(0)`, `f'(0)` to integrals `(q, f)` against one or two
//! potentials. Everything is expressed through the free Green kernel
//! `G(x) = (i/2k) e^{ik|x|}` and the Weyl–Titchmarsh function built from it.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigenfunctions;
pub mod error;
pub mod expo;
pub mod greens;
pub mod model;
pub mod oracle;
pub mod quad;
pub mod spectrum;
pub mod symmetry;
pub mod weyl;

pub use error::{Error, Result};
pub use model::{
    delta_to_general, k_from_lambda, parse_model, BoundarySide, CouplingMatrix, DeltaModel, GeneralModel, Model,
    Potential, SampledPotential, SpectralParameter,
};
pub use num_complex::Complex64;

/// Default absolute tolerance for quadrature-backed values.
pub const DEFAULT_TOL: f64 = 1e-10;
