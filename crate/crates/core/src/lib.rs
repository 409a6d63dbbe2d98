//! Numerical verification toolkit for trace conjunction, Gagliardo and Hardy
//! integrals on the half-space `R^N_+ = {x : x_N > 0}`.
//!
//! * [`specfun`]: closed-form constants via log-Gamma arithmetic.
//! * [`fields`]: analytic test functions with exact gradients.
//! * [`quad`]: Monte Carlo pair/volume integrals and 1-D adaptive quadrature.
//! * [`energies`]: the functionals as configured quadrature calls.
//! * [`theorems`]: inequality harness and proof diagnostics.
//! * [`bbm`]: `s → 1` limit studies.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::excessive_precision,
    clippy::type_complexity
)]

pub mod bbm;
pub mod energies;
pub mod error;
pub mod fields;
pub mod quad;
pub mod specfun;
pub mod theorems;

pub use error::{Error, Result};
pub use specfun::{paper_constant, ConstantKind, Params};
