//! Numerical laboratory for the magnetic p-Laplacian with critical growth.
//!
//! The crate is organised bottom-up:
//!
//! * [`ineq`]: complex N-vector arithmetic and inequality oracles with explicit constants.
//! * [`quadrature`] and [`instanton`]: Talenti instantons, cutoff bumps, radial norms and the
//!   Sobolev constant; [`rates`] fits the small-ε behaviour of the bump norms.
//! * [`field`]: grids, complex fields, potentials, nonlinearities, the energy functional,
//!   its derivative and the pointwise structural checks.
//! * [`mountain_pass`]: ray maximisation, the c_P / c_A thresholds, geometry verification,
//!   a path-based mountain-pass solver and Palais–Smale diagnostics.
//!
//! Inner loops run on rayon when the `parallel` feature is enabled (the default). Every
//! floating-point reduction goes through [`par`], which sums fixed-size chunks in order, so
//! results do not depend on the thread count.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod field;
pub mod ineq;
pub mod instanton;
pub mod mountain_pass;
pub mod par;
pub mod quadrature;
pub mod rates;

pub use error::{Error, Result};
pub use num_complex::Complex64;
