//! Galerkin boundary-element operators for the 2D Helmholtz equation on
//! closed polygonal boundaries with piecewise-linear basis functions.
//!
//! The singular segment-pair integrals are evaluated semi-analytically; the
//! [`oracle`] module provides slow brute-force references used by the tests.

pub mod assembly;
pub mod error;
pub mod geometry;
pub mod io;
pub mod kernels;
pub mod oracle;
pub mod quadrature;
pub mod singular;
pub mod specfun;
pub mod validation;

pub use error::{Error, Result};

/// Complex scalar used for every kernel value and matrix entry.
pub type Complex = num_complex::Complex64;
