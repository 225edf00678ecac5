//! Exact spectral calculus for the Kohn Laplacian on (0,j)-forms on the unit
//! sphere of C^n: spectrum, multiplication coefficients, explicit eigenforms,
//! projection kernels and spectral multiplier kernels.

pub mod coefficients;
pub mod cr_forms;
pub mod error;
pub mod exact;
pub mod linalg;
pub mod multiplier_calculus;
pub mod rep_engine;
pub mod spectrum;
pub mod verify;
pub mod sphere_geometry;

pub use error::{Error, Result};

/// Largest complex dimension supported by the fixed-size exponent arrays.
pub const MAX_N: usize = 8;
