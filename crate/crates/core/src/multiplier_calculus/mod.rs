//! Kernels of spectral multipliers, weighted norms and the estimates built on them.

pub mod kernel;
pub mod estimates;
pub mod multiplier;

pub use kernel::*;
pub use estimates::*;
pub use multiplier::*;
