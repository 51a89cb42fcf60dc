//! Harmonic analysis on the purely odd Heisenberg–Clifford supergroup.

pub mod convolution;
pub mod error;
pub mod fourier;
pub mod integral;
pub mod io;
pub mod oracle;
pub mod random;
pub mod scalar;
pub mod spinrep;
pub mod superalgebra;
pub mod superfunction;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
