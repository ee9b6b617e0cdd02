//! Numerical toolkit for the deformed Szegő curves
//! `gamma_t = { z : |z e^{1-z}| = e^{-t}, |z| <= 1 }`.

pub mod curve;
pub mod error;
pub mod field;
pub mod lambert;
pub mod laguerre;
pub mod numeric;
pub mod penner;

pub use error::{Cut, Error, Result};
pub use num_complex::Complex64;

/// A point of the complex plane.
pub type ComplexPoint = Complex64;
