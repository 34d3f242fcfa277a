//! Mild solutions of the three-dimensional viscous Boussinesq system on a
//! periodic box approximating ℝ³, the heat-semigroup kernels they are built
//! from, and diagnostics for their space-time decay.

pub mod diagnostics;
pub mod error;
pub mod kernels;
pub mod quadrature;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
