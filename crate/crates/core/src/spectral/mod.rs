//! Truncated Fourier representation of fields on a periodic box standing in
//! for ℝ³, with the diagonal operators and dealiased products the solvers use.

mod field;
mod grid;
mod ops;
pub mod snapshot;

pub use field::{SpectralScalar, SpectralVector};
pub use grid::Grid;
pub use ops::{
    curl, dealias, dealias_scalar, divergence, gradient, leray_project, leray_vertical, nonlinear,
    nonlinear_terms, partial, recover_pressure_gradient, scalar_flux_divergence, tensor_divergence,
    Nonlinear,
};
pub use snapshot::Snapshot;
