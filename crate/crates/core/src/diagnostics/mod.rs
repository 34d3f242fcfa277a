//! Norms, decay-exponent fits and asymptotic-profile residuals.

mod bounds;
mod exponent;
mod fit;
mod interpolation;
mod moments;
mod norms;
mod profile;

pub use bounds::{lp_bound_check, BoundReport, Space, STABILITY_SPREAD};
pub use exponent::{predicted_exponent, to_rational, DecayAssumptions, Prediction};
pub use fit::{fit_decay_exponent, DecaySeries, ExponentFit, MIN_DECADES};
pub use interpolation::{interpolation_check, InterpolationFamily, InterpolationReport, InterpolationSample};
pub use moments::{field_moments, moments, Moments};
pub use norms::{
    derivative_magnitude, radii, restricted_norm, scaling_invariant_norms, weighted_norm, weighted_norm_scalar,
    weighted_norm_vector, x_norm, y_norm, NormSpec, NormValue, Quantity, WRAP_GUARD,
};
pub use profile::{profile_residual, ProfileResidual, ProfileVariant};
