//! Mild solutions by Picard iteration of the Duhamel formulations, and an
//! integrating-factor time stepper used as an independent reference.

mod data;
mod duhamel;
mod picard;
mod scaling;
mod state;
mod stepper;
mod trajectory;

pub use data::{ThetaProfile, VelocityProfile};
pub use duhamel::{
    duhamel_b, duhamel_btilde, duhamel_e, duhamel_l, duhamel_sweep, HeatFlow, Integrals, ScalarSource, Sources,
    Temperature, Terms, TimeQuadrature, VectorSource, Velocity,
};
pub use picard::{picard_solve, Formula, PicardConfig, PicardOutcome, PicardReport};
pub use scaling::scaling_transform;
pub use state::{State, DIVERGENCE_TOLERANCE};
pub use stepper::{timestep_solve, Stepper, StepperConfig};
pub use trajectory::{Provenance, Trajectory};
