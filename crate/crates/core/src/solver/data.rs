//! Initial data library.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{curl, Grid, SpectralScalar, SpectralVector};

/// Direction of the vector potential whose curl gives the vortex blob.
const POTENTIAL_DIRECTION: [f64; 3] = [1.0, 0.5, -0.3];

/// Initial temperature profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ThetaProfile {
    /// `m (2πσ²)^{-3/2} e^{-|x|²/2σ²}`, total mass `m`.
    Gaussian { mass: f64, sigma: f64 },
    /// `∂₃` of the Gaussian of mass `m`; zero mean, first moment `(0, 0, -m)`.
    Dipole { mass: f64, sigma: f64 },
    /// `3ε (1 + |x|²)^{-3/2}`, bounded with an `|x|^{-3}` tail that is not integrable.
    Algebraic { eps: f64 },
    Zero,
}

/// Initial velocity profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum VelocityProfile {
    /// `A ∇ × (a e^{-|x-c|²/2σ²})` with a fixed direction `a`; divergence-free
    /// with zero mean.
    Vortex { amplitude: f64, sigma: f64, #[serde(default)] center: [f64; 3] },
    Zero,
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("profile width must be positive, got {sigma}")))
    }
}

impl ThetaProfile {
    pub fn build(&self, grid: &Grid) -> Result<SpectralScalar> {
        match *self {
            ThetaProfile::Gaussian { mass, sigma } => {
                check_sigma(sigma)?;
                Ok(SpectralScalar::from_transform(grid, |xi| {
                    let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
                    Complex64::new(mass * (-0.5 * sigma * sigma * r2).exp(), 0.0)
                }))
            }
            ThetaProfile::Dipole { mass, sigma } => {
                check_sigma(sigma)?;
                let g = ThetaProfile::Gaussian { mass, sigma }.build(grid)?;
                Ok(crate::spectral::partial(&g, 2))
            }
            ThetaProfile::Algebraic { eps } => {
                let vals: Vec<f64> = (0..grid.len())
                    .map(|i| {
                        let x = grid.point(i);
                        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                        3.0 * eps * (1.0 + r2).powf(-1.5)
                    })
                    .collect();
                SpectralScalar::from_physical(grid, &vals)
            }
            ThetaProfile::Zero => Ok(SpectralScalar::zeros(grid)),
        }
    }

    /// Physical-space value of the profile, where a closed form exists.
    pub fn value(&self, x: [f64; 3]) -> f64 {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        match *self {
            ThetaProfile::Gaussian { mass, sigma } => {
                mass * (2.0 * PI * sigma * sigma).powf(-1.5) * (-r2 / (2.0 * sigma * sigma)).exp()
            }
            ThetaProfile::Dipole { mass, sigma } => {
                let g = ThetaProfile::Gaussian { mass, sigma }.value(x);
                -x[2] / (sigma * sigma) * g
            }
            ThetaProfile::Algebraic { eps } => 3.0 * eps * (1.0 + r2).powf(-1.5),
            ThetaProfile::Zero => 0.0,
        }
    }
}

impl VelocityProfile {
    pub fn build(&self, grid: &Grid) -> Result<SpectralVector> {
        match *self {
            VelocityProfile::Vortex { amplitude, sigma, center } => {
                check_sigma(sigma)?;
                let psi = SpectralVector::from_transform(grid, |xi| {
                    let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
                    let phase = -(xi[0] * center[0] + xi[1] * center[1] + xi[2] * center[2]);
                    let m = amplitude * (2.0 * PI * sigma * sigma).powf(1.5) * (-0.5 * sigma * sigma * r2).exp();
                    let c = Complex64::from_polar(m, phase);
                    POTENTIAL_DIRECTION.map(|a| c * a)
                });
                Ok(curl(&psi))
            }
            VelocityProfile::Zero => Ok(SpectralVector::zeros(grid)),
        }
    }
}
