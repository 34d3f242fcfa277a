use crate::error::{Error, Result};
use crate::spectral::{curl, Grid, SpectralScalar, SpectralVector};

/// Divergence tolerance relative to the largest velocity coefficient.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-10;

/// Velocity and temperature at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub u: SpectralVector,
    pub theta: SpectralScalar,
}

impl State {
    pub fn new(t: f64, u: SpectralVector, theta: SpectralScalar) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("state time must be ≥ 0, got {t}")));
        }
        if u.grid() != theta.grid() {
            return Err(Error::InvalidArgument("velocity and temperature grids differ".into()));
        }
        let s = Self { t, u, theta };
        if !s.is_finite() {
            return Err(Error::NonFinite { t });
        }
        Ok(s)
    }

    pub fn zero(grid: &Grid) -> Self {
        Self { t: 0.0, u: SpectralVector::zeros(grid), theta: SpectralScalar::zeros(grid) }
    }

    pub fn grid(&self) -> &Grid {
        self.theta.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.theta.coef().iter().all(|c| c.re.is_finite() && c.im.is_finite())
            && self.u.comps().iter().all(|f| f.coef().iter().all(|c| c.re.is_finite() && c.im.is_finite()))
    }

    pub fn is_divergence_free(&self) -> bool {
        self.u.divergence_defect() <= DIVERGENCE_TOLERANCE
    }

    pub fn vorticity(&self) -> SpectralVector {
        curl(&self.u)
    }
}
