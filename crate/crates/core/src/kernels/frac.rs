use super::{norm, radial_transform, Point};
use crate::error::{Error, Result};

/// Kernel of `e^{-t(-Δ)^α}` on ℝ³, `Ĝ(t,ξ) = e^{-t|ξ|^{2α}}`, evaluated by
/// radial Fourier quadrature.
///
/// `α = 1/2` (the Poisson kernel) is accepted as the boundary case; smaller
/// exponents are rejected.
#[derive(Debug, Clone, Copy)]
pub struct FracHeatKernel {
    alpha: f64,
}

impl FracHeatKernel {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.5 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("fractional exponent must be ≥ 1/2, got {alpha}")));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn check_t(t: f64) -> Result<()> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("kernel needs t > 0, got {t}")));
        }
        Ok(())
    }

    /// `G(t, r)` for `r = |x|`.
    pub fn radial(&self, t: f64, r: f64) -> Result<f64> {
        Self::check_t(t)?;
        Ok(radial_transform(t, self.alpha, 2, 0, r)?.value)
    }

    /// `∂_r G(t, r)`; the gradient is this times `x/|x|`.
    pub fn radial_derivative(&self, t: f64, r: f64) -> Result<f64> {
        Self::check_t(t)?;
        if r == 0.0 {
            return Ok(0.0);
        }
        Ok(-radial_transform(t, self.alpha, 3, 1, r)?.value)
    }

    /// Self-similar profile `K(y) = G(1, y)`.
    pub fn profile(&self, r: f64) -> Result<f64> {
        self.radial(1.0, r)
    }

    /// `G(t, r) = t^{-3/(2α)} K(r t^{-1/(2α)})`, an evaluation path independent of
    /// [`FracHeatKernel::radial`] at `t ≠ 1`.
    pub fn radial_by_scaling(&self, t: f64, r: f64) -> Result<f64> {
        Self::check_t(t)?;
        let s = t.powf(-0.5 / self.alpha);
        Ok(s.powi(3) * self.profile(r * s)?)
    }

    pub fn eval(&self, t: f64, x: &Point) -> Result<f64> {
        self.radial(t, norm(x))
    }
}

pub fn frac_heat_kernel(alpha: f64, t: f64, x: &Point) -> Result<f64> {
    FracHeatKernel::new(alpha)?.eval(t, x)
}
