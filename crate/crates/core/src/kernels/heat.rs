use std::f64::consts::PI;

use super::{norm, Point};
use crate::error::{Error, Result};

/// Gaussian heat kernel `g_t(x) = (4πt)^{-3/2} exp(-|x|²/4t)` on ℝ³.
#[derive(Debug, Clone, Copy)]
pub struct HeatKernel {
    t: f64,
}

impl HeatKernel {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("heat kernel needs t > 0, got {t}")));
        }
        Ok(Self { t })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn radial(&self, r: f64) -> f64 {
        (4.0 * PI * self.t).powf(-1.5) * (-r * r / (4.0 * self.t)).exp()
    }

    /// `d g_t / dr`.
    pub fn radial_derivative(&self, r: f64) -> f64 {
        -r / (2.0 * self.t) * self.radial(r)
    }

    pub fn eval(&self, x: &Point) -> f64 {
        self.radial(norm(x))
    }
}

pub fn heat_kernel(t: f64, x: &Point) -> Result<f64> {
    Ok(HeatKernel::new(t)?.eval(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Adaptive;

    #[test]
    fn value_at_origin() {
        let v = heat_kernel(1.0, &[0.0; 3]).unwrap();
        assert!((v - (4.0 * PI).powf(-1.5)).abs() < 1e-16);
    }

    #[test]
    fn rejects_non_positive_time() {
        assert!(heat_kernel(0.0, &[0.0; 3]).is_err());
        assert!(heat_kernel(-1.0, &[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn unit_mass_and_l2_norm() {
        let ad = Adaptive::new(1e-15, 1e-13);
        for &t in &[0.1, 1.0, 7.5] {
            let g = HeatKernel::new(t).unwrap();
            let cut = 40.0 * t.sqrt();
            let mass = ad.integrate(0.0, cut, |r| 4.0 * PI * r * r * g.radial(r)).unwrap().value;
            assert!((mass - 1.0).abs() < 1e-8, "t={t} mass={mass}");
            let l2 = ad
                .integrate(0.0, cut, |r| 4.0 * PI * r * r * g.radial(r).powi(2))
                .unwrap()
                .value
                .sqrt();
            // closed-form Gaussian integral
            let want = (8.0 * PI * t).powf(-0.75);
            assert!((l2 - want).abs() < 1e-10 * want);
        }
    }
}
