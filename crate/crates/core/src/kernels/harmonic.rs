use std::f64::consts::PI;

use super::radial::{hessian, third, RadialDerivs};
use super::{norm, Mat3, Point, Tensor3};
use crate::error::{Error, Result};

/// Newtonian potential `E(x) = 1/(4π|x|)` and its derivatives.
///
/// `R_jk = ∂_j∂_k E` is the homogeneous far-field part of the Oseen kernel and
/// `ℱ_{j;h,k} = ∂_h∂_j∂_k E` that of its divergence.
#[derive(Debug, Clone, Copy, Default)]
pub struct HarmonicPotential;

#[derive(Debug, Clone, PartialEq)]
pub enum HarmonicTensor {
    Scalar(f64),
    Vector([f64; 3]),
    Matrix(Mat3),
    Tensor(Tensor3),
}

impl HarmonicPotential {
    fn radius(x: &Point) -> Result<f64> {
        let r = norm(x);
        if r == 0.0 || !r.is_finite() {
            return Err(Error::InvalidArgument("harmonic potential is singular at x = 0".into()));
        }
        Ok(r)
    }

    pub(crate) fn derivs(r: f64) -> RadialDerivs {
        let c = 1.0 / (4.0 * PI);
        RadialDerivs {
            d1: -c / (r * r),
            d2: 2.0 * c / (r * r * r),
            d3: -6.0 * c / (r * r * r * r),
        }
    }

    pub fn potential(&self, x: &Point) -> Result<f64> {
        Ok(1.0 / (4.0 * PI * Self::radius(x)?))
    }

    pub fn gradient(&self, x: &Point) -> Result<[f64; 3]> {
        let r = Self::radius(x)?;
        let c = -1.0 / (4.0 * PI * r * r * r);
        Ok([c * x[0], c * x[1], c * x[2]])
    }

    /// `R_jk(x) = (3 x_j x_k − |x|² δ_jk) / (4π|x|⁵)`.
    pub fn hessian(&self, x: &Point) -> Result<Mat3> {
        let r = Self::radius(x)?;
        Ok(hessian(x, r, Self::derivs(r)))
    }

    pub fn third(&self, x: &Point) -> Result<Tensor3> {
        let r = Self::radius(x)?;
        Ok(third(x, r, Self::derivs(r)))
    }
}

/// Derivatives of `E` of order 0 to 3 at `x ≠ 0`.
pub fn harmonic_derivatives(x: &Point, order: usize) -> Result<HarmonicTensor> {
    let e = HarmonicPotential;
    match order {
        0 => e.potential(x).map(HarmonicTensor::Scalar),
        1 => e.gradient(x).map(HarmonicTensor::Vector),
        2 => e.hessian(x).map(HarmonicTensor::Matrix),
        3 => e.third(x).map(HarmonicTensor::Tensor),
        _ => Err(Error::InvalidArgument(format!("derivative order {order} not supported"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_hessian(x: &Point) -> Mat3 {
        // central differences of the closed-form gradient
        let h = 1e-5;
        let mut m = [[0.0; 3]; 3];
        for k in 0..3 {
            let mut xp = *x;
            let mut xm = *x;
            xp[k] += h;
            xm[k] -= h;
            let gp = HarmonicPotential.gradient(&xp).unwrap();
            let gm = HarmonicPotential.gradient(&xm).unwrap();
            for j in 0..3 {
                m[j][k] = (gp[j] - gm[j]) / (2.0 * h);
            }
        }
        m
    }

    #[test]
    fn potential_on_unit_axis() {
        let v = HarmonicPotential.potential(&[1.0, 0.0, 0.0]).unwrap();
        assert!((v - 1.0 / (4.0 * PI)).abs() < 1e-16);
    }

    #[test]
    fn r11_on_unit_axis() {
        let r = HarmonicPotential.hessian(&[1.0, 0.0, 0.0]).unwrap();
        assert!((r[0][0] - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((r[1][1] + 1.0 / (4.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let x = [0.7, -1.1, 0.4];
        let a = HarmonicPotential.hessian(&x).unwrap();
        let b = fd_hessian(&x);
        for j in 0..3 {
            for k in 0..3 {
                assert!((a[j][k] - b[j][k]).abs() < 1e-7, "{j}{k}");
            }
        }
    }

    #[test]
    fn third_derivative_is_symmetric_and_matches_fd() {
        let x = [0.3, 0.9, -0.5];
        let t = HarmonicPotential.third(&x).unwrap();
        let h = 1e-5;
        for hh in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[hh] += h;
            xm[hh] -= h;
            let rp = HarmonicPotential.hessian(&xp).unwrap();
            let rm = HarmonicPotential.hessian(&xm).unwrap();
            for j in 0..3 {
                for k in 0..3 {
                    let fd = (rp[j][k] - rm[j][k]) / (2.0 * h);
                    assert!((t[hh][j][k] - fd).abs() < 1e-6);
                    assert_eq!(t[hh][j][k], t[j][hh][k]);
                    assert_eq!(t[hh][j][k], t[k][j][hh]);
                }
            }
        }
    }

    #[test]
    fn traceless_and_homogeneous() {
        let x = [0.2, -0.4, 1.3];
        let r = HarmonicPotential.hessian(&x).unwrap();
        let tr = r[0][0] + r[1][1] + r[2][2];
        assert!(tr.abs() < 1e-14 * r[2][2].abs().max(1.0));
        let lam = 3.0;
        let rs = HarmonicPotential.hessian(&[lam * x[0], lam * x[1], lam * x[2]]).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                assert!((rs[j][k] - r[j][k] / lam.powi(3)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_origin() {
        assert!(harmonic_derivatives(&[0.0; 3], 2).is_err());
        assert!(harmonic_derivatives(&[1.0, 0.0, 0.0], 4).is_err());
    }
}
