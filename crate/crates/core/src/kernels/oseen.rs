use std::f64::consts::PI;

use statrs::function::erf::{erf, erfc};

use super::harmonic::HarmonicPotential;
use super::heat::HeatKernel;
use super::radial::{hessian, RadialDerivs};
use super::{norm, radial_transform, Mat3, Point};
use crate::error::{Error, Result};

/// Below this value of `|x|/√t` the kernel is evaluated by Fourier quadrature.
pub(crate) const NEAR_ORIGIN: f64 = 0.5;

/// Kernel of `e^{tΔ}ℙ` on ℝ³:
/// `K_jk(t,x) = δ_jk g_t(x) + ∂_j∂_k Φ_t(x)` with `Φ_t = erf(|x|/2√t)/(4π|x|)`.
///
/// Away from the origin `K = R + |x|^{-3} Ψ(x/√t)` where `R = ∇²E` is the
/// harmonic part and the remainder decays like a Gaussian in `|x|/√t`.
#[derive(Debug, Clone, Copy)]
pub struct OseenKernel {
    t: f64,
    heat: HeatKernel,
}

/// `N(r) = (2a/√π) r e^{-a²r²} + erfc(ar)` and its first two derivatives.
pub(crate) fn n_profile(a: f64, r: f64) -> (f64, f64, f64) {
    let e = (-a * a * r * r).exp();
    let c = 2.0 * a / PI.sqrt();
    let n = c * r * e + erfc(a * r);
    let n1 = -2.0 * c * a * a * r * r * e;
    let n2 = -4.0 * c * a * a * r * (1.0 - a * a * r * r) * e;
    (n, n1, n2)
}

/// Radial derivatives of `χ = -erfc(ar)/(4π r)`, the correction turning `E` into `Φ_t`.
pub(crate) fn chi_derivs(a: f64, r: f64) -> RadialDerivs {
    let (n, n1, n2) = n_profile(a, r);
    let q = 4.0 * PI;
    RadialDerivs {
        d1: n / (q * r * r),
        d2: n1 / (q * r * r) - 2.0 * n / (q * r * r * r),
        d3: n2 / (q * r * r) - 4.0 * n1 / (q * r * r * r) + 6.0 * n / (q * r.powi(4)),
    }
}

/// Radial derivatives of `Φ_t = E + χ`, written with `N - 1` to avoid
/// subtracting the two singular parts.
pub(crate) fn phi_derivs(a: f64, r: f64) -> RadialDerivs {
    let e = (-a * a * r * r).exp();
    let c = 2.0 * a / PI.sqrt();
    let nm1 = c * r * e - erf(a * r);
    let (_, n1, n2) = n_profile(a, r);
    let q = 4.0 * PI;
    RadialDerivs {
        d1: nm1 / (q * r * r),
        d2: n1 / (q * r * r) - 2.0 * nm1 / (q * r * r * r),
        d3: n2 / (q * r * r) - 4.0 * n1 / (q * r * r * r) + 6.0 * nm1 / (q * r.powi(4)),
    }
}

impl OseenKernel {
    pub fn new(t: f64) -> Result<Self> {
        Ok(Self { t, heat: HeatKernel::new(t)? })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    fn a(&self) -> f64 {
        0.5 / self.t.sqrt()
    }

    /// Evaluates `K(t,x)`, switching to quadrature near the origin.
    pub fn eval(&self, x: &Point) -> Result<Mat3> {
        if norm(x) < NEAR_ORIGIN * self.t.sqrt() {
            self.eval_quadrature(x)
        } else {
            self.eval_decomposition(x)
        }
    }

    /// Closed form `δ g + ∇²Φ_t`; singular at `x = 0`.
    pub fn eval_decomposition(&self, x: &Point) -> Result<Mat3> {
        let r = norm(x);
        if r == 0.0 {
            return Err(Error::InvalidArgument("decomposition path is singular at x = 0".into()));
        }
        let mut m = hessian(x, r, phi_derivs(self.a(), r));
        let g = self.heat.radial(r);
        for (j, row) in m.iter_mut().enumerate() {
            row[j] += g;
        }
        Ok(m)
    }

    /// Radial Fourier quadrature:
    /// `K = (2/3) I_0 δ + I_2 (n⊗n − δ/3)` with `I_l = (1/2π²)∫ρ² e^{-tρ²} j_l(ρ|x|) dρ`.
    pub fn eval_quadrature(&self, x: &Point) -> Result<Mat3> {
        let r = norm(x);
        let i0 = radial_transform(self.t, 1.0, 2, 0, r)?.value;
        let i2 = if r == 0.0 { 0.0 } else { radial_transform(self.t, 1.0, 2, 2, r)?.value };
        let n = if r == 0.0 { [0.0; 3] } else { [x[0] / r, x[1] / r, x[2] / r] };
        let mut m = [[0.0; 3]; 3];
        for j in 0..3 {
            for k in 0..3 {
                let d = if j == k { 1.0 } else { 0.0 };
                m[j][k] = 2.0 / 3.0 * i0 * d + i2 * (n[j] * n[k] - d / 3.0);
            }
        }
        Ok(m)
    }

    /// Time-independent far-field part `R(x)`.
    pub fn harmonic_part(&self, x: &Point) -> Result<Mat3> {
        HarmonicPotential.hessian(x)
    }

    /// `K(t,x) − R(x) = |x|^{-3} Ψ(x/√t)`, computed without cancellation.
    pub fn remainder(&self, x: &Point) -> Result<Mat3> {
        let r = norm(x);
        if r == 0.0 {
            return Err(Error::InvalidArgument("remainder is singular at x = 0".into()));
        }
        let mut m = hessian(x, r, chi_derivs(self.a(), r));
        let g = self.heat.radial(r);
        for (j, row) in m.iter_mut().enumerate() {
            row[j] += g;
        }
        Ok(m)
    }
}

pub fn oseen_eval(t: f64, x: &Point) -> Result<Mat3> {
    OseenKernel::new(t)?.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_rel(a: &Mat3, b: &Mat3) -> f64 {
        let scale = super::super::mat_norm(b);
        let mut m: f64 = 0.0;
        for j in 0..3 {
            for k in 0..3 {
                m = m.max((a[j][k] - b[j][k]).abs());
            }
        }
        m / scale
    }

    #[test]
    fn paths_agree_on_overlap() {
        for &t in &[0.3, 1.0, 4.0] {
            let k = OseenKernel::new(t).unwrap();
            for &s in &[0.5, 1.0, 2.0, 4.0, 8.0] {
                let r = s * t.sqrt();
                let x = [0.6 * r, -0.48 * r, 0.64 * r];
                let a = k.eval_decomposition(&x).unwrap();
                let b = k.eval_quadrature(&x).unwrap();
                assert!(max_rel(&a, &b) < 1e-6, "t={t} s={s} rel={}", max_rel(&a, &b));
            }
        }
    }

    #[test]
    fn trace_is_twice_heat_kernel() {
        let k = OseenKernel::new(1.3).unwrap();
        let g = HeatKernel::new(1.3).unwrap();
        for &x in &[[0.1, 0.0, 0.2], [1.0, 2.0, -0.5], [3.0, 0.0, 0.0]] {
            let m = k.eval_quadrature(&x).unwrap();
            let tr = m[0][0] + m[1][1] + m[2][2];
            assert!((tr - 2.0 * g.eval(&x)).abs() < 1e-10 * g.eval(&x).max(1e-3));
            let m = k.eval_decomposition(&x).unwrap();
            let tr = m[0][0] + m[1][1] + m[2][2];
            assert!((tr - 2.0 * g.eval(&x)).abs() < 1e-12);
        }
    }

    #[test]
    fn remainder_plus_harmonic_is_kernel() {
        let k = OseenKernel::new(0.7).unwrap();
        let x = [1.5, -0.3, 0.9];
        let a = k.eval(&x).unwrap();
        let r = k.harmonic_part(&x).unwrap();
        let p = k.remainder(&x).unwrap();
        for j in 0..3 {
            for l in 0..3 {
                assert!((a[j][l] - r[j][l] - p[j][l]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn origin_value() {
        // K(t,0) = (2/3) g_t(0) δ
        let k = OseenKernel::new(1.0).unwrap();
        let m = k.eval(&[0.0; 3]).unwrap();
        let g0 = (4.0 * PI).powf(-1.5);
        assert!((m[0][0] - 2.0 / 3.0 * g0).abs() < 1e-12);
        assert!(m[0][1].abs() < 1e-15);
        assert!(k.eval_decomposition(&[0.0; 3]).is_err());
    }
}
