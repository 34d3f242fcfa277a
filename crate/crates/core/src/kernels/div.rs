use super::harmonic::HarmonicPotential;
use super::heat::HeatKernel;
use super::oseen::{chi_derivs, phi_derivs, NEAR_ORIGIN};
use super::radial::{third, RadialDerivs};
use super::{norm, radial_transform, Point, Tensor3};
use crate::error::{Error, Result};

/// Spatial derivative of the Oseen kernel, `F_{j;h,k}(t,x) = ∂_h K_jk(t,x)`,
/// stored as `[j][h][k]`.
///
/// Away from the origin `F = ℱ + |x|^{-4} Ψ̃(x/√t)` with `ℱ = ∇³E`.
#[derive(Debug, Clone, Copy)]
pub struct DivKernel {
    t: f64,
    heat: HeatKernel,
}

fn delta(p: usize, q: usize) -> f64 {
    if p == q {
        1.0
    } else {
        0.0
    }
}

impl DivKernel {
    pub fn new(t: f64) -> Result<Self> {
        Ok(Self { t, heat: HeatKernel::new(t)? })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    fn a(&self) -> f64 {
        0.5 / self.t.sqrt()
    }

    pub fn eval(&self, x: &Point) -> Result<Tensor3> {
        if norm(x) < NEAR_ORIGIN * self.t.sqrt() {
            self.eval_quadrature(x)
        } else {
            self.eval_decomposition(x)
        }
    }

    fn closed(&self, x: &Point, d: RadialDerivs) -> Result<Tensor3> {
        let r = norm(x);
        if r == 0.0 {
            return Err(Error::InvalidArgument("decomposition path is singular at x = 0".into()));
        }
        // ∇³ of a radial function is fully symmetric, so [h][j][k] = [j][h][k]
        let mut f = third(x, r, d);
        let gp = self.heat.radial_derivative(r);
        for j in 0..3 {
            for h in 0..3 {
                f[j][h][j] += gp * x[h] / r;
            }
        }
        Ok(f)
    }

    pub fn eval_decomposition(&self, x: &Point) -> Result<Tensor3> {
        self.closed(x, phi_derivs(self.a(), norm(x)))
    }

    /// `F = −J_1 n_h δ_jk + J_1 S/5 − J_3 (n⊗n⊗n − S/5)` with
    /// `S = δ_hj n_k + δ_hk n_j + δ_jk n_h` and `J_l = (1/2π²)∫ρ³ e^{-tρ²} j_l(ρ|x|) dρ`.
    pub fn eval_quadrature(&self, x: &Point) -> Result<Tensor3> {
        let r = norm(x);
        if r == 0.0 {
            // odd kernel
            return Ok([[[0.0; 3]; 3]; 3]);
        }
        let j1 = radial_transform(self.t, 1.0, 3, 1, r)?.value;
        let j3 = radial_transform(self.t, 1.0, 3, 3, r)?.value;
        let n = [x[0] / r, x[1] / r, x[2] / r];
        let mut f = [[[0.0; 3]; 3]; 3];
        for j in 0..3 {
            for h in 0..3 {
                for k in 0..3 {
                    let s = delta(h, j) * n[k] + delta(h, k) * n[j] + delta(j, k) * n[h];
                    f[j][h][k] = -j1 * n[h] * delta(j, k) + j1 * s / 5.0
                        - j3 * (n[h] * n[j] * n[k] - s / 5.0);
                }
            }
        }
        Ok(f)
    }

    /// Time-independent part `ℱ = ∇³E`.
    pub fn harmonic_part(&self, x: &Point) -> Result<Tensor3> {
        HarmonicPotential.third(x)
    }

    /// `F(t,x) − ℱ(x) = |x|^{-4} Ψ̃(x/√t)`.
    pub fn remainder(&self, x: &Point) -> Result<Tensor3> {
        self.closed(x, chi_derivs(self.a(), norm(x)))
    }
}

#[cfg(test)]
mod tests {
    use super::super::oseen::OseenKernel;
    use super::*;

    #[test]
    fn matches_finite_difference_of_oseen() {
        let t = 0.8;
        let k = OseenKernel::new(t).unwrap();
        let f = DivKernel::new(t).unwrap();
        let x = [0.9, -0.7, 1.2];
        let a = f.eval_decomposition(&x).unwrap();
        let b = f.eval_quadrature(&x).unwrap();
        let h = 1e-5;
        for hh in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[hh] += h;
            xm[hh] -= h;
            let kp = k.eval_decomposition(&xp).unwrap();
            let km = k.eval_decomposition(&xm).unwrap();
            for j in 0..3 {
                for l in 0..3 {
                    let fd = (kp[j][l] - km[j][l]) / (2.0 * h);
                    assert!((a[j][hh][l] - fd).abs() < 1e-8, "decomp {j}{hh}{l}");
                    assert!((b[j][hh][l] - fd).abs() < 1e-8, "quad {j}{hh}{l}");
                }
            }
        }
    }

    #[test]
    fn divergence_free_in_j() {
        // Σ_j ∂_j K_jk = 0
        let f = DivKernel::new(1.0).unwrap();
        for &x in &[[0.2, 0.1, -0.1], [1.0, 2.0, 0.5]] {
            let v = f.eval(&x).unwrap();
            for k in 0..3 {
                let s: f64 = (0..3).map(|j| v[j][j][k]).sum();
                assert!(s.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn harmonic_part_is_symmetric() {
        let f = DivKernel::new(1.0).unwrap();
        let t = f.harmonic_part(&[0.3, -1.0, 0.8]).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    assert_eq!(t[a][b][c], t[b][a][c]);
                    assert_eq!(t[a][b][c], t[a][c][b]);
                }
            }
        }
    }
}
