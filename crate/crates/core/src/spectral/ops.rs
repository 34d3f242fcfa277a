use num_complex::Complex64;
use rayon::prelude::*;

use super::field::{SpectralScalar, SpectralVector};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Leray projector `û ↦ û − ξ(ξ·û)/|ξ|²`; the `ξ = 0` mode passes through.
///
/// `ξ` is the derivative symbol of the grid (Nyquist components zeroed), so the
/// output is annihilated exactly by [`divergence`].
pub fn leray_project(v: &SpectralVector) -> SpectralVector {
    let g = v.grid().clone();
    v.map_modes(|idx, c| {
        let xi = g.dxi(idx);
        let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if k2 == 0.0 {
            return c;
        }
        let dot = (c[0] * xi[0] + c[1] * xi[1] + c[2] * xi[2]) / k2;
        [c[0] - dot * xi[0], c[1] - dot * xi[1], c[2] - dot * xi[2]]
    })
}

/// `ℙ(θ e₃)` for a scalar `θ`.
pub fn leray_vertical(theta: &SpectralScalar) -> SpectralVector {
    let g = theta.grid().clone();
    let c = theta.coef();
    let z = SpectralScalar::zeros(&g);
    let v = SpectralVector::new([z.clone(), z.clone(), z]).expect("same grid");
    v.map_modes(|idx, _| {
        let xi = g.dxi(idx);
        let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        let th = c[idx];
        if k2 == 0.0 {
            return [ZERO, ZERO, th];
        }
        let a = th * xi[2] / k2;
        [-a * xi[0], -a * xi[1], th - a * xi[2]]
    })
}

/// `iξ × û`.
pub fn curl(u: &SpectralVector) -> SpectralVector {
    let g = u.grid().clone();
    u.map_modes(|idx, c| {
        let d = g.dxi(idx);
        [
            I * (c[2] * d[1] - c[1] * d[2]),
            I * (c[0] * d[2] - c[2] * d[0]),
            I * (c[1] * d[0] - c[0] * d[1]),
        ]
    })
}

/// `iξ·û`.
pub fn divergence(u: &SpectralVector) -> SpectralScalar {
    let g = u.grid().clone();
    let coef = (0..g.len())
        .into_par_iter()
        .map(|idx| {
            let d = g.dxi(idx);
            I * (u.comp(0).coef()[idx] * d[0] + u.comp(1).coef()[idx] * d[1] + u.comp(2).coef()[idx] * d[2])
        })
        .collect();
    SpectralScalar::from_coefficients(&g, coef).expect("same grid")
}

/// `iξ φ̂`.
pub fn gradient(phi: &SpectralScalar) -> SpectralVector {
    let g = phi.grid().clone();
    let c = phi.coef();
    SpectralVector::zeros(&g).map_modes(|idx, _| {
        let d = g.dxi(idx);
        [I * d[0] * c[idx], I * d[1] * c[idx], I * d[2] * c[idx]]
    })
}

/// Partial derivative along one axis.
pub fn partial(phi: &SpectralScalar, axis: usize) -> SpectralScalar {
    let g = phi.grid().clone();
    phi.map_modes(|idx, c| I * g.dxi(idx)[axis] * c)
}

/// Zeroes every mode with some `|k_i| > N/3`.
pub fn dealias_scalar(f: &SpectralScalar) -> SpectralScalar {
    let g = f.grid().clone();
    f.map_modes(|idx, c| if g.within_two_thirds(idx) { c } else { ZERO })
}

pub fn dealias(v: &SpectralVector) -> SpectralVector {
    let g = v.grid().clone();
    v.map_modes(|idx, c| if g.within_two_thirds(idx) { c } else { [ZERO; 3] })
}

/// Quadratic terms of the system and the mean temperature flux.
#[derive(Debug, Clone)]
pub struct Nonlinear {
    /// `f = −∇·(u⊗u)`.
    pub f: SpectralVector,
    /// `g = −∇·(θu)`.
    pub g: SpectralScalar,
    /// Box integral `∫ θ u dx`.
    pub flux: [f64; 3],
}

/// Computes the quadratic terms pseudo-spectrally with the 2/3 rule.
///
/// Inputs are truncated to the retained modes before the products are
/// formed, so the retained output modes are exact.
pub fn nonlinear(u: &SpectralVector, theta: &SpectralScalar) -> Nonlinear {
    let g = u.grid().clone();
    let u = dealias(u);
    let theta = dealias_scalar(theta);
    let up = u.to_physical();
    let tp = theta.to_physical();
    let prod = |a: &[f64], b: &[f64]| -> SpectralScalar {
        let p: Vec<f64> = a.par_iter().zip(b).map(|(x, y)| x * y).collect();
        SpectralScalar::from_physical(&g, &p).expect("same grid")
    };
    // symmetric products u_i u_j, j ≥ i
    let mut uu: Vec<SpectralScalar> = Vec::with_capacity(6);
    for i in 0..3 {
        for j in i..3 {
            uu.push(prod(&up[i], &up[j]));
        }
    }
    let pair = |i: usize, j: usize| -> usize {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        [[0, 1, 2], [1, 3, 4], [2, 4, 5]][a][b]
    };
    let tu: Vec<SpectralScalar> = (0..3).map(|j| prod(&tp, &up[j])).collect();
    let vol = g.l().powi(3);
    let flux = [tu[0].coef()[0].re * vol, tu[1].coef()[0].re * vol, tu[2].coef()[0].re * vol];
    let f = SpectralVector::zeros(&g).map_modes(|idx, _| {
        if !g.within_two_thirds(idx) {
            return [ZERO; 3];
        }
        let d = g.dxi(idx);
        let mut out = [ZERO; 3];
        for (i, o) in out.iter_mut().enumerate() {
            let mut s = ZERO;
            for (j, dj) in d.iter().enumerate() {
                s += uu[pair(i, j)].coef()[idx] * *dj;
            }
            *o = -I * s;
        }
        out
    });
    let gcoef = (0..g.len())
        .into_par_iter()
        .map(|idx| {
            if !g.within_two_thirds(idx) {
                return ZERO;
            }
            let d = g.dxi(idx);
            -I * (tu[0].coef()[idx] * d[0] + tu[1].coef()[idx] * d[1] + tu[2].coef()[idx] * d[2])
        })
        .collect();
    Nonlinear { f, g: SpectralScalar::from_coefficients(&g, gcoef).expect("same grid"), flux }
}

/// `(f, g) = (−∇·(u⊗u), −∇·(θu))`, dealiased.
pub fn nonlinear_terms(u: &SpectralVector, theta: &SpectralScalar) -> (SpectralVector, SpectralScalar) {
    let n = nonlinear(u, theta);
    (n.f, n.g)
}

/// Pressure gradient `∇P = ∇(−Δ)^{-1}∇·(u·∇u − θe₃)`, i.e. per mode
/// `−ξ(ξ·ŵ)/|ξ|²` with `ŵ = \widehat{u·∇u} − θ̂e₃`; the `ξ = 0` mode is zero.
pub fn recover_pressure_gradient(u: &SpectralVector, theta: &SpectralScalar) -> SpectralVector {
    let (f, _) = nonlinear_terms(u, theta);
    let g = u.grid().clone();
    let th = theta.coef();
    f.map_modes(|idx, fc| {
        let xi = g.dxi(idx);
        let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if k2 == 0.0 {
            return [ZERO; 3];
        }
        // u·∇u = −f for divergence-free u
        let w = [-fc[0], -fc[1], -fc[2] - th[idx]];
        let dot = (w[0] * xi[0] + w[1] * xi[1] + w[2] * xi[2]) / k2;
        [-dot * xi[0], -dot * xi[1], -dot * xi[2]]
    })
}

fn product(grid: &super::Grid, a: &[f64], b: &[f64]) -> SpectralScalar {
    let p: Vec<f64> = a.par_iter().zip(b).map(|(x, y)| x * y).collect();
    SpectralScalar::from_physical(grid, &p).expect("same grid")
}

/// `−∇·(u⊗v)`, i.e. `−∂_j(u_i v_j)`, dealiased.
pub fn tensor_divergence(u: &SpectralVector, v: &SpectralVector) -> SpectralVector {
    let g = u.grid().clone();
    let up = dealias(u).to_physical();
    let vp = dealias(v).to_physical();
    let mut prods: Vec<SpectralScalar> = Vec::with_capacity(9);
    for ui in &up {
        for vj in &vp {
            prods.push(product(&g, ui, vj));
        }
    }
    SpectralVector::zeros(&g).map_modes(|idx, _| {
        if !g.within_two_thirds(idx) {
            return [ZERO; 3];
        }
        let d = g.dxi(idx);
        let mut out = [ZERO; 3];
        for (i, o) in out.iter_mut().enumerate() {
            let s: Complex64 = (0..3).map(|j| prods[3 * i + j].coef()[idx] * d[j]).sum();
            *o = -I * s;
        }
        out
    })
}

/// `−∇·(θu)`, dealiased.
pub fn scalar_flux_divergence(theta: &SpectralScalar, u: &SpectralVector) -> SpectralScalar {
    let g = u.grid().clone();
    let tp = dealias_scalar(theta).to_physical();
    let up = dealias(u).to_physical();
    let tu: Vec<SpectralScalar> = up.iter().map(|uj| product(&g, &tp, uj)).collect();
    let coef = (0..g.len())
        .into_par_iter()
        .map(|idx| {
            if !g.within_two_thirds(idx) {
                return ZERO;
            }
            let d = g.dxi(idx);
            -I * (tu[0].coef()[idx] * d[0] + tu[1].coef()[idx] * d[1] + tu[2].coef()[idx] * d[2])
        })
        .collect();
    SpectralScalar::from_coefficients(&g, coef).expect("same grid")
}
