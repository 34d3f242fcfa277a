//! Derivative tensors of radial functions `f(|x|)`.

use super::{Mat3, Point, Tensor3};

/// Radial derivatives `f'(r), f''(r), f'''(r)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RadialDerivs {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

fn unit(x: &Point, r: f64) -> Point {
    [x[0] / r, x[1] / r, x[2] / r]
}

/// `∂_j∂_k f = (f'' - f'/r) n_j n_k + (f'/r) δ_jk`.
pub(crate) fn hessian(x: &Point, r: f64, d: RadialDerivs) -> Mat3 {
    let n = unit(x, r);
    let a = d.d2 - d.d1 / r;
    let b = d.d1 / r;
    let mut m = [[0.0; 3]; 3];
    for j in 0..3 {
        for k in 0..3 {
            m[j][k] = a * n[j] * n[k] + if j == k { b } else { 0.0 };
        }
    }
    m
}

/// `∂_h∂_j∂_k f = (A' - 2A/r) n_h n_j n_k + (A/r)(δ_hj n_k + δ_hk n_j + δ_jk n_h)`
/// with `A = f'' - f'/r`.
pub(crate) fn third(x: &Point, r: f64, d: RadialDerivs) -> Tensor3 {
    let n = unit(x, r);
    let a = d.d2 - d.d1 / r;
    let ap = d.d3 - d.d2 / r + d.d1 / (r * r);
    let c1 = ap - 2.0 * a / r;
    let c2 = a / r;
    let mut t = [[[0.0; 3]; 3]; 3];
    for h in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                // evaluate on sorted indices so the result is exactly symmetric
                let mut idx = [h, j, k];
                idx.sort_unstable();
                let [a0, a1, a2] = idx;
                let delta = |p: usize, q: usize| if p == q { 1.0 } else { 0.0 };
                t[h][j][k] = c1 * n[a0] * n[a1] * n[a2]
                    + c2 * (delta(a0, a1) * n[a2] + delta(a0, a2) * n[a1] + delta(a1, a2) * n[a0]);
            }
        }
    }
    t
}
