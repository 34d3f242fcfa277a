use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussRule;
use crate::spectral::SpectralScalar;

const DOUBLINGS_BEFORE_TEST: usize = 8;
const GROWTH_THRESHOLD: f64 = 0.05;
const MAX_DOUBLINGS: usize = 40;

/// Zeroth and first moments `m₀ = ∫θ`, `m₁ = ∫yθ(y)dy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub m0: f64,
    pub m1: [f64; 3],
}

/// Integrates `(f, y f)` over the spherical shell `a ≤ |y| ≤ b`.
fn shell(f: &dyn Fn([f64; 3]) -> f64, a: f64, b: f64, panels: usize) -> [f64; 4] {
    let radial = GaussRule::new(16);
    let polar = GaussRule::new(24);
    let azimuth = 48;
    let mut out = [0.0; 4];
    let w = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + w * p as f64;
        for (r, wr) in radial.mapped(lo, lo + w) {
            for (c, wc) in polar.mapped(-1.0, 1.0) {
                let s = (1.0 - c * c).sqrt();
                for k in 0..azimuth {
                    let phi = 2.0 * PI * k as f64 / azimuth as f64;
                    let y = [r * s * phi.cos(), r * s * phi.sin(), r * c];
                    let wt = wr * wc * (2.0 * PI / azimuth as f64) * r * r;
                    let v = f(y) * wt;
                    out[0] += v;
                    out[1] += v * y[0];
                    out[2] += v * y[1];
                    out[3] += v * y[2];
                }
            }
        }
    }
    out
}

/// Moments of a profile on ℝ³ over balls of doubling radius, starting from
/// eight length scales. After eight doublings a relative change of 5% or
/// more per doubling is reported as [`Error::NonIntegrable`].
pub fn moments(theta0: &dyn Fn([f64; 3]) -> f64, scale: f64) -> Result<Moments> {
    if !(scale > 0.0) {
        return Err(Error::InvalidArgument("moment length scale must be positive".into()));
    }
    let mut r = 8.0 * scale;
    let mut acc = shell(theta0, 0.0, r, 16);
    let size = |m: &[f64; 4]| m[0].abs() + (m[1] * m[1] + m[2] * m[2] + m[3] * m[3]).sqrt();
    for k in 1..=MAX_DOUBLINGS {
        let add = shell(theta0, r, 2.0 * r, 16);
        r *= 2.0;
        for (a, d) in acc.iter_mut().zip(&add) {
            *a += d;
        }
        let total = size(&acc);
        let growth = if total == 0.0 { 0.0 } else { size(&add) / total };
        if !total.is_finite() {
            return Err(Error::NonIntegrable { growth: f64::INFINITY });
        }
        if k >= DOUBLINGS_BEFORE_TEST && growth >= GROWTH_THRESHOLD {
            return Err(Error::NonIntegrable { growth });
        }
        if growth < 1e-13 {
            break;
        }
    }
    Ok(Moments { m0: acc[0], m1: [acc[1], acc[2], acc[3]] })
}

/// Box moments of a grid field.
pub fn field_moments(theta: &SpectralScalar) -> Moments {
    let g = theta.grid();
    let vals = theta.to_physical();
    let mut m = Moments { m0: 0.0, m1: [0.0; 3] };
    for (i, v) in vals.iter().enumerate() {
        let x = g.point(i);
        m.m0 += v;
        for d in 0..3 {
            m.m1[d] += v * x[d];
        }
    }
    let c = g.cell();
    m.m0 *= c;
    m.m1.iter_mut().for_each(|v| *v *= c);
    m
}
