use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::State;
use crate::spectral::{curl, partial, Grid, SpectralScalar, SpectralVector};

/// Fraction of the integrand allowed in the guard shell `L/8 < |x| ≤ L/4`.
pub const WRAP_GUARD: f64 = 0.01;

/// Measured field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    U,
    Theta,
    Omega,
}

impl Quantity {
    pub fn name(&self) -> &'static str {
        match self {
            Quantity::U => "u",
            Quantity::Theta => "theta",
            Quantity::Omega => "omega",
        }
    }
}

/// `‖|x|^a ∇^b q‖_p` with `p ∈ [2, ∞]` (`p = f64::INFINITY` for the maximum).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub quantity: Quantity,
    pub a: f64,
    pub b: u32,
    pub p: f64,
}

impl NormSpec {
    pub fn new(quantity: Quantity, a: f64, b: u32, p: f64) -> Result<Self> {
        let s = Self { quantity, a, b, p };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a >= 0.0 && self.a.is_finite()) {
            return Err(Error::InvalidArgument(format!("weight exponent a must be ≥ 0, got {}", self.a)));
        }
        if !(self.p >= 2.0) {
            return Err(Error::InvalidArgument(format!("integrability p must lie in [2, ∞], got {}", self.p)));
        }
        Ok(())
    }
}

/// A norm value and whether the wrap guard accepted it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub value: f64,
    pub trusted: bool,
}

/// `|x|` at every grid point (coordinates are centred, hence minimal-image).
pub fn radii(grid: &Grid) -> Vec<f64> {
    (0..grid.len())
        .map(|i| {
            let x = grid.point(i);
            (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
        })
        .collect()
}

/// Pointwise Euclidean magnitude of `∇^b` applied to each component, i.e. the
/// Frobenius norm of the derivative tensor.
pub fn derivative_magnitude(comps: &[&SpectralScalar], b: u32) -> Vec<f64> {
    let len = comps[0].grid().len();
    let mut acc = vec![0.0; len];
    let mut stack: Vec<SpectralScalar> = comps.iter().map(|c| (*c).clone()).collect();
    for _ in 0..b {
        stack = stack.iter().flat_map(|f| (0..3).map(move |ax| partial(f, ax))).collect();
    }
    for f in &stack {
        for (a, v) in acc.iter_mut().zip(f.to_physical()) {
            *a += v * v;
        }
    }
    acc.iter_mut().for_each(|a| *a = a.sqrt());
    acc
}

/// Discrete `‖w·m‖_p` over `|x| ≤ L/4` for a pointwise magnitude `m` and weight `w`.
pub fn restricted_norm(grid: &Grid, magnitude: &[f64], weight: impl Fn(f64) -> f64, p: f64) -> NormValue {
    let l = grid.l();
    let (inner, outer) = (l / 8.0, l / 4.0);
    let r = radii(grid);
    if p.is_infinite() {
        let mut best = 0.0f64;
        let mut at = 0.0;
        for (m, &ri) in magnitude.iter().zip(&r) {
            if ri <= outer {
                let v = weight(ri) * m;
                if v > best {
                    best = v;
                    at = ri;
                }
            }
        }
        return NormValue { value: best, trusted: best == 0.0 || at <= inner };
    }
    let mut total = 0.0;
    let mut shell = 0.0;
    for (m, &ri) in magnitude.iter().zip(&r) {
        if ri <= outer {
            let v = (weight(ri) * m).powf(p);
            total += v;
            if ri > inner {
                shell += v;
            }
        }
    }
    let trusted = total == 0.0 || shell < WRAP_GUARD * total;
    NormValue { value: (total * grid.cell()).powf(1.0 / p), trusted }
}

fn quantity_components(state: &State, q: Quantity) -> Vec<SpectralScalar> {
    match q {
        Quantity::U => state.u.comps().to_vec(),
        Quantity::Theta => vec![state.theta.clone()],
        Quantity::Omega => curl(&state.u).into_comps().to_vec(),
    }
}

/// `‖|x|^a ∇^b q(t)‖_p` restricted to `|x| ≤ L/4`.
pub fn weighted_norm(state: &State, spec: &NormSpec) -> Result<NormValue> {
    spec.validate()?;
    let comps = quantity_components(state, spec.quantity);
    let refs: Vec<&SpectralScalar> = comps.iter().collect();
    let m = derivative_magnitude(&refs, spec.b);
    let a = spec.a;
    Ok(restricted_norm(state.grid(), &m, |r| if a == 0.0 { 1.0 } else { r.powf(a) }, spec.p))
}

/// Weighted norm of a scalar field given directly.
pub fn weighted_norm_scalar(f: &SpectralScalar, a: f64, b: u32, p: f64) -> NormValue {
    let m = derivative_magnitude(&[f], b);
    restricted_norm(f.grid(), &m, |r| if a == 0.0 { 1.0 } else { r.powf(a) }, p)
}

/// Weighted norm of a vector field given directly.
pub fn weighted_norm_vector(v: &SpectralVector, a: f64, b: u32, p: f64) -> NormValue {
    let c = v.comps();
    let m = derivative_magnitude(&[&c[0], &c[1], &c[2]], b);
    restricted_norm(v.grid(), &m, |r| if a == 0.0 { 1.0 } else { r.powf(a) }, p)
}

/// `sup (√t + |x|)|u|` over `|x| ≤ L/4`.
pub fn x_norm(u: &SpectralVector, t: f64) -> NormValue {
    let c = u.comps();
    let m = derivative_magnitude(&[&c[0], &c[1], &c[2]], 0);
    let st = t.sqrt();
    restricted_norm(u.grid(), &m, |r| st + r, f64::INFINITY)
}

/// `sup (√t + |x|)³|θ|` over `|x| ≤ L/4`.
pub fn y_norm(theta: &SpectralScalar, t: f64) -> NormValue {
    let m = derivative_magnitude(&[theta], 0);
    let st = t.sqrt();
    restricted_norm(theta.grid(), &m, |r| (st + r).powi(3), f64::INFINITY)
}

/// `(‖u(t)‖_𝒳, ‖θ(t)‖_𝒴)` at the state's time.
pub fn scaling_invariant_norms(state: &State) -> (NormValue, NormValue) {
    (x_norm(&state.u, state.t), y_norm(&state.theta, state.t))
}
