use serde::{Deserialize, Serialize};

use super::norms::{derivative_magnitude, radii, restricted_norm};
use crate::error::{Error, Result};
use crate::solver::Trajectory;
use crate::spectral::SpectralScalar;

/// Largest tolerated max/median spread of "bounded constant" ratios.
pub const STABILITY_SPREAD: f64 = 10.0;

/// Membership spaces of the fixed-point argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "kebab-case")]
pub enum Space {
    /// `sup (√t + |x|)|u|`.
    X,
    /// `sup (√t + |x|)³|θ|`.
    Y,
    /// `|u| ≤ C inf_{0≤η≤a} |x|^{-η}(1+t)^{(η−1)/2}`.
    XA { a: f64 },
    /// `|θ| ≤ C inf_{0≤η≤b} |x|^{-η}(1+t)^{(η−3)/2}`.
    YB { b: f64 },
    /// `|u| ≤ C inf_{0≤η≤a} |x|^{-η}(1+t)^{(η−2)/2}`.
    XTildeA { a: f64 },
    /// `|θ| ≤ C inf_{0≤η≤b} |x|^{-η}(1+t)^{(η−4)/2}`.
    YTildeB { b: f64 },
}

impl Space {
    fn is_velocity(&self) -> bool {
        matches!(self, Space::X | Space::XA { .. } | Space::XTildeA { .. })
    }

    /// Admissible Lebesgue exponents, as an open lower bound.
    fn q_lower(&self) -> f64 {
        match *self {
            Space::X => 3.0,
            Space::Y => 1.0,
            Space::XA { a } | Space::XTildeA { a } => 3.0 / a,
            Space::YB { b } | Space::YTildeB { b } => 3.0 / b,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Space::XA { a } if !(a >= 1.0) => Err(Error::InvalidArgument(format!("X_a needs a ≥ 1, got {a}"))),
            Space::YB { b } if !(b >= 3.0) => Err(Error::InvalidArgument(format!("Y_b needs b ≥ 3, got {b}"))),
            Space::XTildeA { a } if !(a > 0.0) => Err(Error::InvalidArgument(format!("weight must be positive, got {a}"))),
            Space::YTildeB { b } if !(b >= 4.0) => {
                Err(Error::InvalidArgument(format!("Ỹ_b needs b ≥ 4, got {b}")))
            }
            _ => Ok(()),
        }
    }

    /// Pointwise weight `w(t, |x|)` so that the membership norm is `sup |f|/w`.
    pub fn weight(&self, t: f64, r: f64) -> f64 {
        let inf = |c: f64, a: f64| {
            let s = (1.0 + t).sqrt();
            let base = (1.0 + t).powf(-c / 2.0);
            // the infimum over η ∈ [0, a] is attained at an endpoint
            if r >= s {
                base * (s / r).powf(a)
            } else {
                base
            }
        };
        match *self {
            Space::X => 1.0 / (t.sqrt() + r),
            Space::Y => (t.sqrt() + r).powi(-3),
            Space::XA { a } => inf(1.0, a),
            Space::YB { b } => inf(3.0, b),
            Space::XTildeA { a } => inf(2.0, a),
            Space::YTildeB { b } => inf(4.0, b),
        }
    }

    /// Exponent `β` in `‖f(s)‖_q ≤ C‖f‖ τ(s)^β`, with `τ(s) = s` for 𝒳, 𝒴 and `1 + s` otherwise.
    pub fn rate(&self, q: f64) -> f64 {
        let iq = if q.is_infinite() { 0.0 } else { 1.0 / q };
        match self {
            Space::X | Space::XA { .. } => -0.5 + 1.5 * iq,
            Space::Y | Space::YB { .. } => -1.5 + 1.5 * iq,
            Space::XTildeA { .. } => -1.0 + 1.5 * iq,
            Space::YTildeB { .. } => -2.0 + 1.5 * iq,
        }
    }

    fn shifted(&self) -> bool {
        !matches!(self, Space::X | Space::Y)
    }
}

/// Outcome of an Lᵖ bound check over the stored times of a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub space: Space,
    pub q: f64,
    pub rate: f64,
    pub membership: f64,
    /// `(s, ‖f(s)‖_q / (‖f‖ τ(s)^β))`.
    pub ratios: Vec<(f64, f64)>,
    pub max: f64,
    pub median: f64,
    pub pass: bool,
}

pub(crate) fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Samples `‖f(s)‖_q` against the predicted rate at every stored time `s > 0`.
///
/// The membership norm is the discrete supremum of `|f|/w` over the stored
/// times and the grid points with `|x| ≤ L/4`.
pub fn lp_bound_check(traj: &Trajectory, space: Space, q: f64) -> Result<BoundReport> {
    space.validate()?;
    if !(q > space.q_lower()) {
        return Err(Error::InvalidArgument(format!(
            "q = {q} is outside the admissible range ({}, ∞]",
            space.q_lower()
        )));
    }
    let grid = traj.grid();
    let r = radii(grid);
    let outer = grid.l() / 4.0;
    let mut membership = 0.0f64;
    let mut norms = Vec::new();
    for st in traj.states().iter().filter(|s| s.t > 0.0) {
        let m = if space.is_velocity() {
            let c = st.u.comps();
            derivative_magnitude(&[&c[0], &c[1], &c[2]], 0)
        } else {
            derivative_magnitude(&[&st.theta as &SpectralScalar], 0)
        };
        for (v, &ri) in m.iter().zip(&r) {
            if ri <= outer {
                membership = membership.max(v / space.weight(st.t, ri));
            }
        }
        norms.push((st.t, restricted_norm(grid, &m, |_| 1.0, q).value));
    }
    if norms.is_empty() {
        return Err(Error::InvalidArgument("trajectory has no positive times".into()));
    }
    if !(membership.is_finite()) {
        return Err(Error::Precondition("membership norm is not finite".into()));
    }
    let rate = space.rate(q);
    let ratios: Vec<(f64, f64)> = norms
        .iter()
        .map(|&(s, n)| {
            let tau = if space.shifted() { 1.0 + s } else { s };
            (s, if membership == 0.0 { 0.0 } else { n / (membership * tau.powf(rate)) })
        })
        .collect();
    let vals: Vec<f64> = ratios.iter().map(|r| r.1).collect();
    let max = vals.iter().copied().fold(0.0, f64::max);
    let med = median(&vals);
    let pass = vals.iter().all(|v| v.is_finite()) && (max == 0.0 || max <= STABILITY_SPREAD * med);
    Ok(BoundReport { space, q, rate, membership, ratios, max, median: med, pass })
}
