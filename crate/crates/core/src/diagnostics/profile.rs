use serde::{Deserialize, Serialize};

use super::moments::Moments;
use super::norms::radii;
use crate::error::{Error, Result};
use crate::kernels::{DivKernel, HarmonicPotential, OseenKernel};
use crate::quadrature::{merge_breakpoints, GaussRule};
use crate::solver::Trajectory;
use crate::spectral::nonlinear;

/// Far-field residual variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileVariant {
    /// `u − e^{tΔ}u₀ − t e^{tΔ}ℙ(θ₀e₃)`.
    R1,
    /// `u − e^{tΔ}u₀ − t K_{·3}(t,x) m₀`.
    R2,
    /// `u − e^{tΔ}u₀ − t R_{·3}(x) m₀` with `R = ∇²E`.
    R3,
    /// Zero-mean case: `u − e^{tΔ}u₀ + t F_{·;h,3}(t,x) m₁_h + ∫₀ᵗ (t−s) F_{·;h,3}(t−s,x) M_h(s) ds`
    /// with `M(s) = ∫θu dy`.
    R1Tilde,
    /// As [`ProfileVariant::R1Tilde`] with `F` replaced by `ℱ = ∇³E`.
    R2Tilde,
}

impl ProfileVariant {
    fn zero_mean(&self) -> bool {
        matches!(self, ProfileVariant::R1Tilde | ProfileVariant::R2Tilde)
    }

    /// Power of `|x|` in the normalisation `t|x|^{-k}`.
    pub fn order(&self) -> i32 {
        if self.zero_mean() {
            4
        } else {
            3
        }
    }
}

/// Sampled residual on `κ√t ≤ |x| ≤ L/4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileResidual {
    pub variant: ProfileVariant,
    pub t: f64,
    pub kappa: f64,
    /// `sup |R(x)| / (t |x|^{-k})` over the region.
    pub sup_ratio: f64,
    /// `(|x|, |R(x)|)` at every sampled grid point.
    pub samples: Vec<(f64, f64)>,
}

/// Relative size of `m₀` below which data count as zero-mean.
const ZERO_MEAN_TOLERANCE: f64 = 1e-10;

/// GL nodes per panel for the `M(s)` time integral.
const TIME_NODES: usize = 8;

/// Far-field residual of a trajectory at one of its stored times.
///
/// `moments` are those of the continuous initial temperature. Zero-mean
/// variants are rejected unless `|m₀|` is negligible against `|m₁|`.
pub fn profile_residual(
    traj: &Trajectory,
    t: f64,
    variant: ProfileVariant,
    moments: &Moments,
    kappa: f64,
) -> Result<ProfileResidual> {
    if !(t > 0.0) || !(kappa > 0.0) {
        return Err(Error::InvalidArgument("profile residual needs t > 0 and κ > 0".into()));
    }
    let m1n = moments.m1.iter().map(|v| v * v).sum::<f64>().sqrt();
    if variant.zero_mean() && moments.m0.abs() > ZERO_MEAN_TOLERANCE * m1n.max(f64::MIN_POSITIVE) {
        return Err(Error::Precondition(format!(
            "zero-mean profile requested but m₀ = {:e}",
            moments.m0
        )));
    }
    let grid = traj.grid().clone();
    let u = traj.velocity_at(t)?;
    let base = match variant {
        ProfileVariant::R1 => traj.linear_velocity(t),
        _ => traj.initial().u.heat(t),
    };
    let diff = u.sub(&base).to_physical();
    let r = radii(&grid);
    let (lo, hi) = (kappa * t.sqrt(), grid.l() / 4.0);
    let region: Vec<usize> = (0..grid.len()).filter(|&i| r[i] >= lo && r[i] <= hi).collect();
    if region.is_empty() {
        return Err(Error::Precondition(format!(
            "region {lo} ≤ |x| ≤ {hi} contains no grid points"
        )));
    }

    // flux history M(s) for the zero-mean variants
    let history: Vec<(f64, f64, [f64; 3])> = if variant.zero_mean() {
        let nodes: Vec<f64> = traj.times().into_iter().filter(|&s| s < t).collect();
        let breaks = merge_breakpoints(&[0.0, t], &nodes);
        let rule = GaussRule::new(TIME_NODES);
        let mut h = Vec::new();
        for w in breaks.windows(2) {
            for (s, wt) in rule.mapped(w[0], w[1]) {
                let nl = nonlinear(&traj.velocity_at(s)?, &traj.temperature_at(s)?);
                h.push((s, wt, nl.flux));
            }
        }
        h
    } else {
        Vec::new()
    };
    let oseen = OseenKernel::new(t)?;
    let div = DivKernel::new(t)?;
    let m0 = moments.m0;
    let m1 = moments.m1;
    let mut samples = Vec::with_capacity(region.len());
    let mut sup = 0.0f64;
    for &i in &region {
        let x = grid.point(i);
        let mut res = [diff[0][i], diff[1][i], diff[2][i]];
        match variant {
            ProfileVariant::R1 => {}
            ProfileVariant::R2 => {
                let k = oseen.eval(&x)?;
                for j in 0..3 {
                    res[j] -= t * k[j][2] * m0;
                }
            }
            ProfileVariant::R3 => {
                let k = HarmonicPotential.hessian(&x)?;
                for j in 0..3 {
                    res[j] -= t * k[j][2] * m0;
                }
            }
            ProfileVariant::R1Tilde => {
                let f = div.eval(&x)?;
                for j in 0..3 {
                    res[j] += t * (0..3).map(|h| f[j][h][2] * m1[h]).sum::<f64>();
                }
                for &(s, wt, mh) in &history {
                    let lag = t - s;
                    let fs = DivKernel::new(lag)?.eval(&x)?;
                    for j in 0..3 {
                        res[j] += wt * lag * (0..3).map(|h| fs[j][h][2] * mh[h]).sum::<f64>();
                    }
                }
            }
            ProfileVariant::R2Tilde => {
                let f = HarmonicPotential.third(&x)?;
                let mut weight = m1.map(|v| t * v);
                for &(s, wt, mh) in &history {
                    for h in 0..3 {
                        weight[h] += wt * (t - s) * mh[h];
                    }
                }
                for j in 0..3 {
                    res[j] += (0..3).map(|h| f[j][h][2] * weight[h]).sum::<f64>();
                }
            }
        }
        let mag = (res[0] * res[0] + res[1] * res[1] + res[2] * res[2]).sqrt();
        samples.push((r[i], mag));
        sup = sup.max(mag * r[i].powi(variant.order()) / t);
    }
    Ok(ProfileResidual { variant, t, kappa, sup_ratio: sup, samples })
}
