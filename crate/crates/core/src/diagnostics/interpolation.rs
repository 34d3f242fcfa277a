use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::{median, STABILITY_SPREAD};
use crate::error::{Error, Result};
use crate::kernels::{radial_integral, radial_lp_norm, LpOrder};

/// Radial states evolved under `∂_t + (−Δ)^α` with known forcing.
///
/// `g₀` is the unit-mass Gaussian of width `sigma` and `A = (−Δ)^α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InterpolationFamily {
    /// `u = e^{-tA} g₀`, zero forcing.
    FracHeatGaussian { sigma: f64 },
    /// `u = (1+t) e^{-tA} g₀`, forcing `e^{-tA} g₀`.
    ForcedGaussian { sigma: f64 },
    /// `u ≡ c`, zero forcing.
    Constant { value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolationSample {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolationReport {
    pub alpha: f64,
    pub p: f64,
    pub samples: Vec<InterpolationSample>,
    pub max: f64,
    pub median: f64,
    /// `max ≤ 10·median`, or every ratio zero.
    pub pass: bool,
}

/// Time samples per quarter of the sup window.
const WINDOW_SAMPLES: usize = 5;

/// `‖e^{-τA}g₀‖_p` and `‖∇e^{-τA}g₀‖_p`.
struct Flow {
    alpha: f64,
    sigma: f64,
    p: LpOrder,
}

impl Flow {
    fn cutoff(&self, tau: f64) -> f64 {
        let gauss = (2.0 * 14.0 * std::f64::consts::LN_10).sqrt() / self.sigma;
        let frac = (14.0 * std::f64::consts::LN_10 / tau).powf(0.5 / self.alpha);
        gauss.min(frac)
    }

    fn multiplier(&self, tau: f64) -> impl Fn(f64) -> f64 {
        let (a2, s2) = (2.0 * self.alpha, self.sigma * self.sigma);
        move |rho| (-tau * rho.powf(a2) - 0.5 * s2 * rho * rho).exp()
    }

    fn scale(&self, tau: f64) -> f64 {
        self.sigma.max(tau.powf(0.5 / self.alpha))
    }

    fn norms(&self, tau: f64) -> Result<(f64, f64)> {
        if self.alpha == 1.0 {
            // Gaussian of variance σ² + 2τ
            let v = self.sigma * self.sigma + 2.0 * tau;
            let c = (2.0 * std::f64::consts::PI * v).powf(-1.5);
            let u = move |r: f64| Ok(c * (-r * r / (2.0 * v)).exp());
            let du = move |r: f64| Ok(c * r / v * (-r * r / (2.0 * v)).exp());
            let s = v.sqrt();
            return Ok((radial_lp_norm(&u, s, self.p)?, radial_lp_norm(&du, s, self.p)?));
        }
        let cut = self.cutoff(tau);
        let m = self.multiplier(tau);
        let u = |r: f64| Ok(radial_integral(cut, 2, 0, r, &m)?.value.abs());
        let du = |r: f64| Ok(radial_integral(cut, 3, 1, r, &m)?.value.abs());
        let s = self.scale(tau);
        Ok((radial_lp_norm(&u, s, self.p)?, radial_lp_norm(&du, s, self.p)?))
    }
}

/// Uniform samples of `[t/4, t]` that include `t/2`.
fn window(t: f64) -> impl Iterator<Item = f64> {
    let k = WINDOW_SAMPLES - 1;
    (0..=3 * k).map(move |i| t / 4.0 * (1.0 + i as f64 / k as f64))
}

/// Ratio of the two sides of the gradient interpolation inequality
///
/// `sup_{[t/2,t]} ‖∇u‖_p ≤ C (sup_{[t/4,t]} ‖u‖_p)^{1/2α} (sup_{[t/4,t]} τ‖u_t + (−Δ)^α u‖_p)^{1−1/2α}
///  + C t^{-1/2α} sup_{[t/4,t]} ‖u‖_p`
///
/// at each sample time, with sups over a uniform sample of each window.
pub fn interpolation_check(
    alpha: f64,
    p: f64,
    family: InterpolationFamily,
    times: &[f64],
) -> Result<InterpolationReport> {
    if !(alpha > 0.5) {
        return Err(Error::InvalidArgument(format!("interpolation check needs α > 1/2, got {alpha}")));
    }
    let order = LpOrder::new(p)?;
    if times.is_empty() || times.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidArgument("sample times must be positive".into()));
    }
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        let (lhs, a, b) = match family {
            InterpolationFamily::Constant { .. } => {
                samples.push(InterpolationSample { t, lhs: 0.0, rhs: f64::NAN, ratio: 0.0 });
                continue;
            }
            InterpolationFamily::FracHeatGaussian { sigma } | InterpolationFamily::ForcedGaussian { sigma } => {
                if !(sigma > 0.0) {
                    return Err(Error::InvalidArgument("Gaussian width must be positive".into()));
                }
                let forced = matches!(family, InterpolationFamily::ForcedGaussian { .. });
                let flow = Flow { alpha, sigma, p: order };
                let amp = |tau: f64| if forced { 1.0 + tau } else { 1.0 };
                let taus: Vec<f64> = window(t).collect();
                let norms = taus.par_iter().map(|&tau| flow.norms(tau)).collect::<Result<Vec<_>>>()?;
                let (mut lhs, mut a, mut b) = (0.0f64, 0.0f64, 0.0f64);
                for (i, (&tau, &(n, d))) in taus.iter().zip(&norms).enumerate() {
                    a = a.max(amp(tau) * n);
                    if forced {
                        b = b.max(tau * n);
                    }
                    if i >= WINDOW_SAMPLES - 1 {
                        lhs = lhs.max(amp(tau) * d);
                    }
                }
                (lhs, a, b)
            }
        };
        let e = 0.5 / alpha;
        let rhs = a.powf(e) * b.powf(1.0 - e) + t.powf(-e) * a;
        if rhs == 0.0 && lhs != 0.0 {
            return Err(Error::Precondition(format!("right-hand side vanishes with ‖∇u‖ = {lhs:e} at t = {t}")));
        }
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        samples.push(InterpolationSample { t, lhs, rhs, ratio });
    }
    let ratios: Vec<f64> = samples.iter().map(|s| s.ratio).collect();
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    let med = median(&ratios);
    let pass = max == 0.0 || max <= STABILITY_SPREAD * med;
    Ok(InterpolationReport { alpha, p, samples, max, median: med, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_state_has_zero_ratio() {
        let r = interpolation_check(1.0, 2.0, InterpolationFamily::Constant { value: 3.0 }, &[1.0, 2.0]).unwrap();
        assert!(r.samples.iter().all(|s| s.ratio == 0.0));
        assert!(r.pass);
    }

    #[test]
    fn heat_flow_ratio_matches_closed_form() {
        // p = 2, α = 1: ‖u‖₂ ∝ v^{-3/4}, ‖∇u‖₂ ∝ v^{-5/4} with v = σ² + 2τ
        let sigma: f64 = 1.0;
        let r = interpolation_check(1.0, 2.0, InterpolationFamily::FracHeatGaussian { sigma }, &[4.0]).unwrap();
        let v = |tau: f64| sigma * sigma + 2.0 * tau;
        let c = |v: f64| (2.0 * std::f64::consts::PI * v).powf(-1.5) * (std::f64::consts::PI * v).powf(0.75);
        let n = c(v(1.0));
        let d = c(v(2.0)) * (1.5 / v(2.0)).sqrt();
        let expected = d / (0.5 * n);
        assert!((r.samples[0].ratio - expected).abs() < 1e-8 * expected, "{} vs {expected}", r.samples[0].ratio);
    }

    #[test]
    fn fractional_flow_ratios_are_stable() {
        let fam = InterpolationFamily::ForcedGaussian { sigma: 1.0 };
        let r = interpolation_check(0.75, f64::INFINITY, fam, &[1.0, 2.0, 5.0, 10.0]).unwrap();
        assert!(r.pass && r.max.is_finite() && r.median > 0.0, "{r:?}");
    }

    #[test]
    fn rejects_poisson_exponent() {
        assert!(interpolation_check(0.5, 2.0, InterpolationFamily::FracHeatGaussian { sigma: 1.0 }, &[1.0]).is_err());
    }
}
