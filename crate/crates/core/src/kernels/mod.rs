//! Convolution kernels of the heat semigroup, the Leray-projected heat
//! semigroup and its divergence, together with the Newtonian potential
//! derivatives that describe their far-field behaviour.
//!
//! All evaluators are pure functions of their arguments. Matrix-valued
//! kernels are returned as plain nested arrays indexed `[j][k]`; the divergence
//! kernel is indexed `[j][h][k]` with `F_{j;h,k} = ∂_h K_{jk}`.

mod bessel;
mod div;
mod frac;
mod harmonic;
mod heat;
mod lp;
mod oseen;
mod radial;

pub use bessel::spherical_bessel;
pub use div::DivKernel;
pub use frac::{frac_heat_kernel, FracHeatKernel};
pub use harmonic::{harmonic_derivatives, HarmonicPotential, HarmonicTensor};
pub use heat::{heat_kernel, HeatKernel};
pub use lp::{kernel_lp_norm, radial_lp_norm, KernelKind, LpOrder};
pub use oseen::{oseen_eval, OseenKernel};

pub type Point = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];
pub type Tensor3 = [[[f64; 3]; 3]; 3];

pub(crate) fn norm(x: &Point) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

/// Frobenius norm of a 3×3 matrix.
pub fn mat_norm(m: &Mat3) -> f64 {
    m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

/// Frobenius norm of a 3-index tensor.
pub fn tensor_norm(m: &Tensor3) -> f64 {
    m.iter().flatten().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

/// Radial quadrature cutoff Ξ with `exp(-t Ξ^{2α}) = 1e-14`.
pub(crate) fn fourier_cutoff(t: f64, alpha: f64) -> f64 {
    (14.0 * std::f64::consts::LN_10 / t).powf(0.5 / alpha)
}

/// Panel breakpoints on `[0, cutoff]` resolving oscillations of `sin(ρ r)`.
pub(crate) fn oscillation_breaks(cutoff: f64, r: f64) -> Vec<f64> {
    let width = if r > 0.0 { (std::f64::consts::PI / r).min(cutoff / 8.0) } else { cutoff / 8.0 };
    let n = (cutoff / width).ceil().max(1.0) as usize;
    let mut breaks: Vec<f64> = (0..=n).map(|i| cutoff * i as f64 / n as f64).collect();
    // resolve the non-smooth behaviour of ρ^{2α} near the origin
    breaks.insert(1, breaks[1] * 1e-3);
    breaks.insert(2, breaks[2] * 1e-1);
    breaks
}

/// `(1/2π²) ∫_0^∞ ρ^power e^{-tρ^{2α}} j_l(ρ r) dρ`, the radial reduction of a
/// 3-D inverse Fourier transform.
pub(crate) fn radial_transform(
    t: f64,
    alpha: f64,
    power: i32,
    l: usize,
    r: f64,
) -> crate::error::Result<crate::quadrature::Estimate> {
    let two_alpha = 2.0 * alpha;
    radial_integral(fourier_cutoff(t, alpha), power, l, r, |rho| (-t * rho.powf(two_alpha)).exp())
}

/// `(1/2π²) ∫_0^Ξ ρ^power m(ρ) j_l(ρ r) dρ` for a radial multiplier `m` that is
/// negligible beyond the cutoff `Ξ`.
pub(crate) fn radial_integral(
    cutoff: f64,
    power: i32,
    l: usize,
    r: f64,
    m: impl Fn(f64) -> f64,
) -> crate::error::Result<crate::quadrature::Estimate> {
    let breaks = oscillation_breaks(cutoff, r);
    // scale of the undamped integrand bounds the achievable absolute error
    let scale = cutoff.powi(power + 1);
    let ad = crate::quadrature::Adaptive::new(1e-16 * scale, 1e-13);
    let est = ad.integrate_panels(&breaks, |rho| rho.powi(power) * m(rho) * spherical_bessel(l, rho * r))?;
    let c = 1.0 / (2.0 * std::f64::consts::PI * std::f64::consts::PI);
    Ok(crate::quadrature::Estimate { value: c * est.value, error: c * est.error })
}
