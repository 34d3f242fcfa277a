//! Duhamel integrals of the mild formulations by per-mode time quadrature.
//!
//! Integrals are accumulated from breakpoint to breakpoint with the semigroup
//! identity `I(τ') = e^{(τ'−τ)Δ} I(τ) + ∫_τ^{τ'} e^{(τ'−s)Δ} N(s) ds`, so a single
//! sweep yields every requested time. On each step the local integral uses
//! composite Gauss–Legendre on panels graded geometrically toward `τ'`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::quadrature::{graded_breakpoints, GaussRule};
use crate::spectral::{
    leray_project, leray_vertical, nonlinear, scalar_flux_divergence, tensor_divergence, SpectralScalar,
    SpectralVector,
};

/// Panel layout of the time quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeQuadrature {
    /// Width of the panel touching the upper limit.
    pub finest: f64,
    /// Upper bound on panel widths.
    pub max_width: f64,
    /// Growth factor between neighbouring panels.
    pub ratio: f64,
    /// Gauss–Legendre nodes per panel.
    pub nodes: usize,
}

impl Default for TimeQuadrature {
    fn default() -> Self {
        Self { finest: 1.0 / 64.0, max_width: 0.125, ratio: 2.0, nodes: 5 }
    }
}

impl TimeQuadrature {
    pub fn validate(&self) -> Result<()> {
        if !(self.finest > 0.0 && self.max_width >= self.finest && self.ratio >= 1.0 && self.nodes >= 1) {
            return Err(Error::InvalidArgument(format!("invalid time quadrature {self:?}")));
        }
        Ok(())
    }

    /// The same layout with every panel halved.
    pub fn refined(&self) -> Self {
        Self { finest: self.finest / 2.0, max_width: self.max_width / 2.0, ..*self }
    }

    fn panels(&self, a: f64, b: f64) -> Vec<f64> {
        let w = b - a;
        graded_breakpoints(a, b, self.finest.min(w), self.max_width.min(w).max(self.finest.min(w)), self.ratio)
    }
}

/// A vector field known at every time of an interval.
pub trait VectorSource: Sync {
    fn vector_at(&self, s: f64) -> Result<SpectralVector>;
    /// Largest covered time.
    fn horizon(&self) -> f64;
    /// Times where the field is known exactly (used as breakpoints).
    fn nodes(&self) -> Vec<f64> {
        Vec::new()
    }
}

pub trait ScalarSource: Sync {
    fn scalar_at(&self, s: f64) -> Result<SpectralScalar>;
    fn horizon(&self) -> f64;
    fn nodes(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// A field frozen in time.
impl VectorSource for SpectralVector {
    fn vector_at(&self, _: f64) -> Result<SpectralVector> {
        Ok(self.clone())
    }
    fn horizon(&self) -> f64 {
        f64::INFINITY
    }
}

impl ScalarSource for SpectralScalar {
    fn scalar_at(&self, _: f64) -> Result<SpectralScalar> {
        Ok(self.clone())
    }
    fn horizon(&self) -> f64 {
        f64::INFINITY
    }
}

/// Free heat flow `s ↦ e^{sΔ}f₀`.
#[derive(Debug, Clone)]
pub struct HeatFlow<F>(pub F);

impl VectorSource for HeatFlow<SpectralVector> {
    fn vector_at(&self, s: f64) -> Result<SpectralVector> {
        Ok(self.0.heat(s))
    }
    fn horizon(&self) -> f64 {
        f64::INFINITY
    }
}

impl ScalarSource for HeatFlow<SpectralScalar> {
    fn scalar_at(&self, s: f64) -> Result<SpectralScalar> {
        Ok(self.0.heat(s))
    }
    fn horizon(&self) -> f64 {
        f64::INFINITY
    }
}

/// Velocity of a trajectory.
pub struct Velocity<'a>(pub &'a Trajectory);
/// Temperature of a trajectory.
pub struct Temperature<'a>(pub &'a Trajectory);

impl VectorSource for Velocity<'_> {
    fn vector_at(&self, s: f64) -> Result<SpectralVector> {
        self.0.velocity_at(s)
    }
    fn horizon(&self) -> f64 {
        self.0.horizon()
    }
    fn nodes(&self) -> Vec<f64> {
        self.0.times()
    }
}

impl ScalarSource for Temperature<'_> {
    fn scalar_at(&self, s: f64) -> Result<SpectralScalar> {
        self.0.temperature_at(s)
    }
    fn horizon(&self) -> f64 {
        self.0.horizon()
    }
    fn nodes(&self) -> Vec<f64> {
        self.0.times()
    }
}

/// Which Duhamel terms to accumulate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Terms {
    /// `B(u,v) = ∫ e^{(t−s)Δ} ℙ(−∇·(u⊗v)) ds`.
    pub b: bool,
    /// `E(u,θ) = −∫ (t−s) e^{(t−s)Δ} ℙ((∇·(θu)) e₃) ds`.
    pub e: bool,
    /// `B̃(θ,u) = −∫ e^{(t−s)Δ} ∇·(θu) ds`.
    pub btilde: bool,
    /// `L(θ) = ∫ e^{(t−s)Δ} ℙ(θ e₃) ds`.
    pub l: bool,
}

/// Duhamel terms at one time; terms that were not requested are `None`.
#[derive(Debug, Clone)]
pub struct Integrals {
    pub t: f64,
    pub b: Option<SpectralVector>,
    pub e: Option<SpectralVector>,
    pub btilde: Option<SpectralScalar>,
    pub l: Option<SpectralVector>,
}

/// Inputs of the fused sweep. `v = None` means `B(u,u)`.
pub struct Sources<'a> {
    pub u: &'a dyn VectorSource,
    pub v: Option<&'a dyn VectorSource>,
    pub theta: &'a dyn ScalarSource,
}

struct Accumulators {
    f: [Vec<Complex64>; 3],
    g: Vec<Complex64>,
    w: Vec<Complex64>,
    th: Vec<Complex64>,
}

/// Integrands at one quadrature node.
struct Sample {
    f: Option<SpectralVector>,
    g: Option<SpectralScalar>,
    th: Option<SpectralScalar>,
}

fn sample(src: &Sources<'_>, terms: Terms, s: f64) -> Result<Sample> {
    let need_g = terms.e || terms.btilde;
    let need_u = terms.b || need_g;
    let u = if need_u { Some(src.u.vector_at(s)?) } else { None };
    let th = if need_g || terms.l { Some(src.theta.scalar_at(s)?) } else { None };
    let (f, g) = match (src.v, &u, &th) {
        (None, Some(u), Some(t)) if terms.b && need_g => {
            let nl = nonlinear(u, t);
            (Some(nl.f), Some(nl.g))
        }
        _ => {
            let f = if terms.b {
                let u = u.as_ref().unwrap();
                Some(match src.v {
                    Some(v) => tensor_divergence(u, &v.vector_at(s)?),
                    None => tensor_divergence(u, u),
                })
            } else {
                None
            };
            let g = if need_g { Some(scalar_flux_divergence(th.as_ref().unwrap(), u.as_ref().unwrap())) } else { None };
            (f, g)
        }
    };
    Ok(Sample { f, g, th: if terms.l { th } else { None } })
}

/// Accumulates the requested Duhamel terms at every time in `targets`
/// (strictly increasing, positive).
pub fn duhamel_sweep(src: &Sources<'_>, targets: &[f64], terms: Terms, quad: &TimeQuadrature) -> Result<Vec<Integrals>> {
    quad.validate()?;
    if targets.is_empty() {
        return Ok(Vec::new());
    }
    if targets[0] <= 0.0 || targets.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("Duhamel targets must be positive and increasing".into()));
    }
    let t_end = *targets.last().unwrap();
    let mut horizon = src.u.horizon().min(src.theta.horizon());
    if let Some(v) = src.v {
        horizon = horizon.min(v.horizon());
    }
    if t_end > horizon * (1.0 + 1e-14) {
        return Err(Error::InsufficientCoverage { start: 0.0, end: horizon, requested: t_end });
    }
    let grid = src.theta.scalar_at(0.0)?.grid().clone();
    let ksq = grid.ksq().to_vec();
    let len = grid.len();

    // breakpoints: targets plus source nodes below the last target
    let mut breaks: Vec<f64> = targets.to_vec();
    breaks.extend(src.u.nodes().into_iter().chain(src.theta.nodes()).filter(|&x| x > 0.0 && x < t_end));
    if let Some(v) = src.v {
        breaks.extend(v.nodes().into_iter().filter(|&x| x > 0.0 && x < t_end));
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * t_end);
    // keep targets exact after deduplication
    for t in targets {
        if let Some(x) = breaks.iter_mut().find(|x| (**x - t).abs() <= 1e-12 * t_end) {
            *x = *t;
        }
    }

    let zero = || vec![Complex64::new(0.0, 0.0); len];
    let mut acc = Accumulators { f: [zero(), zero(), zero()], g: zero(), w: zero(), th: zero() };
    let rule = GaussRule::new(quad.nodes);
    let mut out = Vec::with_capacity(targets.len());
    let mut next_target = 0;
    let mut tau = 0.0;
    for &tau1 in &breaks {
        let h = tau1 - tau;
        // propagate: W ← e^{hΔ}(W + h G), others ← e^{hΔ}·
        {
            let Accumulators { f, g, w, th } = &mut acc;
            w.par_iter_mut().zip(g.par_iter()).zip(ksq.par_iter()).for_each(|((w, g), k2)| {
                *w = (*w + g * h) * (-h * k2).exp();
            });
            for a in f.iter_mut().chain([g, th]) {
                a.par_iter_mut().zip(ksq.par_iter()).for_each(|(a, k2)| *a *= (-h * k2).exp());
            }
        }
        let panels = quad.panels(tau, tau1);
        for p in panels.windows(2) {
            for (s, wt) in rule.mapped(p[0], p[1]) {
                let smp = sample(src, terms, s)?;
                let lag = tau1 - s;
                let decay: Vec<f64> = ksq.par_iter().map(|k2| wt * (-lag * k2).exp()).collect();
                if let Some(f) = &smp.f {
                    for (a, c) in acc.f.iter_mut().zip(f.comps()) {
                        a.par_iter_mut().zip(c.coef().par_iter()).zip(decay.par_iter()).for_each(|((a, c), d)| *a += c * d);
                    }
                }
                if let Some(g) = &smp.g {
                    acc.g.par_iter_mut().zip(acc.w.par_iter_mut()).zip(g.coef().par_iter()).zip(decay.par_iter()).for_each(
                        |(((a, w), c), d)| {
                            *a += c * d;
                            *w += c * (d * lag);
                        },
                    );
                }
                if let Some(th) = &smp.th {
                    acc.th.par_iter_mut().zip(th.coef().par_iter()).zip(decay.par_iter()).for_each(|((a, c), d)| *a += c * d);
                }
            }
        }
        tau = tau1;
        if next_target < targets.len() && tau1 == targets[next_target] {
            out.push(finish(&grid, &acc, terms, tau1)?);
            next_target += 1;
        }
    }
    debug_assert_eq!(out.len(), targets.len());
    Ok(out)
}

fn finish(grid: &crate::spectral::Grid, acc: &Accumulators, terms: Terms, t: f64) -> Result<Integrals> {
    let scalar = |v: &Vec<Complex64>| SpectralScalar::from_coefficients(grid, v.clone());
    let b = if terms.b {
        let v = SpectralVector::new([scalar(&acc.f[0])?, scalar(&acc.f[1])?, scalar(&acc.f[2])?])?;
        Some(leray_project(&v))
    } else {
        None
    };
    let e = if terms.e { Some(leray_vertical(&scalar(&acc.w)?)) } else { None };
    let btilde = if terms.btilde { Some(scalar(&acc.g)?) } else { None };
    let l = if terms.l { Some(leray_vertical(&scalar(&acc.th)?)) } else { None };
    Ok(Integrals { t, b, e, btilde, l })
}

fn single<T>(v: Result<Vec<Integrals>>, pick: impl FnOnce(Integrals) -> Option<T>) -> Result<T> {
    let it = v?.pop().expect("one target");
    Ok(pick(it).expect("requested term"))
}

/// `B(u,v)(t) = −∫₀ᵗ e^{(t−s)Δ} ℙ ∇·(u⊗v)(s) ds`.
pub fn duhamel_b(u: &dyn VectorSource, v: &dyn VectorSource, t: f64, quad: &TimeQuadrature) -> Result<SpectralVector> {
    // the temperature slot is unused for B; a frozen zero field keeps the sweep generic
    let zero = SpectralScalar::zeros(u.vector_at(0.0)?.grid());
    let src = Sources { u, v: Some(v), theta: &zero };
    single(duhamel_sweep(&src, &[t], Terms { b: true, ..Default::default() }, quad), |i| i.b)
}

/// `L(θ)(t) = ∫₀ᵗ e^{(t−s)Δ} ℙ(θ(s) e₃) ds`.
pub fn duhamel_l(theta: &dyn ScalarSource, t: f64, quad: &TimeQuadrature) -> Result<SpectralVector> {
    let zero = SpectralVector::zeros(theta.scalar_at(0.0)?.grid());
    let src = Sources { u: &zero, v: None, theta };
    single(duhamel_sweep(&src, &[t], Terms { l: true, ..Default::default() }, quad), |i| i.l)
}

/// `E(u,θ)(t) = −∫₀ᵗ (t−s) e^{(t−s)Δ} ℙ((∇·(θu))(s) e₃) ds`.
pub fn duhamel_e(u: &dyn VectorSource, theta: &dyn ScalarSource, t: f64, quad: &TimeQuadrature) -> Result<SpectralVector> {
    let src = Sources { u, v: None, theta };
    single(duhamel_sweep(&src, &[t], Terms { e: true, ..Default::default() }, quad), |i| i.e)
}

/// `B̃(θ,u)(t) = −∫₀ᵗ e^{(t−s)Δ} ∇·(θu)(s) ds`.
pub fn duhamel_btilde(theta: &dyn ScalarSource, u: &dyn VectorSource, t: f64, quad: &TimeQuadrature) -> Result<SpectralScalar> {
    let src = Sources { u, v: None, theta };
    single(duhamel_sweep(&src, &[t], Terms { btilde: true, ..Default::default() }, quad), |i| i.btilde)
}
