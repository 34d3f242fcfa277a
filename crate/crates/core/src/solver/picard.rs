use serde::{Deserialize, Serialize};

use super::duhamel::{duhamel_sweep, Sources, Temperature, Terms, TimeQuadrature, Velocity};
use super::state::State;
use super::trajectory::{Provenance, Trajectory};
use crate::diagnostics::{x_norm, y_norm};
use crate::error::{Error, Result};
use crate::spectral::{SpectralScalar, SpectralVector};

/// Consecutive non-contracting iterations that abort the iteration.
const NON_CONTRACTING_LIMIT: usize = 3;

/// Mild formulation iterated by [`picard_solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formula {
    /// `u = e^{tΔ}u₀ + t e^{tΔ}ℙ(θ₀e₃) + B(u,u) + E(u,θ)`, `θ = e^{tΔ}θ₀ + B̃(θ,u)`.
    NewB4,
    /// `u = e^{tΔ}u₀ + B(u,u) + L(θ)`, `θ = e^{tΔ}θ₀ + B̃(θ,u)`.
    Classical,
}

impl Formula {
    pub fn name(&self) -> &'static str {
        match self {
            Formula::NewB4 => "new-b4",
            Formula::Classical => "classical",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardConfig {
    pub formula: Formula,
    /// `0 = t₀ < t₁ < … < t_M`.
    pub times: Vec<f64>,
    pub quadrature: TimeQuadrature,
    /// Relative 𝒳 + 𝒴 change below which the iteration stops.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// When false the quadratic terms are dropped.
    pub nonlinear: bool,
}

impl PicardConfig {
    /// Uniform time grid on `[0, t_max]` with `m` intervals.
    pub fn uniform(formula: Formula, t_max: f64, m: usize) -> Self {
        Self {
            formula,
            times: (0..=m).map(|k| t_max * k as f64 / m as f64).collect(),
            quadrature: TimeQuadrature::default(),
            tolerance: 1e-10,
            max_iterations: 30,
            nonlinear: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        if self.times.len() < 2 || self.times[0] != 0.0 || self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("Picard time grid must start at 0 and increase".into()));
        }
        if !(self.tolerance > 0.0) || self.max_iterations == 0 {
            return Err(Error::InvalidArgument("Picard tolerance and iteration cap must be positive".into()));
        }
        Ok(())
    }
}

/// Convergence history of a Picard solve.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PicardReport {
    pub iterations: usize,
    /// Relative 𝒳 + 𝒴 change per iteration.
    pub differences: Vec<f64>,
    /// Ratios of successive differences.
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct PicardOutcome {
    pub trajectory: Trajectory,
    pub report: PicardReport,
}

fn trajectory_norms(u: &[SpectralVector], th: &[SpectralScalar], times: &[f64]) -> f64 {
    let mut x = 0.0f64;
    let mut y = 0.0f64;
    for ((u, th), &t) in u.iter().zip(th).zip(times) {
        x = x.max(x_norm(u, t).value);
        y = y.max(y_norm(th, t).value);
    }
    x + y
}

/// Fixed point of the chosen mild formulation on the configured time grid.
///
/// The first iterate is the linear evolution `(U, Θ)`. Successive iterates are
/// compared in the discrete 𝒳 and 𝒴 norms over all time nodes; three
/// consecutive non-contracting steps abort with [`Error::NonContraction`].
pub fn picard_solve(u0: &SpectralVector, theta0: &SpectralScalar, cfg: &PicardConfig) -> Result<PicardOutcome> {
    cfg.validate()?;
    let init = State::new(0.0, u0.clone(), theta0.clone())?;
    if !init.is_divergence_free() {
        return Err(Error::Precondition("initial velocity is not divergence-free".into()));
    }
    let provenance = Provenance { method: format!("picard-{}", cfg.formula.name()), config_hash: String::new() };
    let lin = Trajectory::new(vec![init.clone()], provenance.clone())?;
    let times = &cfg.times;
    let targets = &times[1..];
    let base_u: Vec<SpectralVector> = targets
        .iter()
        .map(|&t| match cfg.formula {
            Formula::NewB4 => lin.linear_velocity(t),
            Formula::Classical => u0.heat(t),
        })
        .collect();
    let base_th: Vec<SpectralScalar> = targets.iter().map(|&t| lin.linear_temperature(t)).collect();

    let build = |u: Vec<SpectralVector>, th: Vec<SpectralScalar>| -> Result<Trajectory> {
        let mut states = vec![init.clone()];
        for ((u, th), &t) in u.into_iter().zip(th).zip(targets) {
            states.push(State::new(t, u, th)?);
        }
        Trajectory::new(states, provenance.clone())
    };
    let lin_u: Vec<SpectralVector> = targets.iter().map(|&t| lin.linear_velocity(t)).collect();
    let mut cur_u = lin_u;
    let mut cur_th = base_th.clone();
    let mut traj = build(cur_u.clone(), cur_th.clone())?;
    let terms = match (cfg.formula, cfg.nonlinear) {
        (Formula::NewB4, true) => Terms { b: true, e: true, btilde: true, l: false },
        (Formula::NewB4, false) => Terms::default(),
        (Formula::Classical, true) => Terms { b: true, e: false, btilde: true, l: true },
        (Formula::Classical, false) => Terms { l: true, ..Default::default() },
    };
    let mut report = PicardReport::default();
    let mut streak = 0;
    for it in 1..=cfg.max_iterations {
        let ints = if terms == Terms::default() {
            Vec::new()
        } else {
            let vel = Velocity(&traj);
            let tem = Temperature(&traj);
            duhamel_sweep(&Sources { u: &vel, v: None, theta: &tem }, targets, terms, &cfg.quadrature)?
        };
        let mut new_u = base_u.clone();
        let mut new_th = base_th.clone();
        for (k, int) in ints.iter().enumerate() {
            for part in [&int.b, &int.e, &int.l].into_iter().flatten() {
                new_u[k].axpy(1.0, part);
            }
            if let Some(bt) = &int.btilde {
                new_th[k].axpy(1.0, bt);
            }
        }
        let du: Vec<SpectralVector> = new_u.iter().zip(&cur_u).map(|(a, b)| a.sub(b)).collect();
        let dth: Vec<SpectralScalar> = new_th.iter().zip(&cur_th).map(|(a, b)| a.sub(b)).collect();
        let diff = trajectory_norms(&du, &dth, targets);
        let size = trajectory_norms(&new_u, &new_th, targets);
        let rel = if size == 0.0 { diff } else { diff / size };
        if !rel.is_finite() {
            return Err(Error::NonFinite { t: *targets.last().unwrap() });
        }
        if let Some(&prev) = report.differences.last() {
            let ratio = if prev == 0.0 { 0.0 } else { rel / prev };
            report.ratios.push(ratio);
            streak = if ratio >= 1.0 { streak + 1 } else { 0 };
        }
        report.differences.push(rel);
        report.iterations = it;
        cur_u = new_u;
        cur_th = new_th;
        traj = build(cur_u.clone(), cur_th.clone())?;
        if rel < cfg.tolerance {
            return Ok(PicardOutcome { trajectory: traj, report });
        }
        if streak >= NON_CONTRACTING_LIMIT {
            return Err(Error::NonContraction { iterations: it, ratios: report.ratios.clone() });
        }
    }
    Err(Error::IterationLimit {
        iterations: cfg.max_iterations,
        tolerance: cfg.tolerance,
        last: *report.differences.last().unwrap(),
    })
}
