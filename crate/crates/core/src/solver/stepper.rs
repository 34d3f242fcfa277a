use serde::{Deserialize, Serialize};

use super::state::State;
use super::trajectory::{Provenance, Trajectory};
use crate::error::{Error, Result};
use crate::spectral::{leray_project, leray_vertical, nonlinear, SpectralScalar, SpectralVector};

/// Integrating-factor RK2 settings.
///
/// The diffusion is integrated exactly, so the only step restriction comes
/// from advection: keep `dt · max|u| / dx` well below one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepperConfig {
    pub dt: f64,
    pub t_max: f64,
    /// Times at which states are stored, in addition to `0` and `t_max`.
    #[serde(default)]
    pub output_times: Vec<f64>,
    #[serde(default = "yes")]
    pub nonlinear: bool,
    #[serde(default = "yes")]
    pub buoyancy: bool,
}

fn yes() -> bool {
    true
}

impl StepperConfig {
    pub fn new(dt: f64, t_max: f64) -> Self {
        Self { dt, t_max, output_times: Vec::new(), nonlinear: true, buoyancy: true }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.t_max > 0.0 && self.dt.is_finite() && self.t_max.is_finite()) {
            return Err(Error::InvalidArgument("time step and horizon must be positive".into()));
        }
        Ok(())
    }

    /// Sorted output times in `(0, t_max]`, always ending with `t_max`.
    pub fn outputs(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.output_times.iter().copied().filter(|&t| t > 0.0 && t < self.t_max).collect();
        out.push(self.t_max);
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup();
        out
    }
}

/// Single-step driver; keeps the last good state when a step fails.
#[derive(Debug, Clone)]
pub struct Stepper {
    state: State,
    nonlinear: bool,
    buoyancy: bool,
}

impl Stepper {
    pub fn new(initial: State, nonlinear: bool, buoyancy: bool) -> Self {
        Self { state: initial, nonlinear, buoyancy }
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    fn rhs(&self, u: &SpectralVector, th: &SpectralScalar) -> (SpectralVector, SpectralScalar) {
        let mut du = SpectralVector::zeros(u.grid());
        let mut dth = SpectralScalar::zeros(u.grid());
        if self.nonlinear {
            let nl = nonlinear(u, th);
            du = leray_project(&nl.f);
            dth = nl.g;
        }
        if self.buoyancy {
            du.axpy(1.0, &leray_vertical(th));
        }
        (du, dth)
    }

    /// Heun's method in the integrating-factor frame:
    /// `y* = E(y + dt k₁)`, `y' = E y + dt/2 (E k₁ + k₂)` with `E = e^{dtΔ}`.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        let State { t, u, theta } = &self.state;
        let (k1u, k1t) = self.rhs(u, theta);
        let mut su = u.clone();
        su.axpy(dt, &k1u);
        let mut st = theta.clone();
        st.axpy(dt, &k1t);
        let (su, st) = (su.heat(dt), st.heat(dt));
        let (k2u, k2t) = self.rhs(&su, &st);
        let mut nu = u.add(&k1u.scale(0.5 * dt)).heat(dt);
        nu.axpy(0.5 * dt, &k2u);
        let mut nt = theta.add(&k1t.scale(0.5 * dt)).heat(dt);
        nt.axpy(0.5 * dt, &k2t);
        let next = State { t: t + dt, u: nu, theta: nt };
        if !next.is_finite() {
            return Err(Error::NonFinite { t: *t });
        }
        self.state = next;
        Ok(())
    }
}

/// Integrates from `(u₀, θ₀)` with the integrating-factor RK2 scheme and stores
/// states at `0`, the requested output times and `t_max`. Each interval between
/// outputs is split into equal steps no longer than `dt`.
pub fn timestep_solve(u0: &SpectralVector, theta0: &SpectralScalar, cfg: &StepperConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let init = State::new(0.0, u0.clone(), theta0.clone())?;
    let mut stepper = Stepper::new(init.clone(), cfg.nonlinear, cfg.buoyancy);
    let mut states = vec![init];
    let mut t = 0.0;
    for target in cfg.outputs() {
        let n = ((target - t) / cfg.dt - 1e-9).ceil().max(1.0) as usize;
        let h = (target - t) / n as f64;
        for _ in 0..n {
            stepper.step(h)?;
        }
        let mut s = stepper.state().clone();
        s.t = target;
        stepper.state.t = target;
        states.push(s);
        t = target;
    }
    Trajectory::new(states, Provenance { method: "timestep-ifrk2".into(), config_hash: String::new() })
}
