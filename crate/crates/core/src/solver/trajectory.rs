use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::state::State;
use crate::error::{Error, Result};
use crate::spectral::{leray_vertical, Grid, Snapshot, SpectralScalar, SpectralVector};

/// Largest exponent used when propagating a remainder backwards in time.
const MAX_BACKWARD_EXPONENT: f64 = 30.0;

/// How a trajectory was produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Provenance {
    pub method: String,
    pub config_hash: String,
}

/// States at strictly increasing times starting at `t = 0`.
///
/// Between stored nodes the solution is reconstructed as the exact linear
/// evolution `(e^{sΔ}u₀ + s e^{sΔ}ℙ(θ₀e₃), e^{sΔ}θ₀)` plus a remainder that is
/// interpolated linearly in the integrating-factor frame, i.e. per mode
/// `r(s) = (1−λ) e^{-(s−t_k)|ξ|²} r_k + λ e^{(t_{k+1}−s)|ξ|²} r_{k+1}`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    states: Vec<State>,
    p_theta0: SpectralVector,
    rem_u: Vec<SpectralVector>,
    rem_theta: Vec<SpectralScalar>,
    pub provenance: Provenance,
}

impl Trajectory {
    pub fn new(states: Vec<State>, provenance: Provenance) -> Result<Self> {
        let first = states.first().ok_or_else(|| Error::InvalidArgument("empty trajectory".into()))?;
        if first.t != 0.0 {
            return Err(Error::InvalidArgument("trajectory must start at t = 0".into()));
        }
        if states.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::InvalidArgument("trajectory times must increase strictly".into()));
        }
        let grid = first.grid().clone();
        if states.iter().any(|s| *s.grid() != grid) {
            return Err(Error::InvalidArgument("trajectory states live on different grids".into()));
        }
        let p_theta0 = leray_vertical(&first.theta);
        let mut traj = Self { states, p_theta0, rem_u: Vec::new(), rem_theta: Vec::new(), provenance };
        let (ru, rt): (Vec<_>, Vec<_>) = traj
            .states
            .iter()
            .map(|s| (s.u.sub(&traj.linear_velocity(s.t)), s.theta.sub(&traj.linear_temperature(s.t))))
            .unzip();
        traj.rem_u = ru;
        traj.rem_theta = rt;
        Ok(traj)
    }

    pub fn grid(&self) -> &Grid {
        self.states[0].grid()
    }

    pub fn initial(&self) -> &State {
        &self.states[0]
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn last(&self) -> &State {
        self.states.last().unwrap()
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn horizon(&self) -> f64 {
        self.last().t
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `e^{sΔ}u₀ + s e^{sΔ}ℙ(θ₀e₃)`.
    pub fn linear_velocity(&self, s: f64) -> SpectralVector {
        let mut v = self.states[0].u.heat(s);
        v.axpy(s, &self.p_theta0.heat(s));
        v
    }

    /// `e^{sΔ}θ₀`.
    pub fn linear_temperature(&self, s: f64) -> SpectralScalar {
        self.states[0].theta.heat(s)
    }

    fn locate(&self, s: f64) -> Result<(usize, f64)> {
        let h = self.horizon();
        if !(s >= 0.0) || s > h * (1.0 + 1e-14) {
            return Err(Error::InsufficientCoverage { start: 0.0, end: h, requested: s });
        }
        let k = match self.states.binary_search_by(|st| st.t.partial_cmp(&s).unwrap()) {
            Ok(k) => return Ok((k, 0.0)),
            Err(k) => k,
        };
        if k >= self.states.len() {
            return Ok((self.states.len() - 1, 0.0));
        }
        let (a, b) = (self.states[k - 1].t, self.states[k].t);
        Ok((k - 1, (s - a) / (b - a)))
    }

    fn weights(&self, k: usize, lam: f64, s: f64, idx_ksq: f64) -> (f64, f64) {
        let a = self.states[k].t;
        let b = self.states[k + 1].t;
        let fwd = (-(s - a) * idx_ksq).exp();
        let back = ((b - s) * idx_ksq).min(MAX_BACKWARD_EXPONENT).exp();
        ((1.0 - lam) * fwd, lam * back)
    }

    pub fn velocity_at(&self, s: f64) -> Result<SpectralVector> {
        let (k, lam) = self.locate(s)?;
        if lam == 0.0 {
            return Ok(self.states[k].u.clone());
        }
        let ksq = self.grid().ksq();
        let (r0, r1) = (&self.rem_u[k], &self.rem_u[k + 1]);
        let rem = r0.map_modes(|i, c0| {
            let (w0, w1) = self.weights(k, lam, s, ksq[i]);
            let c1 = [r1.comp(0).coef()[i], r1.comp(1).coef()[i], r1.comp(2).coef()[i]];
            [c0[0] * w0 + c1[0] * w1, c0[1] * w0 + c1[1] * w1, c0[2] * w0 + c1[2] * w1]
        });
        Ok(self.linear_velocity(s).add(&rem))
    }

    pub fn temperature_at(&self, s: f64) -> Result<SpectralScalar> {
        let (k, lam) = self.locate(s)?;
        if lam == 0.0 {
            return Ok(self.states[k].theta.clone());
        }
        let ksq = self.grid().ksq();
        let (r0, r1) = (&self.rem_theta[k], &self.rem_theta[k + 1]);
        let rem = r0.map_modes(|i, c0| {
            let (w0, w1) = self.weights(k, lam, s, ksq[i]);
            c0 * w0 + r1.coef()[i] * w1
        });
        Ok(self.linear_temperature(s).add(&rem))
    }

    pub fn state_at(&self, s: f64) -> Result<State> {
        State::new(s, self.velocity_at(s)?, self.temperature_at(s)?)
    }

    /// Writes one snapshot per quantity and node plus `index.json`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut nodes = Vec::with_capacity(self.states.len());
        for (k, s) in self.states.iter().enumerate() {
            let uf = format!("u_{k:04}.bin");
            let tf = format!("theta_{k:04}.bin");
            Snapshot::from_vector(&s.u).save(&dir.join(&uf))?;
            Snapshot::from_scalar(&s.theta).save(&dir.join(&tf))?;
            nodes.push(IndexNode { t: s.t, u: uf, theta: tf });
        }
        let index = Index { n: self.grid().n(), l: self.grid().l(), provenance: self.provenance.clone(), nodes };
        let text = serde_json::to_string_pretty(&index).map_err(|e| Error::Format(e.to_string()))?;
        fs::write(dir.join("index.json"), text)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let text = fs::read_to_string(dir.join("index.json"))?;
        let index: Index = serde_json::from_str(&text).map_err(|e| Error::Format(e.to_string()))?;
        let mut states = Vec::with_capacity(index.nodes.len());
        for node in &index.nodes {
            let u = Snapshot::load(&dir.join(&node.u))?;
            let th = Snapshot::load(&dir.join(&node.theta))?;
            if u.n != index.n || th.n != index.n || u.l != index.l || th.l != index.l {
                return Err(Error::Format("snapshot grid does not match the index".into()));
            }
            states.push(State::new(node.t, u.to_vector()?, th.to_scalar()?)?);
        }
        Self::new(states, index.provenance)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Index {
    n: usize,
    l: f64,
    provenance: Provenance,
    nodes: Vec<IndexNode>,
}

#[derive(Debug, Serialize, Deserialize)]
struct IndexNode {
    t: f64,
    u: String,
    theta: String,
}
