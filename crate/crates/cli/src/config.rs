//! Experiment configuration, read from TOML. Unknown keys are rejected.

use std::f64::consts::PI;
use std::path::PathBuf;

use boussinesq::diagnostics::{moments, InterpolationFamily, Moments, NormSpec, ProfileVariant, Quantity};
use boussinesq::solver::{Formula, ThetaProfile, TimeQuadrature, VelocityProfile};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    LinearDecay,
    NonlinearDecay,
    WeightedDecay,
    FormulaEquivalence,
    ScalingInvariance,
    Profile,
    KernelValidation,
    InterpolationCheck,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::LinearDecay,
        ExperimentKind::NonlinearDecay,
        ExperimentKind::WeightedDecay,
        ExperimentKind::FormulaEquivalence,
        ExperimentKind::ScalingInvariance,
        ExperimentKind::Profile,
        ExperimentKind::KernelValidation,
        ExperimentKind::InterpolationCheck,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::LinearDecay => "linear-decay",
            ExperimentKind::NonlinearDecay => "nonlinear-decay",
            ExperimentKind::WeightedDecay => "weighted-decay",
            ExperimentKind::FormulaEquivalence => "formula-equivalence",
            ExperimentKind::ScalingInvariance => "scaling-invariance",
            ExperimentKind::Profile => "profile",
            ExperimentKind::KernelValidation => "kernel-validation",
            ExperimentKind::InterpolationCheck => "interpolation-check",
        }
    }

    pub fn summary(&self) -> &'static str {
        match self {
            ExperimentKind::LinearDecay => "heat flow of θ₀ on the grid against the closed form, L² slope fit",
            ExperimentKind::NonlinearDecay => "full solver run, slope fits of unweighted norms",
            ExperimentKind::WeightedDecay => "full solver run, slope fits of |x|^a ∇^b norms and the vorticity gap",
            ExperimentKind::FormulaEquivalence => "Picard solutions of both mild formulas, gap against quadrature error",
            ExperimentKind::ScalingInvariance => "run and its λ-rescaled copy, sup-norm identity",
            ExperimentKind::Profile => "far-field residuals against the asymptotic profiles",
            ExperimentKind::KernelValidation => "Oseen kernel: decomposition remainder and quadrature cross-check",
            ExperimentKind::InterpolationCheck => "gradient interpolation inequality on fractional heat flows",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub l: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 64, l: 40.0 * PI }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    #[serde(default = "default_theta")]
    pub theta: ThetaProfile,
    #[serde(default = "default_velocity")]
    pub velocity: VelocityProfile,
}

fn default_theta() -> ThetaProfile {
    ThetaProfile::Gaussian { mass: 1e-3, sigma: 0.5 }
}

fn default_velocity() -> VelocityProfile {
    VelocityProfile::Zero
}

impl Default for DataConfig {
    fn default() -> Self {
        Self { theta: default_theta(), velocity: default_velocity() }
    }
}

impl DataConfig {
    /// Length scale used to seed the moment integration.
    fn scale(&self) -> f64 {
        match self.theta {
            ThetaProfile::Gaussian { sigma, .. } | ThetaProfile::Dipole { sigma, .. } => sigma,
            _ => 1.0,
        }
    }

    /// Moments of the continuous θ₀.
    pub fn moments(&self) -> boussinesq::Result<Moments> {
        let theta = self.theta;
        moments(&move |x| theta.value(x), self.scale())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Stepper,
    Picard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_max: f64,
    /// Spacing of the stored states.
    #[serde(default = "one")]
    pub every: f64,
    /// Time step of the stepper.
    #[serde(default = "quarter")]
    pub dt: f64,
}

fn one() -> f64 {
    1.0
}

fn quarter() -> f64 {
    0.25
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self { t_max: 20.0, every: 1.0, dt: 0.25 }
    }
}

impl TimeConfig {
    /// `every, 2·every, …` up to and including `t_max`.
    pub fn samples(&self) -> Vec<f64> {
        let n = (self.t_max / self.every + 1e-9).floor() as usize;
        let mut out: Vec<f64> = (1..=n).map(|k| k as f64 * self.every).collect();
        if out.last().map_or(true, |&t| (t - self.t_max).abs() > 1e-9 * self.t_max) {
            out.push(self.t_max);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "stepper")]
    pub method: Method,
    #[serde(default = "new_b4")]
    pub formula: Formula,
    /// Picard convergence tolerance.
    #[serde(default = "picard_tol")]
    pub tolerance: f64,
    #[serde(default = "picard_iters")]
    pub max_iterations: usize,
    #[serde(default)]
    pub quadrature: TimeQuadrature,
    /// Picard time nodes on `[0, t_max]`; stored states follow `time.every` otherwise.
    #[serde(default)]
    pub nodes: Option<usize>,
}

fn stepper() -> Method {
    Method::Stepper
}

fn new_b4() -> Formula {
    Formula::NewB4
}

fn picard_tol() -> f64 {
    1e-10
}

fn picard_iters() -> usize {
    30
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: stepper(),
            formula: new_b4(),
            tolerance: picard_tol(),
            max_iterations: picard_iters(),
            quadrature: TimeQuadrature::default(),
            nodes: None,
        }
    }
}

/// One norm to fit, `‖|x|^a ∇^b q‖_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormEntry {
    pub quantity: Quantity,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: u32,
    /// `"inf"` or a number.
    pub p: PExponent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PExponent {
    Finite(f64),
    Named(Infinity),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Infinity {
    Inf,
}

impl PExponent {
    pub fn value(&self) -> f64 {
        match self {
            PExponent::Finite(p) => *p,
            PExponent::Named(_) => f64::INFINITY,
        }
    }
}

impl NormEntry {
    pub fn spec(&self) -> boussinesq::Result<NormSpec> {
        NormSpec::new(self.quantity, self.a, self.b, self.p.value())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    /// Defaults to `[1, min(20, L²/64)]`.
    #[serde(default)]
    pub window: Option<(f64, f64)>,
    /// Allowed excess of the fitted slope over the prediction. For
    /// `linear-decay` the deviation is two-sided. Defaults: 0.03 linear, 0.15 otherwise.
    #[serde(default)]
    pub slack: Option<f64>,
    /// Defaults: 0.98 for `nonlinear-decay`, not required otherwise.
    #[serde(default)]
    pub min_r2: Option<f64>,
    /// Required `slope(ω) ≤ slope(u) − gap` on the unweighted L² pair.
    #[serde(default = "vorticity_gap")]
    pub vorticity_gap: f64,
    /// Maximum relative grid-versus-closed-form gap for `linear-decay`;
    /// recorded only when absent.
    #[serde(default)]
    pub closed_form_tolerance: Option<f64>,
    /// Decay exponents `(γ, μ)` as exact fractions, e.g. `["1/4", "5/4"]`.
    /// Defaults follow the mean of θ₀.
    #[serde(default)]
    pub assumptions: Option<(String, String)>,
    #[serde(default)]
    pub norms: Vec<NormEntry>,
}

fn vorticity_gap() -> f64 {
    0.35
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            window: None,
            slack: None,
            min_r2: None,
            vorticity_gap: vorticity_gap(),
            closed_form_tolerance: None,
            assumptions: None,
            norms: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub t: f64,
    #[serde(default = "kappas")]
    pub kappas: Vec<f64>,
    #[serde(default = "variants")]
    pub variants: Vec<ProfileVariant>,
    /// Required decrease of the ratio between consecutive κ values.
    #[serde(default = "unit")]
    pub min_factor: f64,
}

fn kappas() -> Vec<f64> {
    vec![2.0, 4.0, 8.0]
}

fn variants() -> Vec<ProfileVariant> {
    vec![ProfileVariant::R1]
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivalenceConfig {
    /// Picard time nodes on `[0, t_max]`.
    #[serde(default = "ten")]
    pub nodes: usize,
    /// Allowed gap in units of the quadrature error estimate.
    #[serde(default = "five")]
    pub gap_factor: f64,
    /// Required shrink of the gap under panel refinement.
    #[serde(default = "three")]
    pub shrink: f64,
}

fn ten() -> usize {
    10
}

fn five() -> f64 {
    5.0
}

fn three() -> f64 {
    3.0
}

impl Default for EquivalenceConfig {
    fn default() -> Self {
        Self { nodes: ten(), gap_factor: five(), shrink: three() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    #[serde(default = "two")]
    pub lambda: f64,
    /// Times `t` of the identity `‖u_λ(t)‖_∞ = λ‖u(λ²t)‖_∞`.
    #[serde(default = "scaling_times")]
    pub times: Vec<f64>,
    #[serde(default = "milli")]
    pub tolerance: f64,
    /// Modes per axis of the scaled run; the base resolution when absent.
    #[serde(default)]
    pub n: Option<usize>,
}

fn two() -> f64 {
    2.0
}

fn scaling_times() -> Vec<f64> {
    vec![0.25, 0.5]
}

fn milli() -> f64 {
    1e-3
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self { lambda: two(), times: scaling_times(), tolerance: milli(), n: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    #[serde(default = "kernel_t")]
    pub t: f64,
    /// Radii of the decomposition remainder check.
    #[serde(default = "kernel_radii")]
    pub radii: Vec<f64>,
    /// Relative agreement of the two evaluation paths.
    #[serde(default = "micro")]
    pub tolerance: f64,
}

fn kernel_t() -> f64 {
    1.0
}

fn kernel_radii() -> Vec<f64> {
    vec![2.0, 3.0, 4.0, 6.0, 8.0]
}

fn micro() -> f64 {
    1e-6
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self { t: kernel_t(), radii: kernel_radii(), tolerance: micro() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpolationConfig {
    pub alpha: f64,
    pub p: PExponent,
    pub family: InterpolationFamily,
    pub times: Vec<f64>,
}

impl Default for InterpolationConfig {
    fn default() -> Self {
        Self {
            alpha: 0.75,
            p: PExponent::Named(Infinity::Inf),
            family: InterpolationFamily::FracHeatGaussian { sigma: 1.0 },
            times: vec![1.0, 2.0, 5.0, 10.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub output: PathBuf,
    /// Recorded in the manifest; every experiment is deterministic.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub fit: FitConfig,
    #[serde(default)]
    pub profile: Option<ProfileConfig>,
    #[serde(default)]
    pub equivalence: EquivalenceConfig,
    #[serde(default)]
    pub scaling: ScalingConfig,
    #[serde(default)]
    pub kernel: KernelConfig,
    #[serde(default)]
    pub interpolation: InterpolationConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: ExperimentKind::NonlinearDecay,
            output: PathBuf::from("runs/default"),
            seed: 0,
            grid: GridConfig::default(),
            data: DataConfig::default(),
            time: TimeConfig::default(),
            solver: SolverConfig::default(),
            fit: FitConfig::default(),
            profile: None,
            equivalence: EquivalenceConfig::default(),
            scaling: ScalingConfig::default(),
            kernel: KernelConfig::default(),
            interpolation: InterpolationConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    /// Longest horizon allowed on the configured box.
    pub fn horizon(&self) -> f64 {
        self.grid.l * self.grid.l / 64.0
    }

    pub fn fit_window(&self) -> (f64, f64) {
        self.fit.window.unwrap_or((1.0, self.time.t_max.min(20.0).min(self.horizon())))
    }

    /// Every violated constraint, in a fixed order. Empty iff a run would start.
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        let g = &self.grid;
        if !(g.n >= 4 && g.n.is_power_of_two()) {
            v.push(format!("grid.n = {} is not a power of two ≥ 4", g.n));
        }
        if !(g.l > 0.0 && g.l.is_finite()) {
            v.push(format!("grid.l = {} must be positive", g.l));
        }
        let t = &self.time;
        if !(t.t_max > 0.0 && t.every > 0.0 && t.dt > 0.0) {
            v.push("time.t_max, time.every and time.dt must be positive".into());
        }
        if self.uses_solver() && t.t_max > self.horizon() {
            v.push(format!(
                "box-horizon rule violated: time.t_max = {} exceeds L²/64 = {}",
                t.t_max,
                self.horizon()
            ));
        }
        if let Some(e) = data_error(&self.data) {
            v.push(e);
        }
        if matches!(self.kind, ExperimentKind::NonlinearDecay | ExperimentKind::WeightedDecay | ExperimentKind::LinearDecay) {
            let (a, b) = self.fit_window();
            if !(a > 0.0 && b > a && (b / a).log10() >= boussinesq::diagnostics::MIN_DECADES - 1e-12) {
                v.push(format!("fit window [{a}, {b}] must span at least half a decade"));
            } else if b > t.t_max + 1e-12 {
                v.push(format!("fit window end {b} exceeds time.t_max = {}", t.t_max));
            }
            if let Some((gamma, mu)) = &self.fit.assumptions {
                for s in [gamma, mu] {
                    if parse_fraction(s).is_none() {
                        v.push(format!("fit.assumptions entry {s:?} is not a fraction"));
                    }
                }
            }
            for n in &self.fit.norms {
                if let Err(e) = n.spec() {
                    v.push(format!("fit.norms: {e}"));
                }
            }
        }
        if self.kind == ExperimentKind::Profile {
            match &self.profile {
                None => v.push("profile experiment needs a [profile] table".into()),
                Some(p) => {
                    if !(p.t > 0.0 && p.t <= t.t_max) {
                        v.push(format!("profile.t = {} must lie in (0, time.t_max]", p.t));
                    }
                    if p.kappas.is_empty() || p.kappas.iter().any(|k| !(*k > 0.0)) {
                        v.push("profile.kappas must be positive".into());
                    }
                    let zero_mean = p.variants.iter().any(|v| v.order() == 4);
                    if zero_mean {
                        match self.data.moments() {
                            Ok(m) => {
                                let m1 = m.m1.iter().map(|x| x * x).sum::<f64>().sqrt();
                                if m.m0.abs() > 1e-10 * m1.max(f64::MIN_POSITIVE) {
                                    v.push(format!(
                                        "moment precondition: zero-mean profile variant requested but m₀ = {:e}",
                                        m.m0
                                    ));
                                }
                            }
                            Err(e) => v.push(format!("moment precondition: {e}")),
                        }
                    }
                }
            }
        }
        if self.kind == ExperimentKind::FormulaEquivalence && self.equivalence.nodes == 0 {
            v.push("equivalence.nodes must be positive".into());
        }
        if let Err(e) = self.solver.quadrature.validate() {
            v.push(format!("solver.quadrature: {e}"));
        }
        if self.solver.nodes == Some(0) {
            v.push("solver.nodes must be positive".into());
        }
        if self.kind == ExperimentKind::ScalingInvariance {
            let s = &self.scaling;
            if let Some(n) = s.n {
                if !(n >= 4 && n.is_power_of_two()) {
                    v.push(format!("scaling.n = {n} is not a power of two ≥ 4"));
                }
            }
            if !(s.lambda > 0.0) {
                v.push(format!("scaling.lambda = {} must be positive", s.lambda));
            }
            if let Some(&last) = s.times.iter().reduce(|a, b| if a > b { a } else { b }) {
                if s.lambda * s.lambda * last > t.t_max + 1e-12 {
                    v.push(format!("scaling.times need λ²t ≤ time.t_max, got {}", s.lambda * s.lambda * last));
                }
            }
        }
        if self.kind == ExperimentKind::InterpolationCheck {
            let i = &self.interpolation;
            if !(i.alpha > 0.5) {
                v.push(format!("interpolation.alpha = {} must exceed 1/2", i.alpha));
            }
            if !(i.p.value() >= 1.0) {
                v.push("interpolation.p must lie in [1, inf]".into());
            }
            if i.times.is_empty() || i.times.iter().any(|t| !(*t > 0.0)) {
                v.push("interpolation.times must be positive".into());
            }
        }
        v
    }

    fn uses_solver(&self) -> bool {
        !matches!(self.kind, ExperimentKind::KernelValidation | ExperimentKind::InterpolationCheck)
    }
}

fn data_error(d: &DataConfig) -> Option<String> {
    let bad = |s: f64| !(s > 0.0 && s.is_finite());
    match d.theta {
        ThetaProfile::Gaussian { sigma, .. } | ThetaProfile::Dipole { sigma, .. } if bad(sigma) => {
            return Some(format!("data.theta.sigma = {sigma} must be positive"))
        }
        _ => {}
    }
    if let VelocityProfile::Vortex { sigma, .. } = d.velocity {
        if bad(sigma) {
            return Some(format!("data.velocity.sigma = {sigma} must be positive"));
        }
    }
    None
}

/// Parses `"p/q"` or a plain integer.
pub fn parse_fraction(s: &str) -> Option<num_rational::Rational64> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let (n, d) = (n.trim().parse::<i64>().ok()?, d.trim().parse::<i64>().ok()?);
            (d != 0).then(|| num_rational::Rational64::new(n, d))
        }
        None => s.parse::<i64>().ok().map(num_rational::Rational64::from_integer),
    }
}
