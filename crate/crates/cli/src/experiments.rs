//! Experiment drivers. Each returns its measurements and a pass/fail report.

use std::f64::consts::PI;

use boussinesq::diagnostics::{
    fit_decay_exponent, interpolation_check, predicted_exponent, profile_residual, weighted_norm, DecayAssumptions,
    DecaySeries, NormSpec, Quantity,
};
use boussinesq::kernels::{mat_norm, OseenKernel};
use boussinesq::solver::{
    picard_solve, scaling_transform, timestep_solve, Formula, PicardConfig, State, StepperConfig, ThetaProfile,
    TimeQuadrature, Trajectory,
};
use boussinesq::spectral::{Grid, SpectralScalar, SpectralVector};
use num_rational::Rational64;

use crate::config::{parse_fraction, ExperimentConfig, ExperimentKind, Method, NormEntry, PExponent};
use crate::output::{CheckRecord, FitRecord, Measurement, Report};

pub type Outcome = (Vec<Measurement>, Report);

pub fn run_experiment(cfg: &ExperimentConfig) -> boussinesq::Result<Outcome> {
    match cfg.kind {
        ExperimentKind::LinearDecay => linear_decay(cfg),
        ExperimentKind::NonlinearDecay | ExperimentKind::WeightedDecay => decay(cfg),
        ExperimentKind::FormulaEquivalence => formula_equivalence(cfg),
        ExperimentKind::ScalingInvariance => scaling_invariance(cfg),
        ExperimentKind::Profile => profile(cfg),
        ExperimentKind::KernelValidation => kernel_validation(cfg),
        ExperimentKind::InterpolationCheck => interpolation(cfg),
    }
}

fn initial_data(cfg: &ExperimentConfig) -> boussinesq::Result<(SpectralVector, SpectralScalar)> {
    let grid = Grid::new(cfg.grid.n, cfg.grid.l)?;
    Ok((cfg.data.velocity.build(&grid)?, cfg.data.theta.build(&grid)?))
}

/// Solves with the configured method, storing states at `samples` (plus any `extra` times).
pub fn solve(cfg: &ExperimentConfig, extra: &[f64]) -> boussinesq::Result<Trajectory> {
    let (u0, th0) = initial_data(cfg)?;
    let mut outputs = cfg.time.samples();
    outputs.extend_from_slice(extra);
    outputs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    outputs.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    match cfg.solver.method {
        Method::Stepper => {
            let mut sc = StepperConfig::new(cfg.time.dt, cfg.time.t_max);
            sc.output_times = outputs;
            timestep_solve(&u0, &th0, &sc)
        }
        Method::Picard => {
            let mut times = vec![0.0];
            match cfg.solver.nodes {
                Some(m) => {
                    let mut t: Vec<f64> = (1..=m).map(|k| cfg.time.t_max * k as f64 / m as f64).collect();
                    t.extend(outputs);
                    t.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    t.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
                    times.extend(t);
                }
                None => times.extend(outputs),
            }
            let pc = picard_config(cfg, cfg.solver.formula, times, cfg.solver.quadrature);
            Ok(picard_solve(&u0, &th0, &pc)?.trajectory)
        }
    }
}

fn picard_config(cfg: &ExperimentConfig, formula: Formula, times: Vec<f64>, quadrature: TimeQuadrature) -> PicardConfig {
    PicardConfig {
        formula,
        times,
        quadrature,
        tolerance: cfg.solver.tolerance,
        max_iterations: cfg.solver.max_iterations,
        nonlinear: true,
    }
}

fn spec_label(spec: &NormSpec) -> String {
    let p = if spec.p.is_infinite() { "inf".to_string() } else { format!("{}", spec.p) };
    format!("{}:a={}:b={}:p={}", spec.quantity.name(), spec.a, spec.b, p)
}

/// `(γ, μ)` from the config, or from the mean of θ₀: `(−1/4, 3/4)` when
/// `m₀ ≠ 0` and `(1/4, 5/4)` when `m₀ = 0`.
fn assumptions(cfg: &ExperimentConfig) -> boussinesq::Result<DecayAssumptions> {
    if let Some((g, m)) = &cfg.fit.assumptions {
        let bad = |s: &str| boussinesq::Error::InvalidArgument(format!("{s:?} is not a fraction"));
        let gamma = parse_fraction(g).ok_or_else(|| bad(g))?;
        let mu = parse_fraction(m).ok_or_else(|| bad(m))?;
        return DecayAssumptions::new(gamma, mu, false);
    }
    let zero_mean = match cfg.data.moments() {
        Ok(m) => m.m0.abs() <= 1e-10 * (m.m0.abs() + m.m1.iter().map(|v| v.abs()).sum::<f64>()),
        Err(_) => false,
    };
    if zero_mean {
        Ok(DecayAssumptions::default())
    } else {
        DecayAssumptions::new(Rational64::new(-1, 4), Rational64::new(3, 4), true)
    }
}

fn default_norms(kind: ExperimentKind) -> Vec<NormEntry> {
    let e = |quantity, a, b, p| NormEntry { quantity, a, b, p };
    match kind {
        ExperimentKind::WeightedDecay => {
            let mut v = Vec::new();
            for q in [Quantity::U, Quantity::Theta, Quantity::Omega] {
                for (a, b) in [(0.0, 0), (1.0, 0), (0.0, 1), (2.0, 1)] {
                    v.push(e(q, a, b, PExponent::Finite(2.0)));
                }
            }
            v
        }
        _ => vec![
            e(Quantity::Theta, 0.0, 0, PExponent::Finite(2.0)),
            e(Quantity::U, 0.0, 0, PExponent::Named(crate::config::Infinity::Inf)),
        ],
    }
}

/// Unweighted L² norm of a linear temperature under the heat flow, closed form.
fn heat_l2_closed_form(theta: &ThetaProfile, t: f64) -> Option<f64> {
    match *theta {
        ThetaProfile::Gaussian { mass, sigma } => {
            let v = sigma * sigma + 2.0 * t;
            Some(mass.abs() * (4.0 * PI * v).powf(-0.75))
        }
        ThetaProfile::Dipole { mass, sigma } => {
            let v = sigma * sigma + 2.0 * t;
            Some(mass.abs() * (4.0 * PI * v).powf(-0.75) * (2.0 * v).powf(-0.5))
        }
        _ => None,
    }
}

fn linear_decay(cfg: &ExperimentConfig) -> boussinesq::Result<Outcome> {
    let (_, th0) = initial_data(cfg)?;
    let window = cfg.fit_window();
    let mut rows = Vec::new();
    let mut points = Vec::new();
    let mut worst_gap = 0.0f64;
    for t in cfg.time.samples() {
        let value = th0.heat(t).l2_norm();
        rows.push(Measurement { t, quantity: "theta".into(), a: 0.0, b: 0, p: 2.0, value, flag: "ok" });
        points.push((t, value));
        if let Some(exact) = heat_l2_closed_form(&cfg.data.theta, t) {
            rows.push(Measurement { t, quantity: "theta-exact".into(), a: 0.0, b: 0, p: 2.0, value: exact, flag: "ok" });
            if t >= window.0 - 1e-12 && t <= window.1 + 1e-12 {
                worst_gap = worst_gap.max((value - exact).abs() / exact);
            }
        }
    }
    let fit = fit_decay_exponent(&DecaySeries { points, window })?;
    let spec = NormSpec::new(Quantity::Theta, 0.0, 0, 2.0)?;
    let predicted = predicted_exponent(&spec, &assumptions(cfg)?)?.value();
    let slack = cfg.fit.slack.unwrap_or(0.03);
    let mut report = Report::new(cfg.kind.name());
    report.fits.push(FitRecord {
        spec: spec_label(&spec),
        window,
        slope: fit.slope,
        r2: fit.r2,
        predicted,
        pass: (fit.slope - predicted).abs() <= slack,
        anchor: "heat-l2-decay",
    });
    if let Some(tol) = cfg.fit.closed_form_tolerance {
        report.checks.push(CheckRecord::at_most("closed-form-gap", worst_gap, tol, "heat-closed-form"));
    }
    Ok((rows, report.finish()))
}

fn decay(cfg: &ExperimentConfig) -> boussinesq::Result<Outcome> {
    let traj = solve(cfg, &[])?;
    let window = cfg.fit_window();
    let ad = assumptions(cfg)?;
    let norms = if cfg.fit.norms.is_empty() { default_norms(cfg.kind) } else { cfg.fit.norms.clone() };
    let slack = cfg.fit.slack.unwrap_or(0.15);
    let min_r2 = cfg.fit.min_r2.unwrap_or(if cfg.kind == ExperimentKind::NonlinearDecay { 0.98 } else { 0.0 });
    let mut rows = Vec::new();
    let mut report = Report::new(cfg.kind.name());
    let mut l2_slopes = [None, None];
    for entry in &norms {
        let spec = entry.spec()?;
        let pred = predicted_exponent(&spec, &ad)?;
        let mut points = Vec::new();
        for s in traj.states().iter().skip(1) {
            let v = weighted_norm(s, &spec)?;
            let flag = if !v.trusted {
                "untrusted"
            } else if pred.extended_range {
                "extended-range"
            } else {
                "ok"
            };
            rows.push(Measurement {
                t: s.t,
                quantity: spec.quantity.name().into(),
                a: spec.a,
                b: spec.b,
                p: spec.p,
                value: v.value,
                flag,
            });
            points.push((s.t, v.value));
        }
        let fit = fit_decay_exponent(&DecaySeries { points, window })?;
        let predicted = pred.value();
        report.fits.push(FitRecord {
            spec: spec_label(&spec),
            window,
            slope: fit.slope,
            r2: fit.r2,
            predicted,
            pass: fit.slope <= predicted + slack && fit.r2 >= min_r2,
            anchor: if cfg.kind == ExperimentKind::WeightedDecay { "weighted-decay" } else { "small-data-decay" },
        });
        if spec.a == 0.0 && spec.b == 0 && spec.p == 2.0 {
            match spec.quantity {
                Quantity::U => l2_slopes[0] = Some(fit.slope),
                Quantity::Omega => l2_slopes[1] = Some(fit.slope),
                Quantity::Theta => {}
            }
        }
    }
    if let (ExperimentKind::WeightedDecay, [Some(su), Some(sw)]) = (cfg.kind, l2_slopes) {
        report.checks.push(CheckRecord::at_most(
            "vorticity-slope-minus-velocity-slope",
            sw - su,
            -cfg.fit.vorticity_gap,
            "vorticity-gap",
        ));
    }
    Ok((rows, report.finish()))
}

/// Relative L² distance of two states, `(‖Δu‖² + ‖Δθ‖²)^{1/2} / (‖u‖² + ‖θ‖²)^{1/2}`.
pub fn relative_gap(a: &State, b: &State) -> f64 {
    let du = a.u.sub(&b.u).l2_norm();
    let dt = a.theta.sub(&b.theta).l2_norm();
    let n = (a.u.l2_norm().powi(2) + a.theta.l2_norm().powi(2)).sqrt();
    (du * du + dt * dt).sqrt() / n
}

/// Gaps at `t_max` between the two formulas, at the configured quadrature and
/// with panels halved and nodes doubled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equivalence {
    pub gap: f64,
    pub gap_refined: f64,
    /// Larger of the two formulas' distances to their own refinements.
    pub quadrature_error: f64,
}

pub fn equivalence_gaps(cfg: &ExperimentConfig) -> boussinesq::Result<Equivalence> {
    let (u0, th0) = initial_data(cfg)?;
    let m = cfg.equivalence.nodes;
    let t_max = cfg.time.t_max;
    let grid_times = |m: usize| (0..=m).map(|k| t_max * k as f64 / m as f64).collect::<Vec<f64>>();
    let q = cfg.solver.quadrature;
    let run = |f: Formula, times: Vec<f64>, q: TimeQuadrature| -> boussinesq::Result<State> {
        Ok(picard_solve(&u0, &th0, &picard_config(cfg, f, times, q))?.trajectory.last().clone())
    };
    let new = run(Formula::NewB4, grid_times(m), q)?;
    let old = run(Formula::Classical, grid_times(m), q)?;
    let new_r = run(Formula::NewB4, grid_times(2 * m), q.refined())?;
    let old_r = run(Formula::Classical, grid_times(2 * m), q.refined())?;
    Ok(Equivalence {
        gap: relative_gap(&new, &old),
        gap_refined: relative_gap(&new_r, &old_r),
        quadrature_error: relative_gap(&new, &new_r).max(relative_gap(&old, &old_r)),
    })
}

fn formula_equivalence(cfg: &ExperimentConfig) -> boussinesq::Result<Outcome> {
    let e = equivalence_gaps(cfg)?;
    let t = cfg.time.t_max;
    let row = |quantity: &str, value| Measurement { t, quantity: quantity.into(), a: 0.0, b: 0, p: 2.0, value, flag: "ok" };
    let rows = vec![row("formula-gap", e.gap), row("formula-gap-refined", e.gap_refined), row("quadrature-error", e.quadrature_error)];
    let mut report = Report::new(cfg.kind.name());
    report.checks.push(CheckRecord::at_most(
        "formula-gap",
        e.gap,
        cfg.equivalence.gap_factor * e.quadrature_error,
        "formula-equivalence",
    ));
    report.checks.push(CheckRecord::at_least(
        "gap-shrink-under-refinement",
        e.gap / e.gap_refined,
        cfg.equivalence.shrink,
        "formula-equivalence",
    ));
    Ok((rows, report.finish()))
}

/// `(‖u_λ(t)‖_∞, λ‖u(λ²t)‖_∞)` at each configured time.
pub fn scaling_pairs(cfg: &ExperimentConfig) -> boussinesq::Result<Vec<(f64, f64, f64)>> {
    let s = &cfg.scaling;
    let l2 = s.lambda * s.lambda;
    let base_times: Vec<f64> = s.times.iter().map(|t| l2 * t).collect();
    let base = solve(cfg, &base_times)?;
    let (u0, th0) = initial_data(cfg)?;
    let (su, sth) = scaling_transform(&u0, &th0, s.lambda, s.n)?;
    let t_end = s.times.iter().cloned().fold(0.0, f64::max);
    let scaled = match cfg.solver.method {
        Method::Stepper => {
            let mut sc = StepperConfig::new(cfg.time.dt / l2, t_end);
            sc.output_times = s.times.clone();
            timestep_solve(&su, &sth, &sc)?
        }
        Method::Picard => {
            let mut times = vec![0.0];
            times.extend(s.times.iter().copied());
            times.sort_by(|a, b| a.partial_cmp(b).unwrap());
            times.dedup();
            let q = cfg.solver.quadrature;
            let q = TimeQuadrature { finest: q.finest / l2, max_width: q.max_width / l2, ..q };
            picard_solve(&su, &sth, &picard_config(cfg, cfg.solver.formula, times, q))?.trajectory
        }
    };
    let spec = NormSpec::new(Quantity::U, 0.0, 0, f64::INFINITY)?;
    let mut out = Vec::new();
    for &t in &s.times {
        let a = weighted_norm(&scaled.state_at(t)?, &spec)?.value;
        let b = s.lambda * weighted_norm(&base.state_at(l2 * t)?, &spec)?.value;
        out.push((t, a, b));
    }
    Ok(out)
}

fn scaling_invariance(cfg: &ExperimentConfig) -> boussinesq::Result<Outcome> {
    let pairs = scaling_pairs(cfg)?;
    let mut rows = Vec::new();
    let mut report = Report::new(cfg.kind.name());
    for (t, a, b) in pairs {
        let inf = f64::INFINITY;
        rows.push(Measurement { t, quantity: "u-scaled".into(), a: 0.0, b: 0, p: inf, value: a, flag: "ok" });
        rows.push(Measurement { t, quantity: "u-base-rescaled".into(), a: 0.0, b: 0, p: inf, value: b, flag: "ok" });
        report.checks.push(CheckRecord::at_most(
            format!("scaling-identity t={t}"),
            (a - b).abs() / b,
            cfg.scaling.tolerance,
            "scaling-invariance",
        ));
    }
    Ok((rows, report.finish()))
}

fn profile(cfg: &ExperimentConfig) -> boussinesq::Result<Outcome> {
    let p = cfg
        .profile
        .as_ref()
        .ok_or_else(|| boussinesq::Error::InvalidArgument("missing [profile] table".into()))?;
    let traj = solve(cfg, &[p.t])?;
    let moments = cfg.data.moments()?;
    let mut rows = Vec::new();
    let mut report = Report::new(cfg.kind.name());
    for &variant in &p.variants {
        let name = serde_json::to_value(variant).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        let mut ratios = Vec::new();
        for &kappa in &p.kappas {
            let r = profile_residual(&traj, p.t, variant, &moments, kappa)?;
            rows.push(Measurement {
                t: p.t,
                quantity: format!("profile-{name}"),
                a: kappa,
                b: variant.order() as u32,
                p: f64::INFINITY,
                value: r.sup_ratio,
                flag: "ok",
            });
            ratios.push((kappa, r.sup_ratio));
        }
        for w in ratios.windows(2) {
            report.checks.push(CheckRecord::at_least(
                format!("{name} decrease κ={}→{}", w[0].0, w[1].0),
                w[0].1 / w[1].1,
                p.min_factor,
                "far-field-profile",
            ));
        }
    }
    Ok((rows, report.finish()))
}

/// Direction used for non-radial kernel samples.
const DIRECTION: [f64; 3] = [0.267_261_241_912_424_4, 0.534_522_483_824_848_8, 0.801_783_725_737_273_2];

fn kernel_validation(cfg: &ExperimentConfig) -> boussinesq::Result<Outcome> {
    let k = &cfg.kernel;
    let oseen = OseenKernel::new(k.t)?;
    let mut rows = Vec::new();
    let mut report = Report::new(cfg.kind.name());
    let at = |r: f64| DIRECTION.map(|d| d * r);

    // |x|³ |K − R| along the radii
    let mut env = Vec::new();
    for &r in &k.radii {
        let v = r.powi(3) * mat_norm(&oseen.remainder(&at(r))?);
        rows.push(Measurement { t: k.t, quantity: "oseen-remainder-r3".into(), a: r, b: 0, p: f64::INFINITY, value: v, flag: "ok" });
        env.push((r, v));
    }
    let monotone = env.windows(2).all(|w| w[1].1 < w[0].1);
    report.checks.push(CheckRecord::at_least("remainder-monotone", monotone as u8 as f64, 1.0, "kernel-decomposition"));
    // log-linear fit of log v against r²
    let n = env.len() as f64;
    let xs: Vec<f64> = env.iter().map(|e| e.0 * e.0).collect();
    let ys: Vec<f64> = env.iter().map(|e| e.1.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let decay = -sxy / sxx;
    report.checks.push(CheckRecord::at_least("gaussian-envelope-decay", decay, f64::MIN_POSITIVE, "kernel-decomposition"));

    // quadrature against the closed form on |x|/√t ∈ [1/2, 8]
    let mut worst = 0.0f64;
    let st = k.t.sqrt();
    for i in 0..=30 {
        let r = st * 0.5 * 16f64.powf(i as f64 / 30.0);
        let x = at(r);
        let a = oseen.eval_quadrature(&x)?;
        let b = oseen.eval_decomposition(&x)?;
        let diff = mat_norm(&std::array::from_fn(|j| std::array::from_fn(|l| a[j][l] - b[j][l])));
        worst = worst.max(diff / mat_norm(&b));
    }
    rows.push(Measurement { t: k.t, quantity: "oseen-path-gap".into(), a: 0.0, b: 0, p: f64::INFINITY, value: worst, flag: "ok" });
    report.checks.push(CheckRecord::at_most("quadrature-vs-closed-form", worst, k.tolerance, "kernel-decomposition"));
    Ok((rows, report.finish()))
}

fn interpolation(cfg: &ExperimentConfig) -> boussinesq::Result<Outcome> {
    let i = &cfg.interpolation;
    let r = interpolation_check(i.alpha, i.p.value(), i.family, &i.times)?;
    let rows = r
        .samples
        .iter()
        .map(|s| Measurement { t: s.t, quantity: "interpolation-ratio".into(), a: i.alpha, b: 1, p: r.p, value: s.ratio, flag: "ok" })
        .collect();
    let mut report = Report::new(cfg.kind.name());
    let spread = if r.median > 0.0 { r.max / r.median } else { 0.0 };
    report.checks.push(CheckRecord::at_most(
        "ratio-max-over-median",
        spread,
        boussinesq::diagnostics::STABILITY_SPREAD,
        "interpolation-inequality",
    ));
    Ok((rows, report.finish()))
}
