use boussinesq::diagnostics::*;
use boussinesq::solver::{timestep_solve, StepperConfig, ThetaProfile, VelocityProfile};
use boussinesq::spectral::{Grid, SpectralScalar, SpectralVector};
use boussinesq::Error;
use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn exponent(q: Quantity, a: f64, b: u32, p: f64, gamma: Rational64, mu: Rational64) -> Rational64 {
    let asm = DecayAssumptions::new(gamma, mu, false).unwrap();
    predicted_exponent(&NormSpec::new(q, a, b, p).unwrap(), &asm).unwrap().exponent
}

#[test]
fn exponent_table_for_zero_mean_data() {
    let (g, m) = (r(1, 4), r(5, 4));
    let inf = f64::INFINITY;
    assert_eq!(exponent(Quantity::U, 0.0, 0, 2.0, g, m), r(-1, 4));
    assert_eq!(exponent(Quantity::U, 0.0, 0, inf, g, m), r(-1, 1));
    assert_eq!(exponent(Quantity::U, 1.0, 0, 2.0, g, m), r(1, 4));
    assert_eq!(exponent(Quantity::U, 2.0, 1, 2.0, g, m), r(1, 4));
    assert_eq!(exponent(Quantity::Theta, 0.0, 0, 2.0, g, m), r(-5, 4));
    assert_eq!(exponent(Quantity::Theta, 0.0, 0, inf, g, m), r(-2, 1));
    assert_eq!(exponent(Quantity::Theta, 0.0, 1, 2.0, g, m), r(-7, 4));
    assert_eq!(exponent(Quantity::Omega, 0.0, 0, 2.0, g, m), r(-3, 4));
    assert_eq!(exponent(Quantity::Omega, 1.0, 0, 2.0, g, m), r(-1, 4));
}

#[test]
fn exponent_table_for_massive_data() {
    let (g, m) = (r(-1, 4), r(3, 4));
    assert_eq!(exponent(Quantity::Theta, 0.0, 0, 2.0, g, m), r(-3, 4));
    assert_eq!(exponent(Quantity::U, 0.0, 0, f64::INFINITY, g, m), r(-1, 2));
    assert_eq!(exponent(Quantity::U, 0.0, 0, 2.0, g, m), r(1, 4));
}

#[test]
fn exponent_guards() {
    let asm = DecayAssumptions::default();
    let spec = NormSpec::new(Quantity::U, 2.5, 0, 2.0).unwrap();
    assert!(predicted_exponent(&spec, &asm).is_err());
    let spec = NormSpec::new(Quantity::U, 2.5, 1, 2.0).unwrap();
    assert!(predicted_exponent(&spec, &asm).unwrap().extended_range);
    assert!(!predicted_exponent(&NormSpec::new(Quantity::Theta, 1.0, 0, 2.0).unwrap(), &asm).unwrap().extended_range);
    assert!(DecayAssumptions::new(r(1, 4), r(1, 1), true).is_err());
    assert!(NormSpec::new(Quantity::U, 0.0, 0, 1.5).is_err());
}

/// Heat kernel `g_t` sampled on the grid through its transform.
fn heat_kernel_field(grid: &Grid, t: f64) -> SpectralScalar {
    SpectralScalar::from_transform(grid, |xi| {
        Complex64::new((-t * (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2])).exp(), 0.0)
    })
}

#[test]
fn temperature_exponents_match_self_similar_heat_flow() {
    // g_t(x) = t^{-3/2} G(x/√t) decays in L² like t^{-3/4}; every weighted norm
    // then follows from the change of variables x = √t y.
    let grid = Grid::new(128, 64.0).unwrap();
    let (t1, t2) = (1.0, 4.0);
    let (f1, f2) = (heat_kernel_field(&grid, t1), heat_kernel_field(&grid, t2));
    for &(a, b, p) in &[(0.0, 0u32, 2.0), (0.0, 0, f64::INFINITY), (1.0, 0, 2.0), (2.0, 1, 2.0), (0.0, 1, 4.0)] {
        let (n1, n2) = (weighted_norm_scalar(&f1, a, b, p), weighted_norm_scalar(&f2, a, b, p));
        let slope = (n2.value / n1.value).ln() / (t2 / t1).ln();
        let want = exponent(Quantity::Theta, a, b, p, r(-1, 4), r(3, 4));
        let want = *want.numer() as f64 / *want.denom() as f64;
        assert!((slope - want).abs() < 5e-3, "a={a} b={b} p={p}: {slope} vs {want}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exponents_shift_with_weights(gn in -4i64..8, a2 in 0i64..4, b in 0u32..3, p in prop::sample::select(vec![2.0, 3.0, 4.0, 6.0, f64::INFINITY])) {
        let g = r(gn, 4);
        let m = g + r(1, 1);
        let a = a2 as f64 / 2.0;
        let base = exponent(Quantity::Theta, 0.0, 0, 2.0, g, m);
        let here = exponent(Quantity::Theta, a, b, p, g, m);
        let two_over_p = if p.is_infinite() { r(0, 1) } else { r(2, 1) / Rational64::approximate_float(p).unwrap() };
        prop_assert_eq!(here - base, r(a2, 4) - r(b as i64, 2) - r(3, 4) * (r(1, 1) - two_over_p));
        let w = exponent(Quantity::Omega, a, b, p, g, m);
        let u = exponent(Quantity::U, a, b, p, g, m);
        prop_assert_eq!(w, exponent(Quantity::U, a, b + 1, p, g, m));
        prop_assert_eq!(u - here, m - g);
    }

    #[test]
    fn fit_recovers_power_laws(c in 1e-6f64..1e3, k in -3.0f64..1.0, t0 in 0.1f64..2.0) {
        let points: Vec<(f64, f64)> = (0..12).map(|i| t0 * 1.3f64.powi(i)).map(|t| (t, c * t.powf(k))).collect();
        let fit = fit_decay_exponent(&DecaySeries { points, window: (t0, t0 * 1.3f64.powi(11)) }).unwrap();
        prop_assert!((fit.slope - k).abs() < 1e-10);
        prop_assert!((fit.intercept - c.ln()).abs() < 1e-8);
        prop_assert!(fit.r2 > 1.0 - 1e-12);
    }
}

#[test]
fn fit_rejects_short_windows_and_bad_values() {
    let points: Vec<(f64, f64)> = (1..=10).map(|i| (i as f64, 1.0 / i as f64)).collect();
    assert!(fit_decay_exponent(&DecaySeries { points: points.clone(), window: (1.0, 3.0) }).is_err());
    assert!(fit_decay_exponent(&DecaySeries { points: points.clone(), window: (1.0, 10.0) }).is_ok());
    let mut bad = points;
    bad[4].1 = 0.0;
    assert!(fit_decay_exponent(&DecaySeries { points: bad, window: (1.0, 10.0) }).is_err());
}

#[test]
fn fit_reports_poor_correlation_for_oscillating_data() {
    let points: Vec<(f64, f64)> = (1..=20).map(|i| (i as f64, 2.0 + (i as f64).sin())).collect();
    let fit = fit_decay_exponent(&DecaySeries { points, window: (1.0, 20.0) }).unwrap();
    assert!(fit.r2 < 0.5);
}

#[test]
fn gaussian_and_dipole_moments() {
    let g = ThetaProfile::Gaussian { mass: 1.0, sigma: 1.0 };
    let m = moments(&|x| g.value(x), 1.0).unwrap();
    assert!((m.m0 - 1.0).abs() < 1e-10, "{}", m.m0);
    assert!(m.m1.iter().all(|v| v.abs() < 1e-10));
    let d = ThetaProfile::Dipole { mass: 1.0, sigma: 1.0 };
    let m = moments(&|x| d.value(x), 1.0).unwrap();
    assert!(m.m0.abs() < 1e-10);
    assert!(m.m1[0].abs() < 1e-10 && m.m1[1].abs() < 1e-10);
    assert!((m.m1[2] + 1.0).abs() < 1e-10, "{:?}", m.m1);
}

#[test]
fn translated_gaussian_first_moment() {
    let g = ThetaProfile::Gaussian { mass: 2.0, sigma: 0.7 };
    let c = [0.3, -0.5, 0.2];
    let m = moments(&|x| g.value([x[0] - c[0], x[1] - c[1], x[2] - c[2]]), 1.0).unwrap();
    for d in 0..3 {
        assert!((m.m1[d] - 2.0 * c[d]).abs() < 1e-9);
    }
}

#[test]
fn algebraic_tail_is_not_integrable() {
    let a = ThetaProfile::Algebraic { eps: 1.0 };
    match moments(&|x| a.value(x), 1.0) {
        Err(Error::NonIntegrable { growth }) => assert!(growth >= 0.05),
        other => panic!("expected non-integrable, got {other:?}"),
    }
}

#[test]
fn grid_moments_match_continuous_moments() {
    let grid = Grid::new(32, 24.0).unwrap();
    let th = ThetaProfile::Dipole { mass: 0.5, sigma: 1.2 }.build(&grid).unwrap();
    let m = field_moments(&th);
    assert!(m.m0.abs() < 1e-12);
    assert!((m.m1[2] + 0.5).abs() < 1e-6, "{:?}", m.m1);
}

fn linear_run(theta: ThetaProfile, velocity: VelocityProfile) -> boussinesq::solver::Trajectory {
    let grid = Grid::new(32, 40.0).unwrap();
    let u0 = velocity.build(&grid).unwrap();
    let th0 = theta.build(&grid).unwrap();
    let mut cfg = StepperConfig::new(0.05, 2.0);
    cfg.output_times = vec![0.5, 1.0, 1.5, 2.0];
    cfg.nonlinear = false;
    timestep_solve(&u0, &th0, &cfg).unwrap()
}

#[test]
fn linear_flow_has_no_nonlinear_residual() {
    let traj = linear_run(
        ThetaProfile::Gaussian { mass: 1.0, sigma: 1.0 },
        VelocityProfile::Vortex { amplitude: 1.0, sigma: 1.0, center: [0.0; 3] },
    );
    let m = Moments { m0: 1.0, m1: [0.0; 3] };
    let res = profile_residual(&traj, 1.0, ProfileVariant::R1, &m, 2.0).unwrap();
    assert!(res.sup_ratio < 1e-12, "{:e}", res.sup_ratio);
    assert!(matches!(
        profile_residual(&traj, 1.0, ProfileVariant::R1Tilde, &m, 2.0),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn oseen_term_captures_linear_far_field() {
    let traj = linear_run(ThetaProfile::Gaussian { mass: 1.0, sigma: 1.0 }, VelocityProfile::Zero);
    let m = Moments { m0: 1.0, m1: [0.0; 3] };
    let none = Moments { m0: 0.0, m1: [0.0; 3] };
    let raw = profile_residual(&traj, 1.0, ProfileVariant::R3, &none, 4.0).unwrap().sup_ratio;
    let r2 = profile_residual(&traj, 1.0, ProfileVariant::R2, &m, 4.0).unwrap().sup_ratio;
    assert!(r2 < 0.5 * raw, "R2 {r2:e} vs unsubtracted {raw:e}");
}

#[test]
fn heat_flow_satisfies_temperature_bounds() {
    let traj = linear_run(ThetaProfile::Gaussian { mass: 1.0, sigma: 1.0 }, VelocityProfile::Zero);
    let rep = lp_bound_check(&traj, Space::Y, 2.0).unwrap();
    assert!(rep.pass, "{rep:?}");
    assert!(lp_bound_check(&traj, Space::Y, 1.0).is_err());
    assert!(lp_bound_check(&traj, Space::YB { b: 2.0 }, 4.0).is_err());
}

#[test]
fn vector_norms_of_zero_field_vanish() {
    let grid = Grid::new(8, 10.0).unwrap();
    let v = SpectralVector::zeros(&grid);
    let n = weighted_norm_vector(&v, 1.0, 1, 2.0);
    assert_eq!(n.value, 0.0);
    assert!(n.trusted);
}
