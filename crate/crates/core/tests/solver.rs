use boussinesq::solver::*;
use boussinesq::spectral::{divergence, leray_vertical, Grid, SpectralScalar, SpectralVector};
use num_complex::Complex64;

fn rel_l2(a: &SpectralVector, b: &SpectralVector) -> f64 {
    a.sub(b).l2_norm() / b.l2_norm()
}

fn small_data(grid: &Grid, amp: f64) -> (SpectralVector, SpectralScalar) {
    let u0 = VelocityProfile::Vortex { amplitude: amp, sigma: 1.0, center: [0.3, -0.2, 0.1] }.build(grid).unwrap();
    let th0 = ThetaProfile::Gaussian { mass: amp, sigma: 1.0 }.build(grid).unwrap();
    (u0, th0)
}

#[test]
fn linear_buoyancy_identity_by_time_stepping() {
    let g = Grid::new(32, 20.0).unwrap();
    let (u0, th0) = small_data(&g, 1.0);
    let mut cfg = StepperConfig::new(0.05, 2.0);
    cfg.output_times = vec![0.5, 1.0];
    cfg.nonlinear = false;
    let traj = timestep_solve(&u0, &th0, &cfg).unwrap();
    let p = leray_vertical(&th0);
    for s in traj.states().iter().skip(1) {
        let mut want = u0.heat(s.t);
        want.axpy(s.t, &p.heat(s.t));
        assert!(rel_l2(&s.u, &want) < 1e-12, "t={} rel={}", s.t, rel_l2(&s.u, &want));
    }
}

#[test]
fn frozen_single_mode_integrals_match_closed_forms() {
    let g = Grid::new(8, 6.0).unwrap();
    let idx = g.index(1, 2, 0);
    let k2 = g.ksq()[idx];
    let mut c = vec![Complex64::new(0.0, 0.0); g.len()];
    c[idx] = Complex64::new(0.3, -0.2);
    c[g.negate(idx)] = c[idx].conj();
    let th = SpectralScalar::from_coefficients(&g, c).unwrap();
    let q = TimeQuadrature::default();
    let t = 1.3;
    let l = duhamel_l(&th, t, &q).unwrap();
    let want = leray_vertical(&th).scale((1.0 - (-t * k2).exp()) / k2);
    assert!(rel_l2(&l, &want) < 1e-10);
    // heat-flow source: L(e^{sΔ}θ₀)(t) = t e^{tΔ}ℙ(θ₀e₃)
    let l = duhamel_l(&HeatFlow(th.clone()), t, &q).unwrap();
    let want = leray_vertical(&th).heat(t).scale(t);
    assert!(rel_l2(&l, &want) < 1e-10);
}

#[test]
fn picard_matches_time_stepper() {
    let g = Grid::new(32, 20.0 * std::f64::consts::PI).unwrap();
    let (u0, th0) = small_data(&g, 1e-3);
    let cfg = PicardConfig::uniform(Formula::NewB4, 1.0, 10);
    let t0 = std::time::Instant::now();
    let out = picard_solve(&u0, &th0, &cfg).unwrap();
    eprintln!("picard {:?} {:?}", t0.elapsed(), out.report);
    let mut sc = StepperConfig::new(0.01, 1.0);
    sc.nonlinear = true;
    let ts = timestep_solve(&u0, &th0, &sc).unwrap();
    let a = &out.trajectory.last().u;
    let b = &ts.last().u;
    let lin = out.trajectory.linear_velocity(1.0);
    eprintln!("rel {:e}  nonlinear part {:e}", rel_l2(a, b), rel_l2(a, &lin));
    assert!(rel_l2(a, b) < 1e-4);
    assert!(divergence(a).l2_norm() < 1e-10 * a.l2_norm());
}
