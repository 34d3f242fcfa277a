/// Spherical Bessel function `j_l(z)` for `l ≤ 3`.
///
/// Uses the power series below `z = 2`, where the closed forms lose digits to
/// cancellation.
pub fn spherical_bessel(l: usize, z: f64) -> f64 {
    assert!(l <= 3, "only orders 0..=3 are needed");
    let z = z.abs();
    if z < 2.0 {
        return series(l, z);
    }
    let (s, c) = z.sin_cos();
    match l {
        0 => s / z,
        1 => s / (z * z) - c / z,
        2 => (3.0 / (z * z) - 1.0) * s / z - 3.0 * c / (z * z),
        _ => (15.0 / (z * z * z) - 6.0 / z) * s / z - (15.0 / (z * z) - 1.0) * c / z,
    }
}

fn series(l: usize, z: f64) -> f64 {
    // j_l(z) = z^l Σ_k (-z²/2)^k / (k! (2l+2k+1)!!)
    let mut double_fact = 1.0;
    for m in (1..=(2 * l + 1)).step_by(2) {
        double_fact *= m as f64;
    }
    let mut term = z.powi(l as i32) / double_fact;
    let mut sum = term;
    let h = -0.5 * z * z;
    for k in 0..30 {
        term *= h / ((k + 1) as f64 * (2 * l + 2 * k + 3) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}
