use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralScalar, SpectralVector};

/// Relative energy that may be discarded before the transform reports a loss
/// of resolution.
const LOSS_TOLERANCE: f64 = 1e-12;

fn regrid(f: &SpectralScalar, target: &Grid, factor: f64) -> Result<SpectralScalar> {
    let src = f.grid();
    let mut coef = vec![Complex64::new(0.0, 0.0); target.len()];
    let total: f64 = f.coef().iter().map(|c| c.norm_sqr()).sum();
    let mut lost = 0.0;
    let mut outside = 0.0;
    let m = (target.n() / 2) as i64;
    let index = |k: i64, n: usize| -> usize { k.rem_euclid(n as i64) as usize };
    for (idx, c) in f.coef().iter().enumerate() {
        let (i, j, k) = src.unravel(idx);
        let w = [src.wavenumber(i), src.wavenumber(j), src.wavenumber(k)];
        if w.iter().any(|&x| x < -m || x >= m) {
            lost += c.norm_sqr();
            continue;
        }
        let t = target.index(index(w[0], target.n()), index(w[1], target.n()), index(w[2], target.n()));
        if !target.within_two_thirds(t) {
            outside += c.norm_sqr();
        }
        coef[t] = c * factor;
    }
    if total > 0.0 && (lost + outside) > LOSS_TOLERANCE * total {
        return Err(Error::ResolutionLoss(format!(
            "{:.3e} of the energy falls outside the retained modes of the target grid",
            (lost + outside) / total
        )));
    }
    SpectralScalar::from_coefficients(target, coef)
}

/// `(λ u₀(λ·), λ³ θ₀(λ·))` on a box of side `L/λ`.
///
/// Fourier coefficients are unchanged by the rescaling of space; only the box
/// shrinks. With `n = None` the number of modes per axis is kept. A different
/// `n` re-indexes the coefficients and fails with [`Error::ResolutionLoss`]
/// when energy beyond the target's 2/3 cutoff would be dropped.
pub fn scaling_transform(
    u0: &SpectralVector,
    theta0: &SpectralScalar,
    lambda: f64,
    n: Option<usize>,
) -> Result<(SpectralVector, SpectralScalar)> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("scaling factor must be positive, got {lambda}")));
    }
    let src = theta0.grid();
    let target = Grid::new(n.unwrap_or(src.n()), src.l() / lambda)?;
    if n.is_none() {
        let re = |f: &SpectralScalar, a: f64| SpectralScalar::from_coefficients(&target, f.scale(a).into_coef());
        let c = u0.comps();
        let u = SpectralVector::new([re(&c[0], lambda)?, re(&c[1], lambda)?, re(&c[2], lambda)?])?;
        return Ok((u, re(theta0, lambda.powi(3))?));
    }
    let c = u0.comps();
    let u = SpectralVector::new([
        regrid(&c[0], &target, lambda)?,
        regrid(&c[1], &target, lambda)?,
        regrid(&c[2], &target, lambda)?,
    ])?;
    Ok((u, regrid(theta0, &target, lambda.powi(3))?))
}
