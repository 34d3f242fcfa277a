use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Time series `(t, value)` with a fit window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecaySeries {
    pub points: Vec<(f64, f64)>,
    pub window: (f64, f64),
}

/// Least-squares fit of `log value = slope · log t + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

/// Minimum span of the fit window in decades of `t`.
pub const MIN_DECADES: f64 = 0.5;

pub fn fit_decay_exponent(series: &DecaySeries) -> Result<ExponentFit> {
    let (t1, t2) = series.window;
    if !(t1 > 0.0 && t2 > t1) || (t2 / t1).log10() < MIN_DECADES - 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "fit window [{t1}, {t2}] spans less than half a decade"
        )));
    }
    let tol = 1e-12 * t2;
    let pts: Vec<(f64, f64)> =
        series.points.iter().copied().filter(|&(t, _)| t >= t1 - tol && t <= t2 + tol).collect();
    if let Some(&(t, v)) = pts.iter().find(|&&(_, v)| !(v > 0.0)) {
        return Err(Error::InvalidArgument(format!("non-positive value {v} at t = {t}")));
    }
    if pts.len() < 3 {
        return Err(Error::InvalidArgument(format!("only {} samples inside the fit window", pts.len())));
    }
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    // a constant series is fitted exactly
    let r2 = if ss_tot <= 1e-30 * n { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(ExponentFit { slope, intercept, r2, window: series.window, samples: pts.len() })
}
