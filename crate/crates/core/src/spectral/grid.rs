use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform periodic grid of `N³` points on the box `[-L/2, L/2)³`.
///
/// Point `(i, j, k)` sits at `x = ((i - N/2) dx, (j - N/2) dx, (k - N/2) dx)`
/// with `dx = L/N`, so the origin is the grid point `(N/2, N/2, N/2)`. Arrays
/// are flat with `x` fastest: `idx = i + N (j + N k)`.
///
/// Spectral coefficients are Fourier-series coefficients with respect to the
/// physical coordinates, `f(x) = Σ_k c_k e^{iξ_k·x}` with `ξ_k = 2πk/L` and
/// `k ∈ [-N/2, N/2)` stored in FFT order. The forward transform therefore
/// carries the factor `1/N³`, and Parseval reads
/// `∫_box |f|² dx = L³ Σ_k |c_k|²`.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<Inner>,
}

struct Inner {
    n: usize,
    l: f64,
    /// Integer wavenumber per axis index.
    k: Vec<i64>,
    /// `ξ` per axis index.
    xi: Vec<f64>,
    /// Derivative symbol per axis index; zero at the Nyquist index.
    dxi: Vec<f64>,
    /// `|ξ|²` per flat mode index.
    ksq: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("n", &self.n()).field("l", &self.l()).finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n() == other.n() && self.l() == other.l()
    }
}

impl Grid {
    pub fn new(n: usize, l: f64) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("N must be a power of two ≥ 4, got {n}")));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidArgument(format!("box side must be positive, got {l}")));
        }
        let k: Vec<i64> = (0..n).map(|i| if i < n / 2 { i as i64 } else { i as i64 - n as i64 }).collect();
        let xi: Vec<f64> = k.iter().map(|&k| 2.0 * PI * k as f64 / l).collect();
        let dxi: Vec<f64> = (0..n).map(|i| if i == n / 2 { 0.0 } else { xi[i] }).collect();
        let mut ksq = vec![0.0; n * n * n];
        for c in 0..n {
            for b in 0..n {
                for a in 0..n {
                    ksq[a + n * (b + n * c)] = xi[a] * xi[a] + xi[b] * xi[b] + xi[c] * xi[c];
                }
            }
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        Ok(Self { inner: Arc::new(Inner { n, l, k, xi, dxi, ksq, fwd, inv }) })
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn l(&self) -> f64 {
        self.inner.l
    }

    pub fn len(&self) -> usize {
        self.inner.n.pow(3)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.inner.l / self.inner.n as f64
    }

    /// Cell volume `dx³`.
    pub fn cell(&self) -> f64 {
        self.dx().powi(3)
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.inner.n * (j + self.inner.n * k)
    }

    /// Inverse of [`Grid::index`].
    pub fn unravel(&self, idx: usize) -> (usize, usize, usize) {
        let n = self.inner.n;
        (idx % n, (idx / n) % n, idx / (n * n))
    }

    /// Physical coordinate along one axis.
    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - (self.inner.n / 2) as f64) * self.dx()
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let (i, j, k) = self.unravel(idx);
        [self.coord(i), self.coord(j), self.coord(k)]
    }

    /// Signed integer wavenumber along one axis.
    pub fn wavenumber(&self, i: usize) -> i64 {
        self.inner.k[i]
    }

    pub fn xi_axis(&self, i: usize) -> f64 {
        self.inner.xi[i]
    }

    /// Wave vector `ξ` of a flat mode index.
    pub fn xi(&self, idx: usize) -> [f64; 3] {
        let (i, j, k) = self.unravel(idx);
        [self.inner.xi[i], self.inner.xi[j], self.inner.xi[k]]
    }

    /// Symbol of `∇` without the factor `i`; the Nyquist component is zero.
    pub fn dxi(&self, idx: usize) -> [f64; 3] {
        let (i, j, k) = self.unravel(idx);
        [self.inner.dxi[i], self.inner.dxi[j], self.inner.dxi[k]]
    }

    pub fn ksq(&self) -> &[f64] {
        &self.inner.ksq
    }

    /// Flat index of the mode `-k`.
    pub fn negate(&self, idx: usize) -> usize {
        let n = self.inner.n;
        let (i, j, k) = self.unravel(idx);
        self.index((n - i) % n, (n - j) % n, (n - k) % n)
    }

    /// Whether all three integer wavenumbers satisfy `|k| ≤ N/3`.
    pub fn within_two_thirds(&self, idx: usize) -> bool {
        let (i, j, k) = self.unravel(idx);
        let m = (self.inner.n / 3) as i64;
        self.inner.k[i].abs() <= m && self.inner.k[j].abs() <= m && self.inner.k[k].abs() <= m
    }

    /// `(-1)^{i+j+k}`, the phase between FFT coefficients and coefficients
    /// relative to the box centre.
    fn parity(&self, idx: usize) -> f64 {
        let (i, j, k) = self.unravel(idx);
        if (i + j + k) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// In-place 3-D FFT along all axes, rotating the axes after each pass so
    /// that every pass works on contiguous rows.
    fn fft3(&self, data: &mut Vec<Complex64>, forward: bool) {
        let n = self.inner.n;
        let plan = if forward { &self.inner.fwd } else { &self.inner.inv };
        let mut buf = vec![Complex64::new(0.0, 0.0); data.len()];
        for _ in 0..3 {
            data.par_chunks_mut(n).for_each_init(
                || vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()],
                |scratch, row| plan.process_with_scratch(row, scratch),
            );
            // (i, j, k) -> (j, k, i)
            let src = &*data;
            buf.par_chunks_mut(n).enumerate().for_each(|(c, row)| {
                let k = c % n;
                let i = c / n;
                for (j, out) in row.iter_mut().enumerate() {
                    *out = src[i + n * (j + n * k)];
                }
            });
            std::mem::swap(data, &mut buf);
        }
    }

    /// Physical values to spectral coefficients.
    pub fn forward_complex(&self, values: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.len());
        let mut data = values.to_vec();
        self.fft3(&mut data, true);
        let scale = 1.0 / self.len() as f64;
        data.par_iter_mut().enumerate().for_each(|(idx, c)| *c *= scale * self.parity(idx));
        data
    }

    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward_complex(&data)
    }

    /// Spectral coefficients to physical values.
    pub fn inverse_complex(&self, coef: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(coef.len(), self.len());
        let mut data: Vec<Complex64> =
            coef.par_iter().enumerate().map(|(idx, &c)| c * self.parity(idx)).collect();
        self.fft3(&mut data, false);
        data
    }

    /// Real part of the inverse transform.
    pub fn inverse(&self, coef: &[Complex64]) -> Vec<f64> {
        self.inverse_complex(coef).into_iter().map(|c| c.re).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(12, 1.0).is_err());
        assert!(Grid::new(2, 1.0).is_err());
        assert!(Grid::new(8, 0.0).is_err());
    }

    #[test]
    fn single_mode_coefficient() {
        // f = cos(ξ₁ x₂) has c = 1/2 at k = (0, ±1, 0) regardless of the grid offset
        let g = Grid::new(8, 3.0).unwrap();
        let w = 2.0 * PI / 3.0;
        let vals: Vec<f64> = (0..g.len()).map(|i| (w * g.point(i)[1]).cos()).collect();
        let c = g.forward(&vals);
        let p = g.index(0, 1, 0);
        let m = g.index(0, 7, 0);
        assert!((c[p] - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!((c[m] - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        let rest: f64 = c.iter().enumerate().filter(|(i, _)| *i != p && *i != m).map(|(_, v)| v.norm()).sum();
        assert!(rest < 1e-13);
    }

    #[test]
    fn round_trip_and_parseval() {
        let g = Grid::new(16, 5.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let vals: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c = g.forward(&vals);
        let back = g.inverse(&c);
        let err = vals.iter().zip(&back).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let nrm = vals.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!(err < 1e-12 * nrm);
        let phys = vals.iter().map(|a| a * a).sum::<f64>() * g.cell();
        let spec = c.iter().map(|z| z.norm_sqr()).sum::<f64>() * g.l().powi(3);
        assert!((phys - spec).abs() < 1e-10 * phys);
    }
}
