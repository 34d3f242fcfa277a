use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Spectral coefficients of a real scalar field on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralScalar {
    grid: Grid,
    coef: Vec<Complex64>,
}

/// Three spectral components of a real vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVector {
    comps: [SpectralScalar; 3],
}

impl SpectralScalar {
    pub fn zeros(grid: &Grid) -> Self {
        Self { grid: grid.clone(), coef: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_coefficients(grid: &Grid, coef: Vec<Complex64>) -> Result<Self> {
        if coef.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coef.len()
            )));
        }
        Ok(Self { grid: grid.clone(), coef })
    }

    pub fn from_physical(grid: &Grid, values: &[f64]) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid: grid.clone(), coef: grid.forward(values) })
    }

    /// Coefficients `c_k = f̂(ξ_k)/L³` from the whole-space Fourier transform
    /// `f̂(ξ) = ∫ f(x) e^{-iξ·x} dx` of a field that is negligible outside the box.
    pub fn from_transform<F>(grid: &Grid, fhat: F) -> Self
    where
        F: Fn([f64; 3]) -> Complex64 + Sync,
    {
        let vol = grid.l().powi(3);
        let coef = (0..grid.len()).into_par_iter().map(|idx| fhat(grid.xi(idx)) / vol).collect();
        Self { grid: grid.clone(), coef }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coef(&self) -> &[Complex64] {
        &self.coef
    }

    pub fn coef_mut(&mut self) -> &mut [Complex64] {
        &mut self.coef
    }

    pub fn into_coef(self) -> Vec<Complex64> {
        self.coef
    }

    pub fn to_physical(&self) -> Vec<f64> {
        self.grid.inverse(&self.coef)
    }

    /// `‖f‖_{L²(box)}` by Parseval.
    pub fn l2_norm(&self) -> f64 {
        (self.coef.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.l().powi(3)).sqrt()
    }

    /// Box integral `∫ f dx = L³ c_0`.
    pub fn integral(&self) -> f64 {
        self.coef[0].re * self.grid.l().powi(3)
    }

    /// Applies a multiplier depending on the flat mode index.
    pub fn map_modes<F>(&self, f: F) -> Self
    where
        F: Fn(usize, Complex64) -> Complex64 + Sync,
    {
        let coef = self.coef.par_iter().enumerate().map(|(i, &c)| f(i, c)).collect();
        Self { grid: self.grid.clone(), coef }
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map_modes(|_, c| c * a)
    }

    /// `self + a·other`.
    pub fn axpy(&mut self, a: f64, other: &Self) {
        debug_assert_eq!(self.grid, other.grid);
        self.coef.par_iter_mut().zip(&other.coef).for_each(|(x, y)| *x += y * a);
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        r.axpy(1.0, other);
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut r = self.clone();
        r.axpy(-1.0, other);
        r
    }

    /// Heat multiplier `e^{-t|ξ|²}`.
    pub fn heat(&self, t: f64) -> Self {
        let ksq = self.grid.ksq();
        self.map_modes(|i, c| c * (-t * ksq[i]).exp())
    }

    /// Largest `|c_{-k} - conj(c_k)|` relative to the largest coefficient.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let max = self.coef.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return 0.0;
        }
        let n = self.grid.n();
        let mut worst: f64 = 0.0;
        for idx in 0..self.coef.len() {
            let (i, j, k) = self.grid.unravel(idx);
            // Nyquist partners are not represented as conjugate pairs
            if i == n / 2 || j == n / 2 || k == n / 2 {
                continue;
            }
            let d = (self.coef[self.grid.negate(idx)] - self.coef[idx].conj()).norm();
            worst = worst.max(d);
        }
        worst / max
    }
}

impl SpectralVector {
    pub fn zeros(grid: &Grid) -> Self {
        let z = SpectralScalar::zeros(grid);
        Self { comps: [z.clone(), z.clone(), z] }
    }

    pub fn new(comps: [SpectralScalar; 3]) -> Result<Self> {
        if comps[0].grid != comps[1].grid || comps[0].grid != comps[2].grid {
            return Err(Error::InvalidArgument("components live on different grids".into()));
        }
        Ok(Self { comps })
    }

    pub fn from_physical(grid: &Grid, values: [&[f64]; 3]) -> Result<Self> {
        Ok(Self {
            comps: [
                SpectralScalar::from_physical(grid, values[0])?,
                SpectralScalar::from_physical(grid, values[1])?,
                SpectralScalar::from_physical(grid, values[2])?,
            ],
        })
    }

    pub fn from_transform<F>(grid: &Grid, fhat: F) -> Self
    where
        F: Fn([f64; 3]) -> [Complex64; 3] + Sync,
    {
        let vol = grid.l().powi(3);
        let all: Vec<[Complex64; 3]> = (0..grid.len()).into_par_iter().map(|idx| fhat(grid.xi(idx))).collect();
        let comp = |c: usize| SpectralScalar {
            grid: grid.clone(),
            coef: all.iter().map(|v| v[c] / vol).collect(),
        };
        Self { comps: [comp(0), comp(1), comp(2)] }
    }

    pub fn grid(&self) -> &Grid {
        &self.comps[0].grid
    }

    pub fn comp(&self, i: usize) -> &SpectralScalar {
        &self.comps[i]
    }

    pub fn comp_mut(&mut self, i: usize) -> &mut SpectralScalar {
        &mut self.comps[i]
    }

    pub fn comps(&self) -> &[SpectralScalar; 3] {
        &self.comps
    }

    pub fn into_comps(self) -> [SpectralScalar; 3] {
        self.comps
    }

    pub fn to_physical(&self) -> [Vec<f64>; 3] {
        [self.comps[0].to_physical(), self.comps[1].to_physical(), self.comps[2].to_physical()]
    }

    pub fn l2_norm(&self) -> f64 {
        self.comps.iter().map(|c| c.l2_norm().powi(2)).sum::<f64>().sqrt()
    }

    /// Applies a 3-vector map per mode.
    pub fn map_modes<F>(&self, f: F) -> Self
    where
        F: Fn(usize, [Complex64; 3]) -> [Complex64; 3] + Sync,
    {
        let g = self.grid().clone();
        let all: Vec<[Complex64; 3]> = (0..g.len())
            .into_par_iter()
            .map(|i| f(i, [self.comps[0].coef[i], self.comps[1].coef[i], self.comps[2].coef[i]]))
            .collect();
        let comp = |c: usize| SpectralScalar { grid: g.clone(), coef: all.iter().map(|v| v[c]).collect() };
        Self { comps: [comp(0), comp(1), comp(2)] }
    }

    pub fn scale(&self, a: f64) -> Self {
        Self { comps: [self.comps[0].scale(a), self.comps[1].scale(a), self.comps[2].scale(a)] }
    }

    pub fn axpy(&mut self, a: f64, other: &Self) {
        for (x, y) in self.comps.iter_mut().zip(&other.comps) {
            x.axpy(a, y);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        r.axpy(1.0, other);
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut r = self.clone();
        r.axpy(-1.0, other);
        r
    }

    pub fn heat(&self, t: f64) -> Self {
        Self { comps: [self.comps[0].heat(t), self.comps[1].heat(t), self.comps[2].heat(t)] }
    }

    /// `max_ξ |ξ·û(ξ)| / max_ξ |û(ξ)|`, ignoring Nyquist components.
    pub fn divergence_defect(&self) -> f64 {
        let g = self.grid();
        let mut num: f64 = 0.0;
        let mut den: f64 = 0.0;
        for idx in 0..g.len() {
            let d = g.dxi(idx);
            let v = [self.comps[0].coef[idx], self.comps[1].coef[idx], self.comps[2].coef[idx]];
            num = num.max((v[0] * d[0] + v[1] * d[1] + v[2] * d[2]).norm());
            den = den.max((v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt());
        }
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }
}
