//! Gauss–Legendre rules, adaptive panel integration and graded panel layouts.

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// A fixed Gauss–Legendre rule that can be mapped onto arbitrary panels.
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Adaptive bisection driven by the difference between a 10- and a 20-point rule.
#[derive(Debug, Clone)]
pub struct Adaptive {
    coarse: GaussRule,
    fine: GaussRule,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: usize,
}

/// Value and achieved error estimate of an adaptive integral.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Adaptive {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            coarse: GaussRule::new(10),
            fine: GaussRule::new(20),
            abs_tol,
            rel_tol,
            max_depth: 40,
        }
    }

    /// Integrates over the union of consecutive panels given by `breaks`.
    pub fn integrate_panels<F: FnMut(f64) -> f64>(&self, breaks: &[f64], mut f: F) -> Result<Estimate> {
        let mut stack: Vec<(f64, f64, usize)> = breaks
            .windows(2)
            .rev()
            .map(|w| (w[0], w[1], 0))
            .collect();
        let total_len = (breaks[breaks.len() - 1] - breaks[0]).abs().max(f64::MIN_POSITIVE);
        let magnitude: f64 = breaks
            .windows(2)
            .map(|w| self.fine.integrate(w[0], w[1], &mut f).abs())
            .sum();
        let budget = self.abs_tol.max(self.rel_tol * magnitude);
        let mut value = 0.0;
        let mut error = 0.0;
        let mut unresolved = 0.0f64;
        while let Some((a, b, depth)) = stack.pop() {
            let c = self.coarse.integrate(a, b, &mut f);
            let fine = self.fine.integrate(a, b, &mut f);
            let err = (fine - c).abs();
            let allowed = budget * (b - a).abs() / total_len;
            if err <= allowed || depth >= self.max_depth {
                if err > allowed {
                    unresolved += err;
                }
                value += fine;
                error += err;
            } else {
                let m = 0.5 * (a + b);
                stack.push((m, b, depth + 1));
                stack.push((a, m, depth + 1));
            }
        }
        let tolerance = budget;
        if !value.is_finite() || unresolved > tolerance {
            return Err(Error::QuadratureNonConvergence {
                estimate: if value.is_finite() { error } else { f64::INFINITY },
                tolerance,
            });
        }
        Ok(Estimate { value, error })
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, f: F) -> Result<Estimate> {
        self.integrate_panels(&[a, b], f)
    }
}

/// Panel breakpoints on `[a, b]` whose widths grow geometrically away from `b`.
///
/// The panel touching `b` has width `finest`; each panel further from `b` is
/// `ratio` times wider until `max_width` is reached. The panel touching `a`
/// absorbs the remainder.
pub fn graded_breakpoints(a: f64, b: f64, finest: f64, max_width: f64, ratio: f64) -> Vec<f64> {
    assert!(b > a && finest > 0.0 && max_width >= finest && ratio >= 1.0);
    let mut pts = vec![b];
    let mut width = finest;
    let mut s = b;
    loop {
        let next = s - width;
        // merge a sliver smaller than a quarter panel into the last panel
        if next <= a + 0.25 * width {
            break;
        }
        pts.push(next);
        s = next;
        width = (width * ratio).min(max_width);
    }
    pts.push(a);
    pts.reverse();
    pts
}

/// Merges extra breakpoints lying strictly inside `(pts[0], pts[last])`.
pub fn merge_breakpoints(pts: &[f64], extra: &[f64]) -> Vec<f64> {
    let a = pts[0];
    let b = pts[pts.len() - 1];
    let span = b - a;
    let mut all: Vec<f64> = pts.to_vec();
    all.extend(extra.iter().copied().filter(|&x| x > a && x < b));
    all.sort_by(|x, y| x.partial_cmp(y).unwrap());
    all.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * span.max(1.0));
    all
}
