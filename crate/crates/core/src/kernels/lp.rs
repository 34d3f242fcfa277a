use std::f64::consts::PI;

use super::{mat_norm, tensor_norm, DivKernel, FracHeatKernel, HeatKernel, OseenKernel};
use crate::error::{Error, Result};
use crate::quadrature::GaussRule;

/// Kernels whose Lᵖ norms can be measured. Matrix and tensor kernels use the
/// pointwise Frobenius norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    /// `G(t,·)` of `e^{-t(-Δ)^α}`.
    Frac { alpha: f64 },
    /// `∇G(t,·)`.
    FracGrad { alpha: f64 },
    /// Oseen kernel `K(t,·)`.
    Oseen,
    /// `F(t,·) = ∇K(t,·)`.
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpOrder {
    Finite(f64),
    Infinity,
}

impl LpOrder {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(LpOrder::Infinity)
        } else if p >= 1.0 {
            Ok(LpOrder::Finite(p))
        } else {
            Err(Error::InvalidArgument(format!("Lp order must lie in [1, ∞], got {p}")))
        }
    }

    /// `1/p`, zero for `p = ∞`.
    pub fn reciprocal(&self) -> f64 {
        match self {
            LpOrder::Finite(p) => 1.0 / p,
            LpOrder::Infinity => 0.0,
        }
    }
}

/// Doublings after which the 5% growth test for non-integrability is applied.
const DOUBLINGS_BEFORE_TEST: usize = 8;
const GROWTH_THRESHOLD: f64 = 0.05;
const MAX_DOUBLINGS: usize = 40;

/// Pointwise magnitude `|k(t, r e₁)|` together with a flag telling whether the
/// value is above the evaluator's own error floor.
struct Magnitude {
    kind: KernelKind,
    t: f64,
    heat: Option<HeatKernel>,
    frac: Option<FracHeatKernel>,
    oseen: Option<OseenKernel>,
    div: Option<DivKernel>,
}

impl Magnitude {
    fn new(kind: KernelKind, t: f64) -> Result<Self> {
        let mut m = Magnitude { kind, t, heat: None, frac: None, oseen: None, div: None };
        match kind {
            KernelKind::Frac { alpha } | KernelKind::FracGrad { alpha } => {
                if alpha == 1.0 {
                    m.heat = Some(HeatKernel::new(t)?);
                } else {
                    m.frac = Some(FracHeatKernel::new(alpha)?);
                }
            }
            KernelKind::Oseen => m.oseen = Some(OseenKernel::new(t)?),
            KernelKind::Div => m.div = Some(DivKernel::new(t)?),
        }
        Ok(m)
    }

    /// Natural length scale `t^{1/(2α)}`.
    fn scale(&self) -> f64 {
        match self.kind {
            KernelKind::Frac { alpha } | KernelKind::FracGrad { alpha } => self.t.powf(0.5 / alpha),
            _ => self.t.sqrt(),
        }
    }

    fn at(&self, r: f64) -> Result<f64> {
        let x = [r, 0.0, 0.0];
        Ok(match self.kind {
            KernelKind::Frac { .. } => match (&self.heat, &self.frac) {
                (Some(h), _) => h.radial(r),
                (_, Some(g)) => g.radial(self.t, r)?.abs(),
                _ => unreachable!(),
            },
            KernelKind::FracGrad { .. } => match (&self.heat, &self.frac) {
                (Some(h), _) => h.radial_derivative(r).abs(),
                (_, Some(g)) => g.radial_derivative(self.t, r)?.abs(),
                _ => unreachable!(),
            },
            KernelKind::Oseen => mat_norm(&self.oseen.as_ref().unwrap().eval(&x)?),
            KernelKind::Div => tensor_norm(&self.div.as_ref().unwrap().eval(&x)?),
        })
    }
}

fn shell_integral(
    m: &dyn Fn(f64) -> Result<f64>,
    rule: &GaussRule,
    a: f64,
    b: f64,
    panels: usize,
    p: f64,
) -> Result<f64> {
    let mut sum = 0.0;
    let w = (b - a) / panels as f64;
    for i in 0..panels {
        let lo = a + w * i as f64;
        for (r, wt) in rule.mapped(lo, lo + w) {
            sum += wt * 4.0 * PI * r * r * m(r)?.powf(p);
        }
    }
    Ok(sum)
}

fn sup_norm(m: &dyn Fn(f64) -> Result<f64>, scale: f64) -> Result<f64> {
    let n = 400;
    let hi = 8.0 * scale;
    let mut best = (0.0, m(0.0)?);
    for i in 1..=n {
        let r = hi * i as f64 / n as f64;
        let v = m(r)?;
        if v > best.1 {
            best = (r, v);
        }
    }
    // golden-section refinement around the best sample
    let h = hi / n as f64;
    let (mut a, mut b) = ((best.0 - h).max(0.0), best.0 + h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (m(c)?, m(d)?);
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = m(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = m(d)?;
        }
    }
    Ok(best.1.max(fc).max(fd))
}

/// Lᵖ(ℝ³) norm of a radial magnitude `m(|x|)` with natural length `scale`.
///
/// The radial integral is accumulated over `[0, R]` with `R` doubled from
/// eight natural length scales. After eight doublings a relative growth of 5%
/// or more per doubling is reported as [`Error::NonIntegrable`].
pub fn radial_lp_norm(m: &dyn Fn(f64) -> Result<f64>, scale: f64, p: LpOrder) -> Result<f64> {
    let p = match p {
        LpOrder::Infinity => return sup_norm(m, scale),
        LpOrder::Finite(p) if p >= 1.0 => p,
        LpOrder::Finite(p) => {
            return Err(Error::InvalidArgument(format!("Lp order must lie in [1, ∞], got {p}")))
        }
    };
    let rule = GaussRule::new(16);
    let mut r = 8.0 * scale;
    let mut total = shell_integral(m, &rule, 0.0, r, 32, p)?;
    for k in 1..=MAX_DOUBLINGS {
        let add = shell_integral(m, &rule, r, 2.0 * r, 16, p)?;
        r *= 2.0;
        let growth = if total == 0.0 { 0.0 } else { add / total };
        total += add;
        if !total.is_finite() {
            return Err(Error::NonIntegrable { growth: f64::INFINITY });
        }
        if k >= DOUBLINGS_BEFORE_TEST && growth >= GROWTH_THRESHOLD {
            return Err(Error::NonIntegrable { growth });
        }
        if growth < 1e-10 {
            break;
        }
    }
    Ok(total.powf(1.0 / p))
}

/// Lᵖ(ℝ³) norm of a kernel at time `t`, see [`radial_lp_norm`].
pub fn kernel_lp_norm(kind: KernelKind, t: f64, p: LpOrder) -> Result<f64> {
    let m = Magnitude::new(kind, t)?;
    radial_lp_norm(&|r| m.at(r), m.scale(), p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slope(kind: KernelKind, p: LpOrder, t0: f64) -> f64 {
        let a = kernel_lp_norm(kind, t0, p).unwrap();
        let b = kernel_lp_norm(kind, 10.0 * t0, p).unwrap();
        (b / a).log10()
    }

    #[test]
    fn gaussian_unit_mass() {
        for &t in &[0.5, 3.0] {
            let v = kernel_lp_norm(KernelKind::Frac { alpha: 1.0 }, t, LpOrder::Finite(1.0)).unwrap();
            assert!((v - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn gaussian_l2_closed_form() {
        let v = kernel_lp_norm(KernelKind::Frac { alpha: 1.0 }, 2.0, LpOrder::Finite(2.0)).unwrap();
        assert!((v - (16.0 * PI).powf(-0.75)).abs() < 1e-12);
    }

    #[test]
    fn div_kernel_slopes() {
        for &p in &[1.5, 2.0, 6.0] {
            let s = slope(KernelKind::Div, LpOrder::Finite(p), 0.5);
            assert!((s - (-2.0 + 1.5 / p)).abs() < 0.02, "p={p} slope={s}");
        }
    }

    #[test]
    fn frac_slopes() {
        for &alpha in &[0.75, 1.0] {
            for p in [LpOrder::Finite(2.0), LpOrder::Infinity] {
                let want = -(1.5 / alpha) * (1.0 - p.reciprocal());
                let s = slope(KernelKind::Frac { alpha }, p, 0.5);
                assert!((s - want).abs() < 0.02, "α={alpha} {p:?} slope={s}");
                let want = -0.5 / alpha - (1.5 / alpha) * (1.0 - p.reciprocal());
                let s = slope(KernelKind::FracGrad { alpha }, p, 0.5);
                assert!((s - want).abs() < 0.02, "∇ α={alpha} {p:?} slope={s}");
            }
        }
    }

    #[test]
    fn oseen_l1_is_flagged() {
        match kernel_lp_norm(KernelKind::Oseen, 1.0, LpOrder::Finite(1.0)) {
            Err(Error::NonIntegrable { growth }) => assert!(growth >= GROWTH_THRESHOLD),
            other => panic!("expected non-integrable, got {other:?}"),
        }
        assert!(kernel_lp_norm(KernelKind::Oseen, 1.0, LpOrder::Finite(2.0)).is_ok());
    }

    #[test]
    fn rejects_bad_order() {
        assert!(LpOrder::new(0.5).is_err());
        assert_eq!(LpOrder::new(f64::INFINITY).unwrap(), LpOrder::Infinity);
    }
}
