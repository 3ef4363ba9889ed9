//! Hardy space of the right half-space: slice inner products by
//! quadrature over the boundary line `I y`, reproducing-kernel residuals,
//! an orthonormal basis, and norm checks.

use std::f64::consts::PI;
use std::sync::Arc;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::blaschke::BlaschkeFactor;
use crate::error::{QsliceError, Result};
use crate::kernel::k_eval;
use crate::quat::{Quaternion, UnitImaginary};
use crate::slicefn::{pointwise_star_eval, PowerSeries, ScalarFn};

/// Points per Gauss-Legendre panel.
pub const PANEL_ORDER: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureScheme {
    CompositeSimpson,
    GaussLegendrePanels,
}

/// Discretization of `int_{-R}^{R} dy` plus an analytic tail estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub cutoff: f64,
    pub nodes: usize,
    pub scheme: QuadratureScheme,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            cutoff: 1e4,
            nodes: 200_000,
            scheme: QuadratureScheme::CompositeSimpson,
        }
    }
}

impl QuadratureSpec {
    pub fn simpson(cutoff: f64, nodes: usize) -> Self {
        Self {
            cutoff,
            nodes,
            scheme: QuadratureScheme::CompositeSimpson,
        }
    }

    pub fn gauss_legendre(cutoff: f64, nodes: usize) -> Self {
        Self {
            cutoff,
            nodes,
            scheme: QuadratureScheme::GaussLegendrePanels,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cutoff > 0.0) || !self.cutoff.is_finite() {
            return Err(QsliceError::Domain("quadrature cutoff must be positive".into()));
        }
        match self.scheme {
            QuadratureScheme::CompositeSimpson if self.nodes < 2 || !self.nodes.is_multiple_of(2) => {
                Err(QsliceError::Domain("Simpson needs an even, positive node count".into()))
            }
            QuadratureScheme::GaussLegendrePanels if self.nodes < PANEL_ORDER => Err(QsliceError::Domain(
                format!("Gauss-Legendre panels need at least {PANEL_ORDER} nodes"),
            )),
            _ => Ok(()),
        }
    }

    /// `(y, weight)` pairs on `[-R, R]`.
    pub fn rule(&self) -> Result<Vec<(f64, f64)>> {
        self.validate()?;
        let r = self.cutoff;
        match self.scheme {
            QuadratureScheme::CompositeSimpson => {
                let n = self.nodes;
                let h = 2.0 * r / n as f64;
                Ok((0..=n)
                    .map(|k| {
                        let w = if k == 0 || k == n {
                            1.0
                        } else if k % 2 == 1 {
                            4.0
                        } else {
                            2.0
                        };
                        (-r + k as f64 * h, w * h / 3.0)
                    })
                    .collect())
            }
            QuadratureScheme::GaussLegendrePanels => {
                let gl = GaussLegendre::new(PANEL_ORDER).expect("order >= 2");
                let panels = self.nodes / PANEL_ORDER;
                let width = 2.0 * r / panels as f64;
                let mut out = Vec::with_capacity(panels * PANEL_ORDER);
                for k in 0..panels {
                    let mid = -r + (k as f64 + 0.5) * width;
                    for &(x, w) in gl.as_node_weight_pairs() {
                        out.push((mid + 0.5 * width * x, 0.5 * width * w));
                    }
                }
                Ok(out)
            }
        }
    }
}

/// `int_R^inf h` for `h ~ C |y|^{-e}`, from the endpoint samples.
fn tail(r: f64, h_plus: Quaternion, h_minus: Quaternion, exponent: f64) -> Quaternion {
    (h_plus + h_minus) * (r / (exponent - 1.0))
}

pub type HardyEvaluator = Arc<dyn Fn(Quaternion) -> Result<Quaternion> + Send + Sync>;

/// Scalar slice-regular function on the right half-space with asserted
/// boundary decay `|f(I y)| = O(|y|^{-decay})`.
#[derive(Clone)]
pub struct HardyFunction {
    eval: HardyEvaluator,
    pub decay: f64,
}

impl std::fmt::Debug for HardyFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HardyFunction").field("decay", &self.decay).finish_non_exhaustive()
    }
}

impl HardyFunction {
    pub fn new(decay: f64, f: impl Fn(Quaternion) -> Result<Quaternion> + Send + Sync + 'static) -> Result<Self> {
        if !(decay >= 1.0) {
            return Err(QsliceError::Domain("decay exponent must be at least 1".into()));
        }
        Ok(Self {
            eval: Arc::new(f),
            decay,
        })
    }

    pub fn eval(&self, p: Quaternion) -> Result<Quaternion> {
        let v = (self.eval)(p)?;
        if !v.is_finite() {
            return Err(QsliceError::Evaluation(format!("non-finite value at {p}")));
        }
        Ok(v)
    }

    /// `(p + c)^{-*}` for `Re c > 0`.
    pub fn shifted_inverse(c: Quaternion) -> Result<Self> {
        RationalSlice::new(vec![PoleTerm { c, a: Quaternion::ONE }]).map(|r| r.to_hardy())
    }

    /// Basis element `Phi_n`.
    pub fn onb(n: usize) -> Self {
        Self::new(1.0, move |p| onb_eval(n, p)).expect("decay 1")
    }

    /// `p -> k(p, q0)`.
    pub fn kernel_column(q0: Quaternion) -> Result<Self> {
        if !(q0.re() > 0.0) {
            return Err(QsliceError::Domain("kernel column needs Re q0 > 0".into()));
        }
        Self::new(1.0, move |p| k_eval(p, q0))
    }

    /// `b_a * f` via the pointwise star fold.
    pub fn blaschke_multiple(&self, b: BlaschkeFactor) -> Self {
        let f = self.clone();
        Self {
            decay: self.decay,
            eval: Arc::new(move |p| {
                let bf = |x: Quaternion| b.eval(x);
                let ff = |x: Quaternion| f.eval(x);
                let factors: [&ScalarFn<'_>; 2] = [&bf, &ff];
                Ok(pointwise_star_eval(&factors, p)?.value)
            }),
        }
    }

    /// Values at `x + I y` on the quadrature nodes, followed by the two
    /// endpoint values at `y = R` and `y = -R`.
    fn line_samples(&self, unit: UnitImaginary, x: f64, rule: &[(f64, f64)], r: f64) -> Result<Vec<Quaternion>> {
        rule.iter()
            .map(|&(y, _)| y)
            .chain([r, -r])
            .map(|y| self.eval(Quaternion::from_slice(x, y, unit)))
            .collect()
    }
}

/// Inner product value with its tail estimate already included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerProduct {
    pub value: Quaternion,
    pub tail: Quaternion,
}

fn integrate_samples(
    f: &[Quaternion],
    g: &[Quaternion],
    rule: &[(f64, f64)],
    r: f64,
    exponent: f64,
) -> InnerProduct {
    let n = rule.len();
    let mut acc = Quaternion::ZERO;
    for k in 0..n {
        acc += g[k].conj() * f[k] * rule[k].1;
    }
    let t = tail(r, g[n].conj() * f[n], g[n + 1].conj() * f[n + 1], exponent);
    InnerProduct {
        value: acc + t,
        tail: t,
    }
}

/// `int conj(g(x + I y)) f(x + I y) dy` with tail estimate.
pub fn hardy_inner_line(
    f: &HardyFunction,
    g: &HardyFunction,
    unit: UnitImaginary,
    x: f64,
    q: &QuadratureSpec,
) -> Result<InnerProduct> {
    let rule = q.rule()?;
    let fs = f.line_samples(unit, x, &rule, q.cutoff)?;
    let gs = g.line_samples(unit, x, &rule, q.cutoff)?;
    Ok(integrate_samples(&fs, &gs, &rule, q.cutoff, f.decay + g.decay))
}

/// `<f, g>_I = int conj(g(I y)) f(I y) dy`.
pub fn hardy_inner(f: &HardyFunction, g: &HardyFunction, unit: UnitImaginary, q: &QuadratureSpec) -> Result<Quaternion> {
    Ok(hardy_inner_line(f, g, unit, 0.0, q)?.value)
}

/// `int |f(x + I y)|^2 dy`.
pub fn line_norm_sqr(f: &HardyFunction, unit: UnitImaginary, x: f64, q: &QuadratureSpec) -> Result<f64> {
    Ok(hardy_inner_line(f, f, unit, x, q)?.value.re())
}

/// Slice norm `||f||_I`.
pub fn hardy_norm(f: &HardyFunction, unit: UnitImaginary, q: &QuadratureSpec) -> Result<f64> {
    Ok(line_norm_sqr(f, unit, 0.0, q)?.max(0.0).sqrt())
}

/// Gram matrix `<f_j, f_i>_I` of a family, sampled once per function.
pub fn hardy_gram(fs: &[HardyFunction], unit: UnitImaginary, q: &QuadratureSpec) -> Result<Vec<Vec<Quaternion>>> {
    let rule = q.rule()?;
    let samples = fs
        .iter()
        .map(|f| f.line_samples(unit, 0.0, &rule, q.cutoff))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..fs.len())
        .map(|i| {
            (0..fs.len())
                .map(|j| {
                    let e = fs[i].decay + fs[j].decay;
                    integrate_samples(&samples[j], &samples[i], &rule, q.cutoff, e).value
                })
                .collect()
        })
        .collect())
}

/// `|f(p) - (1/2 pi) int k(p, I y) f(I y) dy|` integrated over `unit`.
pub fn reproducing_residual_on(
    f: &HardyFunction,
    p: Quaternion,
    unit: UnitImaginary,
    q: &QuadratureSpec,
) -> Result<f64> {
    if !(p.re() > 0.0) {
        return Err(QsliceError::Domain(format!("{p} is not in the right half-space")));
    }
    let rule = q.rule()?;
    let r = q.cutoff;
    let fs = f.line_samples(unit, 0.0, &rule, r)?;
    let ks = rule
        .iter()
        .map(|&(y, _)| y)
        .chain([r, -r])
        .map(|y| k_eval(p, Quaternion::from_slice(0.0, y, unit)))
        .collect::<Result<Vec<_>>>()?;
    let n = rule.len();
    let mut acc = Quaternion::ZERO;
    for k in 0..n {
        acc += ks[k] * fs[k] * rule[k].1;
    }
    acc += tail(r, ks[n] * fs[n], ks[n + 1] * fs[n + 1], 1.0 + f.decay);
    Ok((f.eval(p)? - acc / (2.0 * PI)).norm())
}

/// Reproducing residual over the slice of `p` (`i` for real `p`).
pub fn reproducing_residual(f: &HardyFunction, p: Quaternion, q: &QuadratureSpec) -> Result<f64> {
    reproducing_residual_on(f, p, p.slice_unit(), q)
}

/// `Phi_n(p) = pi^{-1/2} (p - 1)^n (p + 1)^{-(n+1)}`.
pub fn onb_eval(n: usize, p: Quaternion) -> Result<Quaternion> {
    let inv = (p + Quaternion::ONE).inverse().map_err(|_| QsliceError::SingularPoint)?;
    let mut v = inv * PI.sqrt().recip();
    let m = p - Quaternion::ONE;
    for _ in 0..n {
        v = v * m * inv;
    }
    Ok(v)
}

/// `sum_{n < count} Phi_n(p) conj(Phi_n(q))`, which tends to `k(p, q) / 2 pi`.
pub fn onb_partial_kernel(count: usize, p: Quaternion, q: Quaternion) -> Result<Quaternion> {
    let mut acc = Quaternion::ZERO;
    for n in 0..count {
        acc += onb_eval(n, p)? * onb_eval(n, q)?.conj();
    }
    Ok(acc)
}

/// `||f||_J / ||f||_I`.
pub fn norm_equivalence_check(
    f: &HardyFunction,
    i: UnitImaginary,
    j: UnitImaginary,
    q: &QuadratureSpec,
) -> Result<f64> {
    let ni = hardy_norm(f, i, q)?;
    if ni == 0.0 {
        return Err(QsliceError::Domain("zero slice norm".into()));
    }
    Ok(hardy_norm(f, j, q)? / ni)
}

/// `(p + c)^{-*} a`, a pole on the sphere of `-conj(c)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleTerm {
    pub c: Quaternion,
    pub a: Quaternion,
}

impl PoleTerm {
    /// `(p^2 + 2 Re(c) p + |c|^2)^{-1} (p + conj(c)) a`.
    pub fn eval(&self, p: Quaternion) -> Result<Quaternion> {
        let d = p * p + p * (2.0 * self.c.re()) + Quaternion::real(self.c.norm_sqr());
        let di = d.inverse().map_err(|_| QsliceError::SingularPoint)?;
        Ok(di * (p + self.c.conj()) * self.a)
    }

    /// Term whose series has conjugated coefficients:
    /// `c' = abar cbar abar^{-1}`, `a' = abar`.
    pub fn conjugate(&self) -> Self {
        if self.a.norm() == 0.0 {
            return *self;
        }
        let ab = self.a.conj();
        let inv = ab.inverse().expect("nonzero");
        Self {
            c: ab * self.c.conj() * inv,
            a: ab,
        }
    }
}

/// Finite sum of pole terms with poles in the left half-space; the
/// star-conjugate is again of this form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalSlice {
    pub terms: Vec<PoleTerm>,
}

impl RationalSlice {
    pub fn new(terms: Vec<PoleTerm>) -> Result<Self> {
        if terms.iter().any(|t| !(t.c.re() > 0.0)) {
            return Err(QsliceError::Domain("pole terms need Re c > 0".into()));
        }
        Ok(Self { terms })
    }

    pub fn eval(&self, p: Quaternion) -> Result<Quaternion> {
        self.terms.iter().map(|t| t.eval(p)).sum()
    }

    pub fn conjugate(&self) -> Self {
        Self {
            terms: self.terms.iter().map(PoleTerm::conjugate).collect(),
        }
    }

    /// Taylor series at real `center > 0`: coefficient `n` of term
    /// `(p + c)^{-*} a` is `(-1)^n (center + c)^{-(n+1)} a`.
    pub fn taylor(&self, center: f64, order: usize) -> Result<PowerSeries> {
        let mut coeffs = vec![Quaternion::ZERO; order + 1];
        let mut radius = f64::INFINITY;
        for t in &self.terms {
            let d = t.c + Quaternion::real(center);
            radius = radius.min(d.norm());
            let di = d.inverse()?;
            let mut pw = di;
            for (n, c) in coeffs.iter_mut().enumerate() {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                *c += pw * t.a * sign;
                pw *= di;
            }
        }
        Ok(PowerSeries::scalar(center, &coeffs).with_radius(radius))
    }

    pub fn to_hardy(&self) -> HardyFunction {
        let r = self.clone();
        HardyFunction::new(1.0, move |p| r.eval(p)).expect("decay 1")
    }
}

/// `| ||f||_I - ||f^c||_I |`.
pub fn conjugate_norm_check(f: &RationalSlice, unit: UnitImaginary, q: &QuadratureSpec) -> Result<f64> {
    let a = hardy_norm(&f.to_hardy(), unit, q)?;
    let b = hardy_norm(&f.conjugate().to_hardy(), unit, q)?;
    Ok((a - b).abs())
}

/// `max_I | ||b_a * f||_I - ||f||_I |` over the given slices.
pub fn blaschke_isometry_check(
    a: Quaternion,
    f: &HardyFunction,
    slices: &[UnitImaginary],
    q: &QuadratureSpec,
) -> Result<f64> {
    let bf = f.blaschke_multiple(BlaschkeFactor::new(a)?);
    let mut worst = 0.0f64;
    for &unit in slices {
        worst = worst.max((hardy_norm(&bf, unit, q)? - hardy_norm(f, unit, q)?).abs());
    }
    Ok(worst)
}
