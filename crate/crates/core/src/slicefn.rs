//! Slice-regular functions: power series with right coefficients, the
//! star product and its inverse, slice extension, pointwise star
//! evaluation, the backward-shift operator and a discretized Cauchy formula.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{QsliceError, Result};
use crate::qlinalg::{qmat_inverse, QMatrix};
use crate::quat::{Quaternion, UnitImaginary};

/// Maximum number of coefficients kept by series operations.
pub const SERIES_CAP: usize = 64;

/// Short-circuit threshold of [`pointwise_star_eval`].
pub const STAR_ZERO_TOL: f64 = 1e-13;

/// Scalar slice evaluator used by pointwise star products.
pub type ScalarFn<'a> = dyn Fn(Quaternion) -> Result<Quaternion> + 'a;

/// `f(p) = sum (p - x0)^n a_n`, coefficients acting on the right.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSeries {
    pub center: f64,
    pub coeffs: Vec<QMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nominal_radius: Option<f64>,
}

impl PowerSeries {
    pub fn new(center: f64, coeffs: Vec<QMatrix>) -> Result<Self> {
        let s = Self {
            center,
            coeffs,
            nominal_radius: None,
        };
        s.validate()?;
        Ok(s)
    }

    /// Series with 1x1 coefficients.
    pub fn scalar(center: f64, coeffs: &[Quaternion]) -> Self {
        Self {
            center,
            coeffs: coeffs.iter().map(|&c| QMatrix::scalar(c)).collect(),
            nominal_radius: None,
        }
    }

    pub fn real_scalar(center: f64, coeffs: &[f64]) -> Self {
        let q: Vec<Quaternion> = coeffs.iter().map(|&c| Quaternion::real(c)).collect();
        Self::scalar(center, &q)
    }

    pub fn with_radius(mut self, r: f64) -> Self {
        self.nominal_radius = Some(r);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let Some(first) = self.coeffs.first() else {
            return Err(QsliceError::Domain("series needs at least one coefficient".into()));
        };
        if self.coeffs.iter().any(|c| c.shape() != first.shape()) {
            return Err(QsliceError::Domain("series coefficients differ in shape".into()));
        }
        if !self.center.is_finite() {
            return Err(QsliceError::Domain("series center must be finite".into()));
        }
        Ok(())
    }

    pub fn shape(&self) -> (usize, usize) {
        self.coeffs.first().map_or((0, 0), QMatrix::shape)
    }

    pub fn is_scalar(&self) -> bool {
        self.shape() == (1, 1)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Scalar coefficient `n` (zero past the end); panics on matrix series.
    pub fn scalar_coeff(&self, n: usize) -> Quaternion {
        assert!(self.is_scalar(), "scalar_coeff on a matrix series");
        self.coeffs.get(n).map_or(Quaternion::ZERO, |c| c[(0, 0)])
    }

    /// `true` when `p` lies outside the nominal radius of convergence.
    pub fn outside_radius(&self, p: Quaternion) -> bool {
        self.nominal_radius
            .is_some_and(|r| (p - Quaternion::real(self.center)).norm() >= r)
    }

    pub fn eval(&self, p: Quaternion) -> QMatrix {
        ps_eval(self, p)
    }

    pub fn eval_scalar(&self, p: Quaternion) -> Quaternion {
        assert!(self.is_scalar(), "eval_scalar on a matrix series");
        let d = p - Quaternion::real(self.center);
        let mut acc = Quaternion::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = c[(0, 0)] + d * acc;
        }
        acc
    }
}

/// Horner evaluation with left powers of `p - x0`.
pub fn ps_eval(f: &PowerSeries, p: Quaternion) -> QMatrix {
    let d = p - Quaternion::real(f.center);
    let (r, c) = f.shape();
    let mut acc = QMatrix::zeros(r, c);
    for a in f.coeffs.iter().rev() {
        acc = a + &acc.scale_left(d);
    }
    acc
}

/// [`ps_eval`] plus a flag raised outside the nominal radius.
pub fn ps_eval_checked(f: &PowerSeries, p: Quaternion) -> (QMatrix, bool) {
    (ps_eval(f, p), f.outside_radius(p))
}

fn same_center(f: &PowerSeries, g: &PowerSeries) -> Result<()> {
    if (f.center - g.center).abs() > 1e-15 * f.center.abs().max(1.0) {
        return Err(QsliceError::Domain(format!(
            "series centers differ ({} vs {})",
            f.center, g.center
        )));
    }
    Ok(())
}

/// Cauchy product `c_n = sum_{r<=n} a_r b_{n-r}`.
pub fn ps_star_mul(f: &PowerSeries, g: &PowerSeries) -> Result<PowerSeries> {
    same_center(f, g)?;
    if f.shape().1 != g.shape().0 {
        return Err(QsliceError::Domain("series shapes do not compose".into()));
    }
    let len = (f.len() + g.len() - 1).min(SERIES_CAP);
    let mut coeffs = Vec::with_capacity(len);
    for n in 0..len {
        let mut acc = QMatrix::zeros(f.shape().0, g.shape().1);
        for r in 0..=n {
            if let (Some(a), Some(b)) = (f.coeffs.get(r), g.coeffs.get(n - r)) {
                acc = &acc + &a.try_mul(b)?;
            }
        }
        coeffs.push(acc);
    }
    Ok(PowerSeries {
        center: f.center,
        coeffs,
        nominal_radius: min_radius(f.nominal_radius, g.nominal_radius),
    })
}

fn min_radius(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Coefficientwise conjugate `f^c` of a scalar series.
pub fn ps_conjugate(f: &PowerSeries) -> Result<PowerSeries> {
    if !f.is_scalar() {
        return Err(QsliceError::Domain(
            "star conjugate is only defined here for scalar series".into(),
        ));
    }
    Ok(PowerSeries {
        center: f.center,
        coeffs: f.coeffs.iter().map(|c| QMatrix::scalar(c[(0, 0)].conj())).collect(),
        nominal_radius: f.nominal_radius,
    })
}

/// Star inverse truncated to coefficients `b_0 .. b_order`:
/// `b_0 = a_0^{-1}`, `b_n = -a_0^{-1} sum_{r=1}^n a_r b_{n-r}`.
pub fn ps_star_inverse(f: &PowerSeries, order: usize) -> Result<PowerSeries> {
    if f.shape().0 != f.shape().1 {
        return Err(QsliceError::Domain("star inverse needs square coefficients".into()));
    }
    let a0_inv = qmat_inverse(&f.coeffs[0]).map_err(|_| QsliceError::SingularLeadingCoefficient)?;
    let len = (order + 1).min(SERIES_CAP);
    let mut b: Vec<QMatrix> = Vec::with_capacity(len);
    b.push(a0_inv.clone());
    for n in 1..len {
        let mut acc = QMatrix::zeros(f.shape().0, f.shape().1);
        for r in 1..=n.min(f.len() - 1) {
            acc = &acc + &(&f.coeffs[r] * &b[n - r]);
        }
        b.push(-&(&a0_inv * &acc));
    }
    Ok(PowerSeries {
        center: f.center,
        coeffs: b,
        nominal_radius: None,
    })
}

/// Backward shift `(R f)(p) = (p - x0)^{-1} (f(p) - f(x0))`: drops `a_0`.
pub fn rx0_apply(f: &PowerSeries) -> PowerSeries {
    let coeffs = if f.len() <= 1 {
        vec![QMatrix::zeros(f.shape().0, f.shape().1)]
    } else {
        f.coeffs[1..].to_vec()
    };
    PowerSeries {
        center: f.center,
        coeffs,
        nominal_radius: f.nominal_radius,
    }
}

/// Restriction of a slice function to the slice `C_I`; the evaluator
/// receives points of `C_I` as quaternions.
pub struct SliceRestriction<'a> {
    pub unit: UnitImaginary,
    pub eval: Box<dyn Fn(Quaternion) -> Result<QMatrix> + 'a>,
}

impl<'a> SliceRestriction<'a> {
    pub fn new(unit: UnitImaginary, eval: impl Fn(Quaternion) -> Result<QMatrix> + 'a) -> Self {
        Self {
            unit,
            eval: Box::new(eval),
        }
    }

    pub fn at(&self, x: f64, y: f64) -> Result<QMatrix> {
        (self.eval)(Quaternion::from_slice(x, y, self.unit))
    }
}

/// Extension of a slice restriction to all of `H`:
/// `ext f(x + J y) = (f(z) + f(zbar))/2 + J I (f(zbar) - f(z))/2`, `z = x + I y`.
pub fn extend_slice(f: &SliceRestriction<'_>, p: Quaternion) -> Result<QMatrix> {
    let sc = p.slice_decompose();
    let plus = f.at(sc.x, sc.y)?;
    let minus = f.at(sc.x, -sc.y)?;
    let ji = sc.unit.get() * f.unit.get();
    let even = (&plus + &minus).scale(0.5);
    let odd = (&minus - &plus).scale(0.5).scale_left(ji);
    Ok(&even + &odd)
}

/// Stem functions `(alpha, beta)` with `f(x + J y) = alpha(x, y) + J beta(x, y)`.
pub struct StemPair<'a> {
    pub alpha: Box<dyn Fn(f64, f64) -> Result<QMatrix> + 'a>,
    pub beta: Box<dyn Fn(f64, f64) -> Result<QMatrix> + 'a>,
}

impl<'a> StemPair<'a> {
    /// Stem pair of a function known on the slice `C_i`:
    /// `alpha = (f(z) + f(zbar))/2`, `beta = -i (f(z) - f(zbar))/2`.
    pub fn from_slice_fn(f: impl Fn(Quaternion) -> Result<QMatrix> + Clone + 'a) -> Self {
        let g = f.clone();
        Self {
            alpha: Box::new(move |x, y| {
                let a = f(Quaternion::new(x, y, 0.0, 0.0))?;
                let b = f(Quaternion::new(x, -y, 0.0, 0.0))?;
                Ok((&a + &b).scale(0.5))
            }),
            beta: Box::new(move |x, y| {
                let a = g(Quaternion::new(x, y, 0.0, 0.0))?;
                let b = g(Quaternion::new(x, -y, 0.0, 0.0))?;
                Ok((&a - &b).scale(0.5).scale_left(-Quaternion::I))
            }),
        }
    }

    pub fn from_series(f: &'a PowerSeries) -> Self {
        Self::from_slice_fn(move |z| Ok(ps_eval(f, z)))
    }

    pub fn eval(&self, p: Quaternion) -> Result<QMatrix> {
        let sc = p.slice_decompose();
        let a = (self.alpha)(sc.x, sc.y)?;
        let b = (self.beta)(sc.x, sc.y)?;
        Ok(&a + &b.scale_left(sc.unit.get()))
    }
}

/// Shared evaluator of a matrix-valued slice function.
pub type SliceEvaluator = Arc<dyn Fn(Quaternion) -> Result<QMatrix> + Send + Sync>;
/// Shared evaluator known only on the real axis.
pub type RealEvaluator = Arc<dyn Fn(f64) -> Result<QMatrix> + Send + Sync>;

/// A matrix-valued function with a known evaluation domain.
#[derive(Clone)]
pub enum SliceMatrixFn {
    /// Power series, evaluated directly at any quaternion.
    Series(PowerSeries),
    /// Slice-regular evaluator valid at every quaternion of its domain.
    Slice(SliceEvaluator),
    /// Values known on the real axis only.
    RealAxis(RealEvaluator),
}

impl std::fmt::Debug for SliceMatrixFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Series(s) => f.debug_tuple("Series").field(s).finish(),
            Self::Slice(_) => f.write_str("Slice(..)"),
            Self::RealAxis(_) => f.write_str("RealAxis(..)"),
        }
    }
}

impl SliceMatrixFn {
    pub fn slice(f: impl Fn(Quaternion) -> Result<QMatrix> + Send + Sync + 'static) -> Self {
        Self::Slice(Arc::new(f))
    }

    pub fn real_axis(f: impl Fn(f64) -> Result<QMatrix> + Send + Sync + 'static) -> Self {
        Self::RealAxis(Arc::new(f))
    }

    /// Scalar slice function given by a quaternion-valued evaluator.
    pub fn scalar(f: impl Fn(Quaternion) -> Result<Quaternion> + Send + Sync + 'static) -> Self {
        Self::slice(move |p| f(p).map(QMatrix::scalar))
    }

    pub fn real_axis_only(&self) -> bool {
        matches!(self, Self::RealAxis(_))
    }

    pub fn eval(&self, p: Quaternion) -> Result<QMatrix> {
        let v = match self {
            Self::Series(s) => ps_eval(s, p),
            Self::Slice(f) => f(p)?,
            Self::RealAxis(f) => {
                if p.im_norm() != 0.0 {
                    return Err(QsliceError::UnsupportedEvaluation(
                        "function is only known on the real axis".into(),
                    ));
                }
                f(p.re())?
            }
        };
        if !v.is_finite() {
            return Err(QsliceError::Evaluation(format!("non-finite value at {p}")));
        }
        Ok(v)
    }
}

/// Result of a pointwise star fold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StarValue {
    pub value: Quaternion,
    /// Set when an intermediate product fell below the zero threshold and
    /// the fold short-circuited to zero.
    pub short_circuited: bool,
}

/// Left fold of `(f * g)(p) = f(p) g(f(p)^{-1} p f(p))` over scalar factors.
///
/// The running product `v` twists the original point: the next factor is
/// evaluated at `v^{-1} p v`.
pub fn pointwise_star_eval(factors: &[&ScalarFn<'_>], p: Quaternion) -> Result<StarValue> {
    let Some((first, rest)) = factors.split_first() else {
        return Ok(StarValue {
            value: Quaternion::ONE,
            short_circuited: false,
        });
    };
    let mut v = first(p)?;
    for g in rest {
        if v.norm() < STAR_ZERO_TOL {
            return Ok(StarValue {
                value: Quaternion::ZERO,
                short_circuited: true,
            });
        }
        let q = p.twist(v)?;
        v *= g(q)?;
    }
    Ok(StarValue {
        value: v,
        short_circuited: false,
    })
}

/// Default trapezoid node count for [`cauchy_eval`].
pub const CAUCHY_NODES: usize = 256;

/// Trapezoid discretization of the slice Cauchy formula on the circle of
/// `radius` about the real `center` in `C_I`:
/// `f(p) = (1/N) sum S_L^{-1}(s_k, p) (s_k - center) f(s_k)` with
/// `S_L^{-1}(s, p) = -(p^2 - 2 Re(s) p + |s|^2)^{-1} (p - sbar)`.
pub fn cauchy_eval(
    f: &SliceRestriction<'_>,
    p: Quaternion,
    center: f64,
    radius: f64,
    nodes: usize,
) -> Result<QMatrix> {
    if !(radius > 0.0) || nodes == 0 {
        return Err(QsliceError::Domain("radius and node count must be positive".into()));
    }
    let sc = p.slice_decompose();
    let dist = (sc.x - center).hypot(sc.y);
    if !(dist < radius * (1.0 - 1e-12)) {
        return Err(QsliceError::Domain(
            "the sphere of p is not inside the integration circle".into(),
        ));
    }
    let unit = f.unit.get();
    let p2 = p * p;
    let mut acc: Option<QMatrix> = None;
    for k in 0..nodes {
        let theta = 2.0 * PI * k as f64 / nodes as f64;
        let (s_sin, s_cos) = theta.sin_cos();
        let offset = Quaternion::real(radius * s_cos) + unit * (radius * s_sin);
        let s = Quaternion::real(center) + offset;
        let pencil = p2 - p * (2.0 * s.re()) + Quaternion::real(s.norm_sqr());
        let kernel = -(pencil.inverse()? * (p - s.conj()));
        let term = (f.eval)(s)?.scale_left(kernel * offset);
        acc = Some(match acc {
            Some(a) => &a + &term,
            None => term,
        });
    }
    Ok(acc.expect("nodes > 0").scale(1.0 / nodes as f64))
}
