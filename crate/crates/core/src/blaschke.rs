//! Blaschke factors of the right half-space, their star products and the
//! construction of products with prescribed zeros.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QsliceError, Result};
use crate::quat::Quaternion;
use crate::sample;
use crate::slicefn::{pointwise_star_eval, ps_star_inverse, ps_star_mul, PowerSeries, StarValue};

/// Points closer than this (in sphere distance) to a pole sphere are rejected.
pub const POLE_TOL: f64 = 1e-12;

/// Residual allowed at a prescribed zero.
pub const ZERO_CHECK_TOL: f64 = 1e-9;

fn intrinsic_denominator(a: Quaternion, p: Quaternion) -> Result<Quaternion> {
    // pole sphere [-a]
    if (p.re() + a.re()).hypot(p.im_norm() - a.im_norm()) < POLE_TOL {
        return Err(QsliceError::SingularPoint);
    }
    let den = p * p + p * (2.0 * a.re()) + Quaternion::real(a.norm_sqr());
    den.inverse().map_err(|_| QsliceError::SingularPoint)
}

fn require_halfspace(a: Quaternion) -> Result<()> {
    if !(a.re() > 0.0) || !a.is_finite() {
        return Err(QsliceError::Domain(format!("{a} is not in the right half-space")));
    }
    Ok(())
}

/// `b_a(p) = (p^2 + 2 Re(a) p + |a|^2)^{-1} (p^2 - a^2)`, vanishing at `a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Quaternion", into = "Quaternion")]
pub struct BlaschkeFactor {
    a: Quaternion,
}

impl TryFrom<Quaternion> for BlaschkeFactor {
    type Error = QsliceError;
    fn try_from(a: Quaternion) -> Result<Self> {
        Self::new(a)
    }
}

impl From<BlaschkeFactor> for Quaternion {
    fn from(f: BlaschkeFactor) -> Self {
        f.a
    }
}

impl BlaschkeFactor {
    pub fn new(a: Quaternion) -> Result<Self> {
        require_halfspace(a)?;
        Ok(Self { a })
    }

    pub fn zero(&self) -> Quaternion {
        self.a
    }

    pub fn eval(&self, p: Quaternion) -> Result<Quaternion> {
        let a = self.a;
        Ok(intrinsic_denominator(a, p)? * (p * p - a * a))
    }

    /// Boundary form `(I y + abar)^{-1} (I y - a)`.
    pub fn boundary_twisted(&self, iy: Quaternion) -> Result<Quaternion> {
        let den = iy + self.a.conj();
        Ok(den.inverse().map_err(|_| QsliceError::SingularPoint)? * (iy - self.a))
    }

    /// Taylor coefficients about a real `center`, `order + 1` terms.
    pub fn series(&self, center: f64, order: usize) -> Result<PowerSeries> {
        let a = self.a;
        let num = quadratic_series(center, -(a * a), Quaternion::ZERO);
        let den = quadratic_series(
            center,
            Quaternion::real(a.norm_sqr()),
            Quaternion::real(2.0 * a.re()),
        );
        let inv = ps_star_inverse(&den, order)?;
        let mut s = ps_star_mul(&inv, &num)?;
        s.coeffs.truncate(order + 1);
        let radius = (center + a.re()).hypot(a.im_norm());
        Ok(s.with_radius(radius))
    }
}

/// `p^2 + b p + c` re-expanded about `center`.
fn quadratic_series(center: f64, c: Quaternion, b: Quaternion) -> PowerSeries {
    let x0 = Quaternion::real(center);
    PowerSeries::scalar(
        center,
        &[x0 * x0 + x0 * b + c, x0 * 2.0 + b, Quaternion::ONE],
    )
}

pub fn blaschke_eval(f: &BlaschkeFactor, p: Quaternion) -> Result<Quaternion> {
    f.eval(p)
}

/// `b_[a](p) = (p^2 + 2 Re(a) p + |a|^2)^{-1} (p^2 - 2 Re(a) p + |a|^2)`,
/// vanishing on the whole sphere `[a]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Quaternion", into = "Quaternion")]
pub struct SphereFactor {
    a: Quaternion,
}

impl TryFrom<Quaternion> for SphereFactor {
    type Error = QsliceError;
    fn try_from(a: Quaternion) -> Result<Self> {
        Self::new(a)
    }
}

impl From<SphereFactor> for Quaternion {
    fn from(f: SphereFactor) -> Self {
        f.a
    }
}

impl SphereFactor {
    pub fn new(a: Quaternion) -> Result<Self> {
        require_halfspace(a)?;
        Ok(Self { a })
    }

    pub fn representative(&self) -> Quaternion {
        self.a
    }

    pub fn eval(&self, p: Quaternion) -> Result<Quaternion> {
        let a = self.a;
        let num = p * p - p * (2.0 * a.re()) + Quaternion::real(a.norm_sqr());
        Ok(intrinsic_denominator(a, p)? * num)
    }
}

pub fn sphere_factor_eval(f: &SphereFactor, p: Quaternion) -> Result<Quaternion> {
    f.eval(p)
}

/// One factor of a Blaschke product.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "a", rename_all = "snake_case")]
pub enum Factor {
    Point(BlaschkeFactor),
    Sphere(SphereFactor),
}

impl Factor {
    pub fn eval(&self, p: Quaternion) -> Result<Quaternion> {
        match self {
            Self::Point(f) => f.eval(p),
            Self::Sphere(f) => f.eval(p),
        }
    }
}

/// Left-to-right star product of the factors, evaluated at `p`.
pub fn product_eval(factors: &[Factor], p: Quaternion) -> Result<StarValue> {
    let closures: Vec<Box<dyn Fn(Quaternion) -> Result<Quaternion> + '_>> = factors
        .iter()
        .map(|f| Box::new(move |q| f.eval(q)) as Box<dyn Fn(Quaternion) -> Result<Quaternion>>)
        .collect();
    let refs: Vec<&dyn Fn(Quaternion) -> Result<Quaternion>> =
        closures.iter().map(|b| b.as_ref()).collect();
    pointwise_star_eval(&refs, p)
}

/// A point zero with multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointZero {
    pub a: Quaternion,
    pub mu: usize,
}

/// A spherical zero with multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereZero {
    pub c: Quaternion,
    pub nu: usize,
}

/// Requested zeros of a Blaschke product.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    #[serde(default)]
    pub points: Vec<PointZero>,
    #[serde(default)]
    pub spheres: Vec<SphereZero>,
}

impl ZeroSet {
    pub fn validate(&self) -> Result<()> {
        for z in &self.points {
            require_halfspace(z.a)?;
            if z.mu == 0 {
                return Err(QsliceError::Domain("multiplicities must be positive".into()));
            }
        }
        for z in &self.spheres {
            require_halfspace(z.c)?;
            if z.nu == 0 {
                return Err(QsliceError::Domain("multiplicities must be positive".into()));
            }
        }
        for (i, x) in self.points.iter().enumerate() {
            if self.points[i + 1..].iter().any(|y| x.a.same_sphere(y.a, 1e-12)) {
                return Err(QsliceError::Domain("point zeros must lie on distinct spheres".into()));
            }
        }
        for (i, x) in self.spheres.iter().enumerate() {
            if self.spheres[i + 1..].iter().any(|y| x.c.same_sphere(y.c, 1e-12)) {
                return Err(QsliceError::Domain("sphere zeros must be distinct".into()));
            }
        }
        Ok(())
    }
}

/// Factor list of a Blaschke product with the requested zeros.
///
/// Sphere factors come first. Each point zero `a` is then handled by one
/// factor at `a' = B(a)^{-1} a B(a)`, where `B` is the product built so far,
/// repeated `mu` times; the star fold then vanishes at `a` to order `mu`.
pub fn prescribe_zeros(zeros: &ZeroSet) -> Result<Vec<Factor>> {
    zeros.validate()?;
    let mut factors = Vec::new();
    for z in &zeros.spheres {
        let f = SphereFactor::new(z.c)?;
        factors.extend(std::iter::repeat_n(Factor::Sphere(f), z.nu));
    }
    for z in &zeros.points {
        let prev = product_eval(&factors, z.a)
            .map_err(|e| QsliceError::ConstructionFailure(format!("alignment at {}: {e}", z.a)))?;
        if prev.short_circuited || prev.value.norm() < 1e-13 {
            return Err(QsliceError::ConstructionFailure(format!(
                "earlier factors already vanish at {}",
                z.a
            )));
        }
        let aligned = z.a.twist(prev.value)?;
        let f = BlaschkeFactor::new(aligned)
            .map_err(|e| QsliceError::ConstructionFailure(e.to_string()))?;
        factors.extend(std::iter::repeat_n(Factor::Point(f), z.mu));
    }
    for z in &zeros.points {
        let v = product_eval(&factors, z.a)?.value.norm();
        if v > ZERO_CHECK_TOL {
            return Err(QsliceError::ConstructionFailure(format!(
                "product is {v:e} at requested zero {}",
                z.a
            )));
        }
    }
    Ok(factors)
}

/// Points of the sphere `[c]` used by verification: `Re c + I |Im c|` for
/// `count` units `I` drawn from the seeded stream.
pub fn sphere_samples(c: Quaternion, count: usize, seed: u64) -> Vec<Quaternion> {
    let mut rng = sample::rng_from_seed(seed);
    (0..count)
        .map(|_| Quaternion::from_slice(c.re(), c.im_norm(), sample::unit_imaginary(&mut rng)))
        .collect()
}

/// Step of the derivative stencil used by [`real_derivative`].
pub const DERIVATIVE_STEP: f64 = 1e-3;

/// Five-point central difference of `f` along the real direction at `a`.
pub fn real_derivative(f: impl Fn(Quaternion) -> Result<Quaternion>, a: Quaternion) -> Result<Quaternion> {
    let h = DERIVATIVE_STEP;
    let at = |t: f64| f(a + Quaternion::real(t));
    Ok((at(-2.0 * h)? - at(2.0 * h)? + (at(h)? - at(-h)?) * 8.0) / (12.0 * h))
}

/// Partial sums and probe behavior of a sequence of zeros.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceDiagnostic {
    pub sum_re: f64,
    /// Share of `sum_re` contributed by the second half of the sequence.
    pub tail_fraction: f64,
    /// `|B_N(p) - B_{N/2}(p)|` at each probe point.
    pub probe_increments: Vec<f64>,
    pub verdict: bool,
}

/// Probe points used by [`convergence_diagnostic`].
pub const CONVERGENCE_PROBES: [Quaternion; 3] = [
    Quaternion::new(1.0, 0.0, 0.0, 0.0),
    Quaternion::new(2.0, 0.0, 1.0, 0.0),
    Quaternion::new(0.5, 0.3, 0.0, 0.4),
];

/// Summability diagnostic for `sum Re(a_j) < infinity`. The verdict requires
/// the tail fraction to be at most `1e-3` and the probe increments between
/// the half and full partial products to be at most `1e-4`.
pub fn convergence_diagnostic(zeros: &[Quaternion]) -> Result<ConvergenceDiagnostic> {
    let factors: Vec<Factor> = zeros
        .iter()
        .map(|&a| BlaschkeFactor::new(a).map(Factor::Point))
        .collect::<Result<_>>()?;
    let sum_re: f64 = zeros.iter().map(|a| a.re()).sum();
    let half = zeros.len() / 2;
    let tail: f64 = zeros[half..].iter().map(|a| a.re()).sum();
    let tail_fraction = if sum_re > 0.0 { tail / sum_re } else { 0.0 };
    let mut probe_increments = Vec::with_capacity(CONVERGENCE_PROBES.len());
    for p in CONVERGENCE_PROBES {
        let full = product_eval(&factors, p)?.value;
        let part = product_eval(&factors[..half], p)?.value;
        probe_increments.push((full - part).norm());
    }
    let verdict = tail_fraction <= 1e-3 && probe_increments.iter().all(|&d| d <= 1e-4);
    Ok(ConvergenceDiagnostic {
        sum_re,
        tail_fraction,
        probe_increments,
        verdict,
    })
}

/// `max | |(I y + abar)^{-1}(I y - a)| - 1 |` over `samples` random `(I, y)`,
/// `y` uniform in `[-10, 10]`; the first sample uses `y = 0`.
pub fn boundary_modulus_check(f: &BlaschkeFactor, samples: usize, seed: u64) -> Result<f64> {
    let mut rng = sample::rng_from_seed(seed);
    let mut worst = 0.0f64;
    for k in 0..samples {
        let unit = sample::unit_imaginary(&mut rng);
        let y = if k == 0 { 0.0 } else { rng.gen_range(-10.0..=10.0) };
        let v = f.boundary_twisted(unit.get() * y)?;
        worst = worst.max((v.norm() - 1.0).abs());
    }
    Ok(worst)
}
