//! Quaternion arithmetic, slice coordinates and sphere operations.
//!
//! A quaternion is stored as `(w, x, y, z)` for `p = w + x i + y j + z k`.
//! Every imaginary unit `I` on the 2-sphere of purely imaginary unit
//! quaternions squares to `-1`, and every non-real quaternion lies on a
//! unique slice `C_I = R + I R`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{QsliceError, Result};

/// Default absolute tolerance for zero tests.
pub const ZERO_TOL: f64 = 1e-12;

/// A real quaternion `w + x i + y j + z k`.
///
/// Serialized as the JSON array `[w, x, y, z]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<[f64; 4]> for Quaternion {
    fn from(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> Self {
        [q.w, q.x, q.y, q.z]
    }
}

impl From<f64> for Quaternion {
    fn from(r: f64) -> Self {
        Self::real(r)
    }
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    #[inline]
    pub const fn real(r: f64) -> Self {
        Self::new(r, 0.0, 0.0, 0.0)
    }

    /// `x + I y` for a unit imaginary `I`.
    pub fn from_slice(x: f64, y: f64, unit: UnitImaginary) -> Self {
        let d = unit.get();
        Self::new(x, y * d.x, y * d.y, y * d.z)
    }

    #[inline]
    pub fn re(self) -> f64 {
        self.w
    }

    /// Vector (purely imaginary) part.
    #[inline]
    pub fn im(self) -> Quaternion {
        Self::new(0.0, self.x, self.y, self.z)
    }

    #[inline]
    pub fn im_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    #[inline]
    pub fn norm(self) -> f64 {
        // hypot-style scaling is unnecessary for the O(1)..O(1e2) magnitudes used here
        self.norm_sqr().sqrt()
    }

    pub fn is_zero(self, tol: f64) -> bool {
        self.norm() <= tol
    }

    pub fn is_real(self, tol: f64) -> bool {
        self.im_norm() <= tol
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// `conj(p) / |p|^2`.
    pub fn inverse(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 < f64::MIN_POSITIVE {
            return Err(QsliceError::Domain(
                "quaternion inverse of zero (below underflow threshold)".into(),
            ));
        }
        Ok(self.conj() / n2)
    }

    /// Integer power by repeated squaring; negative powers use the inverse.
    pub fn powi(self, n: i32) -> Result<Self> {
        let mut base = if n < 0 { self.inverse()? } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn dot(self, other: Self) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Largest componentwise absolute difference.
    pub fn max_abs_diff(self, other: Self) -> f64 {
        (self.w - other.w)
            .abs()
            .max((self.x - other.x).abs())
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }

    /// Decompose `p = x + I y` with `y >= 0`.
    ///
    /// For real `p` the unit is the canonical `i`.
    pub fn slice_decompose(self) -> SliceCoordinates {
        let y = self.im_norm();
        if y == 0.0 {
            return SliceCoordinates {
                x: self.w,
                y: 0.0,
                unit: UnitImaginary::i(),
            };
        }
        let unit = UnitImaginary(Self::new(0.0, self.x / y, self.y / y, self.z / y));
        SliceCoordinates { x: self.w, y, unit }
    }

    /// The imaginary unit of the slice containing `self` (`i` for reals).
    pub fn slice_unit(self) -> UnitImaginary {
        self.slice_decompose().unit
    }

    /// `true` iff `self` and `other` lie on the same sphere within `tol`.
    pub fn same_sphere(self, other: Self, tol: f64) -> bool {
        (self.re() - other.re()).abs() <= tol && (self.im_norm() - other.im_norm()).abs() <= tol
    }

    /// Euclidean distance between the spheres `[self]` and `[other]`,
    /// measured in the `(Re, |Im|)` half-plane.
    pub fn sphere_distance(self, other: Self) -> f64 {
        (self.re() - other.re()).hypot(self.im_norm() - other.im_norm())
    }

    /// `q^{-1} p q`; the result lies on the sphere `[p]`.
    pub fn twist(self, q: Self) -> Result<Self> {
        let qi = q
            .inverse()
            .map_err(|_| QsliceError::Domain("twist by a zero quaternion".into()))?;
        Ok(qi * self * q)
    }
}

/// Free-function form of [`Quaternion::inverse`].
pub fn quat_inverse(p: Quaternion) -> Result<Quaternion> {
    p.inverse()
}

/// Free-function form of [`Quaternion::twist`].
pub fn twist(p: Quaternion, q: Quaternion) -> Result<Quaternion> {
    p.twist(q)
}

/// Free-function form of [`Quaternion::slice_decompose`].
pub fn slice_decompose(p: Quaternion) -> SliceCoordinates {
    p.slice_decompose()
}

/// Free-function form of [`Quaternion::same_sphere`].
pub fn same_sphere(p: Quaternion, q: Quaternion, tol: f64) -> bool {
    p.same_sphere(q, tol)
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i{:+}j{:+}k", self.w, self.x, self.y, self.z)
    }
}

impl Add for Quaternion {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, r: f64) -> Self {
        Self::new(self.w * r, self.x * r, self.y * r, self.z * r)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn div(self, r: f64) -> Self {
        Self::new(self.w / r, self.x / r, self.y / r, self.z / r)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl MulAssign for Quaternion {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl std::iter::Sum for Quaternion {
    fn sum<It: Iterator<Item = Self>>(iter: It) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

/// A purely imaginary unit quaternion, `I^2 = -1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Quaternion", into = "Quaternion")]
pub struct UnitImaginary(Quaternion);

impl TryFrom<Quaternion> for UnitImaginary {
    type Error = QsliceError;
    fn try_from(q: Quaternion) -> Result<Self> {
        Self::new(q)
    }
}

impl From<UnitImaginary> for Quaternion {
    fn from(u: UnitImaginary) -> Self {
        u.0
    }
}

impl UnitImaginary {
    /// Accepts a quaternion that is already a unit imaginary within `1e-12`.
    pub fn new(q: Quaternion) -> Result<Self> {
        if q.w.abs() > ZERO_TOL || (q.norm() - 1.0).abs() > ZERO_TOL {
            return Err(QsliceError::Domain(format!("{q} is not a unit imaginary")));
        }
        Ok(Self(q))
    }

    /// Normalizes the imaginary part of `q`.
    pub fn normalize(q: Quaternion) -> Result<Self> {
        let n = q.im_norm();
        if n < ZERO_TOL {
            return Err(QsliceError::Domain("cannot normalize a real quaternion".into()));
        }
        Ok(Self(q.im() / n))
    }

    pub fn i() -> Self {
        Self(Quaternion::I)
    }

    pub fn j() -> Self {
        Self(Quaternion::J)
    }

    pub fn k() -> Self {
        Self(Quaternion::K)
    }

    #[inline]
    pub fn get(self) -> Quaternion {
        self.0
    }

    /// A unit imaginary orthogonal to `self`.
    pub fn orthogonal(self) -> Self {
        let d = self.0;
        // cross with the basis axis least aligned with d
        let axis = if d.x.abs() <= d.y.abs() && d.x.abs() <= d.z.abs() {
            Quaternion::I
        } else if d.y.abs() <= d.z.abs() {
            Quaternion::J
        } else {
            Quaternion::K
        };
        let c = Quaternion::new(
            0.0,
            d.y * axis.z - d.z * axis.y,
            d.z * axis.x - d.x * axis.z,
            d.x * axis.y - d.y * axis.x,
        );
        Self(c / c.norm())
    }
}

/// Slice coordinates `p = x + I y`, `y >= 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliceCoordinates {
    pub x: f64,
    pub y: f64,
    pub unit: UnitImaginary,
}

impl SliceCoordinates {
    pub fn reconstruct(&self) -> Quaternion {
        Quaternion::from_slice(self.x, self.y, self.unit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    #[test]
    fn hamilton_rules() {
        let (i, j, k) = (Quaternion::I, Quaternion::J, Quaternion::K);
        assert_eq!(i * i, -Quaternion::ONE);
        assert_eq!(j * j, -Quaternion::ONE);
        assert_eq!(k * k, -Quaternion::ONE);
        assert_eq!(i * j, k);
        assert_eq!(j * i, -k);
        assert_eq!(j * k, i);
        assert_eq!(k * j, -i);
        assert_eq!(k * i, j);
        assert_eq!(i * k, -j);
    }

    #[test]
    fn slice_decompose_examples() {
        let s = q(1.0, 2.0, 0.0, 0.0).slice_decompose();
        assert_eq!((s.x, s.y), (1.0, 2.0));
        assert_eq!(s.unit, UnitImaginary::i());

        let s = Quaternion::real(3.0).slice_decompose();
        assert_eq!((s.x, s.y), (3.0, 0.0));
        assert_eq!(s.unit, UnitImaginary::i());

        let s = q(1.0, 1.0, 1.0, 1.0).slice_decompose();
        let r3 = 3f64.sqrt();
        assert!((s.y - r3).abs() < 1e-15);
        assert!(s.unit.get().max_abs_diff(q(0.0, 1.0 / r3, 1.0 / r3, 1.0 / r3)) < 1e-15);
    }

    #[test]
    fn same_sphere_examples() {
        assert!(q(1.0, 1.0, 0.0, 0.0).same_sphere(q(1.0, 0.0, 1.0, 0.0), 1e-12));
        assert!(q(1.0, 1.0, 0.0, 0.0).same_sphere(q(1.0, -1.0, 0.0, 0.0), 1e-12));
        assert!(!q(1.0, 1.0, 0.0, 0.0).same_sphere(q(1.0, 2.0, 0.0, 0.0), 1e-12));
    }

    #[test]
    fn twist_examples() {
        assert_eq!(Quaternion::I.twist(Quaternion::J).unwrap(), -Quaternion::I);
        let p = q(0.3, -1.2, 0.5, 2.0);
        assert_eq!(p.twist(Quaternion::ONE).unwrap(), p);
        let t = Quaternion::real(2.5).twist(q(0.1, 2.0, -3.0, 0.7)).unwrap();
        assert!(t.max_abs_diff(Quaternion::real(2.5)) < 1e-15);
        assert!(p.twist(Quaternion::ZERO).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Quaternion::ONE.inverse().unwrap(), Quaternion::ONE);
        assert_eq!(Quaternion::J.inverse().unwrap(), -Quaternion::J);
        assert_eq!(q(1.0, 1.0, 0.0, 0.0).inverse().unwrap(), q(0.5, -0.5, 0.0, 0.0));
        assert!(Quaternion::ZERO.inverse().is_err());
        assert!(q(1e-170, 0.0, 0.0, 0.0).inverse().is_err());
    }

    #[test]
    fn orthogonal_unit() {
        for u in [UnitImaginary::i(), UnitImaginary::j(), UnitImaginary::normalize(q(0.0, 1.0, 2.0, -3.0)).unwrap()] {
            let o = u.orthogonal();
            assert!(u.get().dot(o.get()).abs() < 1e-15);
            assert!((o.get().norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn json_is_component_array() {
        let p = q(1.0, -2.0, 0.5, 3.0);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[1.0,-2.0,0.5,3.0]");
        let back: Quaternion = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
