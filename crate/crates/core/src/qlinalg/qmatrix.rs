use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{QsliceError, Result};
use crate::quat::Quaternion;

/// Dense row-major matrix with quaternion entries.
///
/// JSON form: `{"rows": r, "cols": c, "data": [[w,x,y,z], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawQMatrix")]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion>,
}

#[derive(Deserialize)]
struct RawQMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion>,
}

impl TryFrom<RawQMatrix> for QMatrix {
    type Error = QsliceError;
    fn try_from(raw: RawQMatrix) -> Result<Self> {
        Self::from_vec(raw.rows, raw.cols, raw.data)
    }
}

impl QMatrix {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Quaternion>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(QsliceError::Domain(format!(
                "matrix data has {} entries, expected {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Quaternion::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { Quaternion::ONE } else { Quaternion::ZERO })
    }

    /// 1x1 matrix.
    pub fn scalar(q: Quaternion) -> Self {
        Self {
            rows: 1,
            cols: 1,
            data: vec![q],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows(rows: &[Vec<Quaternion>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(QsliceError::Domain("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols: ncols,
            data: rows.concat(),
        })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let q: Vec<Vec<Quaternion>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| Quaternion::real(v)).collect())
            .collect();
        Self::from_rows(&q)
    }

    pub fn diag(entries: &[Quaternion]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |r, c| if r == c { entries[r] } else { Quaternion::ZERO })
    }

    pub fn real_diag(entries: &[f64]) -> Self {
        let d: Vec<Quaternion> = entries.iter().map(|&v| Quaternion::real(v)).collect();
        Self::diag(&d)
    }

    /// Real signature matrix `diag(I_p, -I_q)`.
    pub fn signature_matrix(p: usize, q: usize) -> Self {
        let mut d = vec![1.0; p];
        d.extend(std::iter::repeat_n(-1.0, q));
        Self::real_diag(&d)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[Quaternion] {
        &self.data
    }

    /// The single entry of a 1x1 matrix.
    pub fn as_scalar(&self) -> Option<Quaternion> {
        (self.rows == 1 && self.cols == 1).then(|| self.data[0])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    /// `q * A` (scalar acting on the left of every entry).
    pub fn scale_left(&self, q: Quaternion) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| q * a).collect(),
        }
    }

    /// `A * q` (scalar acting on the right of every entry).
    pub fn scale_right(&self, q: Quaternion) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a * q).collect(),
        }
    }

    pub fn scale(&self, r: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a * r).collect(),
        }
    }

    /// Matrix product; errors on incompatible shapes.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(QsliceError::Domain(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == Quaternion::ZERO {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other[(k, c)];
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Quaternion, Quaternion) -> Quaternion) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(QsliceError::Domain(format!(
                "shape mismatch {:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Largest entry modulus, `||A||_max`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|q| q.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `||A - B||_max`; infinite on shape mismatch.
    pub fn max_diff(&self, other: &Self) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `||A - A*||_max` (infinite for non-square input).
    pub fn hermitian_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_diff(&self.adjoint())
    }

    /// `||A + A*||_max` (infinite for non-square input).
    pub fn antihermitian_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let adj = self.adjoint();
        self.data
            .iter()
            .zip(&adj.data)
            .map(|(&a, &b)| (a + b).norm())
            .fold(0.0, f64::max)
    }

    /// `(A + A*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale(0.5)
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "block out of range");
        Self::from_fn(nr, nc, |r, c| self[(r0 + r, c0 + c)])
    }

    /// Assembles `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        if a.rows != b.rows || c.rows != d.rows || a.cols != c.cols || b.cols != d.cols {
            return Err(QsliceError::Domain("incompatible block shapes".into()));
        }
        let rows = a.rows + c.rows;
        let cols = a.cols + b.cols;
        Ok(Self::from_fn(rows, cols, |r, col| {
            match (r < a.rows, col < a.cols) {
                (true, true) => a[(r, col)],
                (true, false) => b[(r, col - a.cols)],
                (false, true) => c[(r - a.rows, col)],
                (false, false) => d[(r - a.rows, col - a.cols)],
            }
        }))
    }

    /// Block diagonal `diag(a, b)`.
    pub fn block_diag(a: &Self, b: &Self) -> Self {
        Self::from_blocks(a, &Self::zeros(a.rows, b.cols), &Self::zeros(b.rows, a.cols), b)
            .expect("block_diag shapes are consistent by construction")
    }

    pub fn column(&self, c: usize) -> Self {
        self.block(0, c, self.rows, 1)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|q| q.is_finite())
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Quaternion;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Quaternion {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Quaternion {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

// Operator forms panic on shape mismatch, like the dense matrix types of
// nalgebra; the `try_*` methods are the fallible equivalents.

impl Mul for &QMatrix {
    type Output = QMatrix;
    fn mul(self, rhs: &QMatrix) -> QMatrix {
        self.try_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;
    fn add(self, rhs: &QMatrix) -> QMatrix {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;
    fn sub(self, rhs: &QMatrix) -> QMatrix {
        self.try_sub(rhs).expect("matrix difference shape mismatch")
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        self.scale(-1.0)
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
