//! Quaternionic matrix algebra through the complex embedding
//! `chi(A1 + A2 j) = [[A1, A2], [-conj A2, conj A1]]`.
//!
//! `chi` is a `*`-homomorphism, so products, inverses and Hermitian spectra
//! of quaternionic matrices are computed on complex matrices of twice the
//! size. Every real eigenvalue of `chi(A)` for Hermitian `A` appears twice.

mod complex;
mod qmatrix;

pub use complex::{
    complex_eigenvalues, complex_inverse, hermitian_defect, hermitian_eigen, hermitian_eigenvalues,
    ComplexMatrix, HermitianEigen, C64, JACOBI_MAX_SWEEPS, JACOBI_TOL,
};
pub use qmatrix::QMatrix;

use serde::{Deserialize, Serialize};

use crate::error::{QsliceError, Result};
use crate::quat::Quaternion;

/// Inertia `(nu_plus, nu_minus, nu_zero)` of a Hermitian quaternionic matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub nu_plus: usize,
    pub nu_minus: usize,
    pub nu_zero: usize,
}

impl Signature {
    pub fn dim(&self) -> usize {
        self.nu_plus + self.nu_minus + self.nu_zero
    }
}

/// Complex components `(a1, a2)` of `q = a1 + a2 j`.
#[inline]
pub fn split_quaternion(q: Quaternion) -> (C64, C64) {
    (C64::new(q.w, q.x), C64::new(q.y, q.z))
}

/// Inverse of [`split_quaternion`].
#[inline]
pub fn join_quaternion(a1: C64, a2: C64) -> Quaternion {
    Quaternion::new(a1.re, a1.im, a2.re, a2.im)
}

pub fn chi_embed(a: &QMatrix) -> ComplexMatrix {
    let (m, n) = a.shape();
    let mut out = ComplexMatrix::zeros(2 * m, 2 * n);
    for r in 0..m {
        for c in 0..n {
            let (a1, a2) = split_quaternion(a[(r, c)]);
            out[(r, c)] = a1;
            out[(r, n + c)] = a2;
            out[(m + r, c)] = -a2.conj();
            out[(m + r, n + c)] = a1.conj();
        }
    }
    out
}

/// Largest deviation of `m` from the block pattern of a `chi` image.
pub fn chi_structure_residual(m: &ComplexMatrix) -> f64 {
    if !m.nrows().is_multiple_of(2) || !m.ncols().is_multiple_of(2) {
        return f64::INFINITY;
    }
    let (h, w) = (m.nrows() / 2, m.ncols() / 2);
    let mut worst = 0.0f64;
    for r in 0..h {
        for c in 0..w {
            worst = worst
                .max((m[(h + r, c)] + m[(r, w + c)].conj()).norm())
                .max((m[(h + r, w + c)] - m[(r, c)].conj()).norm());
        }
    }
    worst
}

/// Recovers `A` from `chi(A)`; the two copies of each block are averaged.
pub fn chi_extract(m: &ComplexMatrix, tol: f64) -> Result<QMatrix> {
    if !m.nrows().is_multiple_of(2) || !m.ncols().is_multiple_of(2) {
        return Err(QsliceError::Domain("chi_extract needs even dimensions".into()));
    }
    let residual = chi_structure_residual(m);
    if !(residual <= tol) {
        return Err(QsliceError::StructureViolation { residual, tol });
    }
    let (h, w) = (m.nrows() / 2, m.ncols() / 2);
    Ok(QMatrix::from_fn(h, w, |r, c| {
        let a1 = (m[(r, c)] + m[(h + r, w + c)].conj()) * 0.5;
        let a2 = (m[(r, w + c)] - m[(h + r, c)].conj()) * 0.5;
        join_quaternion(a1, a2)
    }))
}

/// Quaternionic column vector `v1 - conj(v2) j` attached to a complex vector
/// `(v1; v2)` of length `2n`. If `chi(A) v = v mu` with `mu` complex, the
/// result `u` satisfies `A u = u mu`.
pub fn quaternion_vector(v: &[C64]) -> QMatrix {
    let n = v.len() / 2;
    QMatrix::from_fn(n, 1, |r, _| join_quaternion(v[r], -v[n + r].conj()))
}

fn hermitian_check(a: &QMatrix, tol: f64) -> Result<()> {
    if !a.is_square() {
        return Err(QsliceError::Domain("expected a square matrix".into()));
    }
    let defect = a.hermitian_residual();
    let allowed = tol.max(1e-12 * a.max_abs().max(1.0));
    if !(defect <= allowed) {
        return Err(QsliceError::Domain(format!(
            "matrix is not Hermitian (defect {defect:e})"
        )));
    }
    Ok(())
}

/// Zero threshold `max(dim * eps * max|lambda|, tol)`.
pub fn zero_threshold(dim: usize, max_abs: f64, tol: f64) -> f64 {
    (dim as f64 * f64::EPSILON * max_abs).max(tol)
}

/// Counts eigenvalues `> tau`, `< -tau` and within `+-tau`, halving the counts
/// of a doubled spectrum. Adjacent sorted eigenvalues must pair up within
/// `1e-8 max|lambda|`.
pub fn halved_inertia(sorted: &[f64], tau: f64) -> Result<Signature> {
    let max_abs = sorted.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let pair_tol = 1e-8 * max_abs;
    if !sorted.len().is_multiple_of(2) {
        return Err(QsliceError::DegenerateSpectrum("odd spectrum length".into()));
    }
    for pair in sorted.chunks(2) {
        if (pair[0] - pair[1]).abs() > pair_tol {
            return Err(QsliceError::DegenerateSpectrum(format!(
                "eigenvalues {} and {} do not pair up",
                pair[0], pair[1]
            )));
        }
    }
    let plus = sorted.iter().filter(|&&l| l > tau).count();
    let minus = sorted.iter().filter(|&&l| l < -tau).count();
    let zero = sorted.len() - plus - minus;
    if plus % 2 != 0 || minus % 2 != 0 || !zero.is_multiple_of(2) {
        return Err(QsliceError::DegenerateSpectrum(format!(
            "threshold {tau:e} splits an eigenvalue pair"
        )));
    }
    Ok(Signature {
        nu_plus: plus / 2,
        nu_minus: minus / 2,
        nu_zero: zero / 2,
    })
}

/// Eigenvalues of `chi(A)` for Hermitian `A` (each appears twice).
pub fn chi_eigenvalues(a: &QMatrix, tol: f64) -> Result<Vec<f64>> {
    hermitian_check(a, tol)?;
    Ok(hermitian_eigen(&chi_embed(a))?.values)
}

pub fn signature(a: &QMatrix, tol: f64) -> Result<Signature> {
    let ev = chi_eigenvalues(a, tol)?;
    let max_abs = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    halved_inertia(&ev, zero_threshold(ev.len(), max_abs, tol))
}

pub fn qmat_inverse(a: &QMatrix) -> Result<QMatrix> {
    if !a.is_square() {
        return Err(QsliceError::Domain("inverse of a non-square matrix".into()));
    }
    if a.is_empty() {
        return Ok(a.clone());
    }
    let inv = complex_inverse(&chi_embed(a))?;
    let scale = inv.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    chi_extract(&inv, 1e-8 * scale)
}

/// Solves `A X = B` for square invertible `A`.
pub fn qmat_solve(a: &QMatrix, b: &QMatrix) -> Result<QMatrix> {
    qmat_inverse(a)?.try_mul(b)
}

/// Hermitian positive semidefinite square root.
pub fn psd_sqrt(a: &QMatrix, tol: f64) -> Result<QMatrix> {
    hermitian_check(a, tol)?;
    let m = chi_embed(a);
    let eig = hermitian_eigen(&m)?;
    let max_abs = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tau = zero_threshold(eig.values.len(), max_abs, tol);
    if let Some(&lo) = eig.values.first() {
        if lo < -tau {
            return Err(QsliceError::NotPsd(lo));
        }
    }
    let roots: Vec<C64> = eig
        .values
        .iter()
        .map(|&l| C64::new(l.max(0.0).sqrt(), 0.0))
        .collect();
    let d = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(roots));
    let x = &eig.vectors * d * eig.vectors.adjoint();
    let structure_tol = tol.max(1e-10 * max_abs.sqrt().max(1.0));
    chi_extract(&x, structure_tol)
}

/// Factorization `Delta = -C* J C` of an anti-Hermitian matrix.
#[derive(Clone, Debug)]
pub struct RankFactor {
    /// `m x n`.
    pub c: QMatrix,
    /// `m x m`, `J* = -J`, `J^2 = -I`.
    pub j: QMatrix,
    pub rank: usize,
}

/// Diagonalizes the Hermitian `-i chi(Delta)`. Each eigenvector `v` for an
/// eigenvalue `lambda > tau` gives a quaternionic vector `u` with
/// `Delta u = u i lambda`; these are orthonormal, so
/// `Delta = sum u i lambda u*`, i.e. `J = -i I_m` and rows `sqrt(lambda) u*`.
pub fn antihermitian_rank_factor(delta: &QMatrix, tol: f64) -> Result<RankFactor> {
    if !delta.is_square() {
        return Err(QsliceError::Domain("expected a square matrix".into()));
    }
    let n = delta.rows();
    let scale = delta.max_abs();
    let defect = delta.antihermitian_residual();
    if !(defect <= tol.max(1e-12 * scale.max(1.0))) {
        return Err(QsliceError::Domain(format!(
            "matrix is not anti-Hermitian (defect {defect:e})"
        )));
    }
    let h = chi_embed(delta) * C64::new(0.0, -1.0);
    let eig = hermitian_eigen(&h)?;
    let max_abs = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tau = zero_threshold(eig.values.len(), max_abs, tol);

    let mut rows: Vec<Vec<Quaternion>> = Vec::new();
    for (k, &lam) in eig.values.iter().enumerate().rev() {
        if lam <= tau {
            break;
        }
        let v: Vec<C64> = eig.vectors.column(k).iter().copied().collect();
        let u = quaternion_vector(&v);
        let s = lam.sqrt();
        rows.push((0..n).map(|r| u[(r, 0)].conj() * s).collect());
    }
    let rank = rows.len();
    let c = if rank == 0 {
        QMatrix::zeros(0, n)
    } else {
        QMatrix::from_rows(&rows)?
    };
    let j = QMatrix::diag(&vec![-Quaternion::I; rank]);
    let recon = &(&c.adjoint() * &j) * &c;
    let residual = delta.max_diff(&(-&recon));
    let allowed = tol.max(1e-10) * scale.max(1.0);
    if !(residual <= allowed) {
        return Err(QsliceError::StructureViolation {
            residual,
            tol: allowed,
        });
    }
    Ok(RankFactor { c, j, rank })
}
