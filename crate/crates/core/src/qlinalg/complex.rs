//! Complex dense kernels behind the quaternionic routines: a cyclic Jacobi
//! eigensolver for Hermitian matrices, LU inversion and general eigenvalues.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{QsliceError, Result};

pub type C64 = Complex64;

/// Dense complex matrix, the target of the `chi` embedding.
pub type ComplexMatrix = DMatrix<C64>;

/// Relative off-diagonal tolerance of the Jacobi iteration.
pub const JACOBI_TOL: f64 = 1e-13;
/// Sweep budget of the Jacobi iteration.
pub const JACOBI_MAX_SWEEPS: usize = 64;

/// Eigen-decomposition `M = V diag(values) V*` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: ComplexMatrix,
    pub sweeps: usize,
}

impl HermitianEigen {
    /// `max_k ||M v_k - lambda_k v_k||`.
    pub fn residual(&self, m: &ComplexMatrix) -> f64 {
        let mut worst = 0.0f64;
        for (k, &lam) in self.values.iter().enumerate() {
            let v = self.vectors.column(k);
            let r = m * v - v * C64::new(lam, 0.0);
            worst = worst.max(r.norm());
        }
        worst
    }
}

/// `||M - M*||_max`.
pub fn hermitian_defect(m: &ComplexMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for r in 0..n {
        for c in r..n {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

fn off_norm_sqr(a: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s
}

/// Cyclic Jacobi eigen-decomposition of a Hermitian matrix.
///
/// The input is symmetrized before iterating; callers are expected to have
/// checked the Hermitian defect.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    if m.nrows() != m.ncols() {
        return Err(QsliceError::Domain("eigenproblem needs a square matrix".into()));
    }
    let n = m.nrows();
    let mut a = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut v = ComplexMatrix::identity(n, n);
    let total = a.norm_squared();
    let target = (JACOBI_TOL * JACOBI_TOL) * total;

    let mut sweeps = 0;
    while off_norm_sqr(&a) > target && total > 0.0 {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(QsliceError::Solver {
                sweeps,
                off: off_norm_sqr(&a).sqrt(),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen {
        values,
        vectors,
        sweeps,
    })
}

/// Annihilates `a[p][q]` with the unitary
/// `U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]`, `phi = arg a[p][q]`,
/// and applies `A <- U* A U`, `V <- V U`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let e = phase.conj();
    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = -e * s;
    let u_qq = e * c;

    let n = a.nrows();
    // A <- A U on columns p, q
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    // A <- U* A on rows p, q
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
    for k in 0..v.nrows() {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

/// Ascending eigenvalues of a Hermitian matrix (Hermitian within `1e-10`).
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if hermitian_defect(m) > 1e-10 * scale {
        return Err(QsliceError::Domain("matrix is not Hermitian".into()));
    }
    Ok(hermitian_eigen(m)?.values)
}

/// Inverse by LU with partial pivoting; rejects matrices whose smallest
/// pivot is negligible relative to the largest.
pub fn complex_inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.nrows() != m.ncols() {
        return Err(QsliceError::Domain("inverse of a non-square matrix".into()));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(m.clone());
    }
    let lu = m.clone().lu();
    let u = lu.u();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for k in 0..n {
        let d = u[(k, k)].norm();
        lo = lo.min(d);
        hi = hi.max(d);
    }
    if !(hi > 0.0) || lo <= 1e-14 * hi || !lo.is_finite() {
        return Err(QsliceError::SingularMatrix);
    }
    let inv = lu.try_inverse().ok_or(QsliceError::SingularMatrix)?;
    if inv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(QsliceError::SingularMatrix);
    }
    Ok(inv)
}

/// All eigenvalues of a general complex square matrix, from the diagonal of
/// its complex Schur form.
pub fn complex_eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    if m.nrows() != m.ncols() {
        return Err(QsliceError::Domain("eigenproblem needs a square matrix".into()));
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(m.clone(), 1e-15, 10_000).ok_or(QsliceError::Solver {
        sweeps: 10_000,
        off: f64::NAN,
    })?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|k| t[(k, k)]).collect())
}
