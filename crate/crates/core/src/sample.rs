//! Seeded random generators for test data.
//!
//! Every generator takes a caller-owned RNG; [`rng_from_seed`] builds the
//! reproducible ChaCha stream used throughout the crate.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::qlinalg::QMatrix;
use crate::quat::{Quaternion, UnitImaginary};

pub type SampleRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for sub-task `index` of a seeded run.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Components uniform in `[-scale, scale]`.
pub fn quaternion<R: Rng>(rng: &mut R, scale: f64) -> Quaternion {
    Quaternion::new(
        rng.gen_range(-scale..=scale),
        rng.gen_range(-scale..=scale),
        rng.gen_range(-scale..=scale),
        rng.gen_range(-scale..=scale),
    )
}

/// Uniform direction on the sphere of unit imaginaries.
pub fn unit_imaginary<R: Rng>(rng: &mut R) -> UnitImaginary {
    loop {
        let v = Quaternion::new(
            0.0,
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return UnitImaginary::normalize(v).expect("non-real by construction");
        }
    }
}

/// Point of the right half-space: real part uniform in `[0.2, 3]`,
/// imaginary direction uniform, imaginary magnitude uniform in `[0, 2]`.
pub fn halfspace_point<R: Rng>(rng: &mut R) -> Quaternion {
    let x = rng.gen_range(0.2..=3.0);
    let y = rng.gen_range(0.0..=2.0);
    Quaternion::from_slice(x, y, unit_imaginary(rng))
}

pub fn qmatrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> QMatrix {
    QMatrix::from_fn(rows, cols, |_, _| quaternion(rng, scale))
}

pub fn real_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> QMatrix {
    QMatrix::from_fn(rows, cols, |_, _| Quaternion::real(rng.gen_range(-scale..=scale)))
}

/// Orthonormalizes the columns of a square matrix (Gram-Schmidt with the
/// quaternionic inner product `u* v`, coefficients acting on the right).
pub fn gram_schmidt(m: &QMatrix) -> QMatrix {
    let n = m.cols();
    let mut out = m.clone();
    for k in 0..n {
        for j in 0..k {
            let mut proj = Quaternion::ZERO;
            for r in 0..m.rows() {
                proj += out[(r, j)].conj() * out[(r, k)];
            }
            for r in 0..m.rows() {
                let sub = out[(r, j)] * proj;
                out[(r, k)] -= sub;
            }
        }
        let norm = (0..m.rows()).map(|r| out[(r, k)].norm_sqr()).sum::<f64>().sqrt();
        for r in 0..m.rows() {
            out[(r, k)] = out[(r, k)] / norm;
        }
    }
    out
}

/// Random quaternionic unitary matrix.
pub fn unitary<R: Rng>(rng: &mut R, n: usize) -> QMatrix {
    gram_schmidt(&qmatrix(rng, n, n, 1.0))
}

/// `U diag(d) U*` for a random unitary `U`.
pub fn hermitian_udu<R: Rng>(rng: &mut R, d: &[f64]) -> QMatrix {
    let u = unitary(rng, d.len());
    &(&u * &QMatrix::real_diag(d)) * &u.adjoint()
}

/// Random anti-Hermitian matrix `(M - M*) / 2`.
pub fn antihermitian<R: Rng>(rng: &mut R, n: usize, scale: f64) -> QMatrix {
    let m = qmatrix(rng, n, n, scale);
    (&m - &m.adjoint()).scale(0.5)
}
