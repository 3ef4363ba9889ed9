//! The half-space reproducing kernel, the kernels attached to Schur and
//! generalized-positive functions, Gram sampling and negative squares.
//!
//! For slice-regular `F` the two-sided star kernel `K(p, q)` is the unique
//! solution of the Sylvester equation `p K + K qbar = R(p, q)`, with
//! `R = J2 - S(p) J1 S(q)*` for Schur functions and `R = J Phi(p) + Phi(q)* J`
//! for generalized-positive ones. Entrywise the solution is
//! `K = (p^2 + 2 Re(q) p + |q|^2)^{-1} (p R + R q)`, which reduces to
//! `R / (x + y)` at real points.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QsliceError, Result};
use crate::qlinalg::{
    chi_embed, halved_inertia, hermitian_eigen, qmat_inverse, signature, zero_threshold, QMatrix,
    Signature,
};
use crate::quat::Quaternion;
use crate::sample;
use crate::slicefn::{PowerSeries, SliceMatrixFn};

/// Sphere-distance threshold of the kernel singular set `[-qbar]`.
pub const KERNEL_SINGULAR_TOL: f64 = 1e-10;

/// Distance from `[p]` to the singular sphere `[-qbar]`.
pub fn singular_distance(p: Quaternion, q: Quaternion) -> f64 {
    (p.re() + q.re()).hypot(p.im_norm() - q.im_norm())
}

fn check_nonsingular(p: Quaternion, q: Quaternion) -> Result<()> {
    if singular_distance(p, q) < KERNEL_SINGULAR_TOL {
        return Err(QsliceError::SingularKernelPoint);
    }
    Ok(())
}

/// `k(p, q) = (pbar + qbar)(|p|^2 + 2 Re(p) qbar + qbar^2)^{-1}`.
pub fn k_eval(p: Quaternion, q: Quaternion) -> Result<Quaternion> {
    check_nonsingular(p, q)?;
    let qb = q.conj();
    let den = Quaternion::real(p.norm_sqr()) + qb * (2.0 * p.re()) + qb * qb;
    if den.norm() <= 1e-12 {
        return Err(QsliceError::SingularKernelPoint);
    }
    Ok((p.conj() + qb) * den.inverse()?)
}

/// Second closed form `(|q|^2 + 2 Re(q) p + p^2)^{-1} (p + q)`.
pub fn k_eval_alt(p: Quaternion, q: Quaternion) -> Result<Quaternion> {
    check_nonsingular(p, q)?;
    let den = Quaternion::real(q.norm_sqr()) + p * (2.0 * q.re()) + p * p;
    if den.norm() <= 1e-12 {
        return Err(QsliceError::SingularKernelPoint);
    }
    Ok(den.inverse()? * (p + q))
}

/// `|p k(p,q) + k(p,q) qbar - 1|`.
pub fn k_identity_residual(p: Quaternion, q: Quaternion) -> Result<f64> {
    let k = k_eval(p, q)?;
    Ok((p * k + k * q.conj() - Quaternion::ONE).norm())
}

/// Solution `X` of `p X + X qbar = R`.
pub fn sylvester_kernel(p: Quaternion, q: Quaternion, r: &QMatrix) -> Result<QMatrix> {
    check_nonsingular(p, q)?;
    let den = p * p + p * (2.0 * q.re()) + Quaternion::real(q.norm_sqr());
    if den.norm() <= 1e-12 {
        return Err(QsliceError::SingularKernelPoint);
    }
    let di = den.inverse()?;
    Ok(QMatrix::from_fn(r.rows(), r.cols(), |a, b| {
        di * (p * r[(a, b)] + r[(a, b)] * q)
    }))
}

/// `||p K + K qbar - R||_max`.
pub fn sylvester_residual(p: Quaternion, q: Quaternion, k: &QMatrix, r: &QMatrix) -> f64 {
    let lhs = &k.scale_left(p) + &k.scale_right(q.conj());
    lhs.max_diff(r)
}

/// `true` when `j` is a real signature matrix (`J = J*`, `J^2 = I`).
pub fn is_signature_matrix(j: &QMatrix, tol: f64) -> bool {
    j.is_square()
        && j.data().iter().all(|e| e.im_norm() <= tol)
        && j.hermitian_residual() <= tol
        && (j * j).max_diff(&QMatrix::identity(j.rows())) <= tol
}

/// Which kernel a [`KernelSpec`] describes.
#[derive(Clone, Debug)]
pub enum KernelKind {
    /// `k(p, q)`.
    HardyK,
    /// `K_S` with `J2 - S(p) J1 S(q)*` on the right-hand side.
    SchurKs {
        j1: QMatrix,
        j2: QMatrix,
        s: SliceMatrixFn,
    },
    /// `K_Phi` with `J Phi(p) + Phi(q)* J` on the right-hand side.
    GpKphi { j: QMatrix, phi: SliceMatrixFn },
}

/// A kernel together with a real scale factor (`-1` gives `-k`).
#[derive(Clone, Debug)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub scale: f64,
}

impl KernelSpec {
    pub fn hardy() -> Self {
        Self {
            kind: KernelKind::HardyK,
            scale: 1.0,
        }
    }

    pub fn schur(j1: QMatrix, j2: QMatrix, s: SliceMatrixFn) -> Result<Self> {
        for (name, j) in [("J1", &j1), ("J2", &j2)] {
            if !is_signature_matrix(j, 1e-12) {
                return Err(QsliceError::Domain(format!("{name} is not a signature matrix")));
            }
        }
        let neg1 = signature(&j1, 1e-12)?.nu_minus;
        let neg2 = signature(&j2, 1e-12)?.nu_minus;
        if neg1 != neg2 {
            return Err(QsliceError::Domain(format!(
                "J1 and J2 have different negative indices ({neg1} vs {neg2})"
            )));
        }
        Ok(Self {
            kind: KernelKind::SchurKs { j1, j2, s },
            scale: 1.0,
        })
    }

    pub fn gp(j: QMatrix, phi: SliceMatrixFn) -> Result<Self> {
        if !j.is_square() {
            return Err(QsliceError::Domain("J must be square".into()));
        }
        Ok(Self {
            kind: KernelKind::GpKphi { j, phi },
            scale: 1.0,
        })
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.scale *= factor;
        self
    }

    /// Size of the kernel values.
    pub fn dim(&self) -> usize {
        match &self.kind {
            KernelKind::HardyK => 1,
            KernelKind::SchurKs { j2, .. } => j2.rows(),
            KernelKind::GpKphi { j, .. } => j.rows(),
        }
    }

    pub fn real_axis_only(&self) -> bool {
        match &self.kind {
            KernelKind::HardyK => false,
            KernelKind::SchurKs { s, .. } => s.real_axis_only(),
            KernelKind::GpKphi { phi, .. } => phi.real_axis_only(),
        }
    }

    /// Right-hand side `R(p, q)` of the Sylvester equation.
    pub fn rhs(&self, p: Quaternion, q: Quaternion) -> Result<QMatrix> {
        let r = match &self.kind {
            KernelKind::HardyK => QMatrix::scalar(Quaternion::ONE),
            KernelKind::SchurKs { j1, j2, s } => {
                let sp = s.eval(p)?;
                let sq = s.eval(q)?;
                j2.try_sub(&sp.try_mul(j1)?.try_mul(&sq.adjoint())?)?
            }
            KernelKind::GpKphi { j, phi } => {
                let fp = phi.eval(p)?;
                let fq = phi.eval(q)?;
                j.try_mul(&fp)?.try_add(&fq.adjoint().try_mul(j)?)?
            }
        };
        Ok(r.scale(self.scale))
    }

    pub fn eval(&self, p: Quaternion, q: Quaternion) -> Result<QMatrix> {
        match &self.kind {
            KernelKind::HardyK => Ok(QMatrix::scalar(k_eval(p, q)? * self.scale)),
            _ => sylvester_kernel(p, q, &self.rhs(p, q)?),
        }
    }
}

/// `K_S(p, q)`; errors for non-Schur kernels.
pub fn schur_kernel_eval(spec: &KernelSpec, p: Quaternion, q: Quaternion) -> Result<QMatrix> {
    match spec.kind {
        KernelKind::SchurKs { .. } => spec.eval(p, q),
        _ => Err(QsliceError::Domain("not a Schur kernel".into())),
    }
}

/// `K_Phi(p, q)`; errors for other kernel kinds.
pub fn gp_kernel_eval(spec: &KernelSpec, p: Quaternion, q: Quaternion) -> Result<QMatrix> {
    match spec.kind {
        KernelKind::GpKphi { .. } => spec.eval(p, q),
        _ => Err(QsliceError::Domain("not a generalized-positive kernel".into())),
    }
}

/// Sample points with attached column vectors.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct GramSpec {
    pub points: Vec<Quaternion>,
    /// One column per point; empty means full kernel blocks.
    #[serde(default)]
    pub vectors: Vec<QMatrix>,
    #[serde(default)]
    pub seed: u64,
}

impl GramSpec {
    pub fn blocks(points: Vec<Quaternion>) -> Self {
        Self {
            points,
            vectors: Vec::new(),
            seed: 0,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.points.iter().any(|p| !(p.re() > 0.0)) {
            return Err(QsliceError::Domain("Gram points must have positive real part".into()));
        }
        if !self.vectors.is_empty() {
            if self.vectors.len() != self.points.len() {
                return Err(QsliceError::Domain("one vector per point is required".into()));
            }
            if self.vectors.iter().any(|v| v.shape() != (dim, 1)) {
                return Err(QsliceError::Domain(format!("vectors must be {dim}x1 columns")));
            }
        }
        for (a, &p) in self.points.iter().enumerate() {
            for &q in &self.points[a..] {
                check_nonsingular(p, q)?;
            }
        }
        Ok(())
    }
}

/// Gram matrix: entries `c_u* K(w_u, w_v) c_v`, or the block matrix
/// `[K(w_u, w_v)]` when no vectors are given. Symmetrized after assembly.
pub fn gram_matrix(spec: &KernelSpec, g: &GramSpec) -> Result<QMatrix> {
    let d = spec.dim();
    g.validate(d)?;
    let n = g.points.len();
    let block = if g.vectors.is_empty() { d } else { 1 };
    let mut out = QMatrix::zeros(n * block, n * block);
    for u in 0..n {
        for v in u..n {
            let k = spec.eval(g.points[u], g.points[v])?;
            let entry = if g.vectors.is_empty() {
                k
            } else {
                &(&g.vectors[u].adjoint() * &k) * &g.vectors[v]
            };
            for a in 0..block {
                for b in 0..block {
                    out[(u * block + a, v * block + b)] = entry[(a, b)];
                    out[(v * block + b, u * block + a)] = entry[(a, b)].conj();
                }
            }
        }
    }
    Ok(out.hermitian_part())
}

/// Inertia of a sampled Gram matrix, zero threshold
/// `max(dim eps max|lambda|, 1e-11 max|lambda|)`.
pub fn gram_signature(g: &QMatrix) -> Result<Signature> {
    let ev = hermitian_eigen(&chi_embed(g))?.values;
    let max_abs = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    halved_inertia(&ev, zero_threshold(ev.len(), max_abs, 1e-11 * max_abs))
}

/// Smallest eigenvalue of a Hermitian quaternionic matrix.
pub fn min_eigenvalue(g: &QMatrix) -> Result<f64> {
    let ev = hermitian_eigen(&chi_embed(g))?.values;
    Ok(ev.first().copied().unwrap_or(0.0))
}

/// Sampled lower bound for the number of negative squares.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KappaEstimate {
    pub kappa_hat: usize,
    pub trials: usize,
    pub max_gram_size: usize,
    pub per_trial: Vec<usize>,
}

/// Points of one sampling trial: reals in `[0.2, 3]` for real-axis kernels,
/// half-space points otherwise. Points where the kernel fails are redrawn.
pub fn sample_points(spec: &KernelSpec, count: usize, seed: u64) -> Result<Vec<Quaternion>> {
    let mut rng = sample::rng_from_seed(seed);
    let mut pts: Vec<Quaternion> = Vec::with_capacity(count);
    let mut attempts = 0;
    while pts.len() < count {
        attempts += 1;
        if attempts > 100 * count + 100 {
            return Err(QsliceError::Evaluation(
                "could not sample admissible kernel points".into(),
            ));
        }
        let p = if spec.real_axis_only() {
            Quaternion::real(rng.gen_range(0.2..=3.0))
        } else {
            sample::halfspace_point(&mut rng)
        };
        let admissible = spec.eval(p, p).is_ok_and(|k| k.is_finite())
            && pts.iter().all(|&q| spec.eval(p, q).is_ok_and(|k| k.is_finite()));
        if admissible {
            pts.push(p);
        }
    }
    Ok(pts)
}

/// Maximum of `nu_minus` over `trials` sampled block Grams of `max_points`
/// points each. Trial `t` draws from the stream `sub_seed(seed, t)`, so
/// extending `trials` never lowers the estimate.
pub fn estimate_negative_squares(
    spec: &KernelSpec,
    trials: usize,
    max_points: usize,
    seed: u64,
) -> Result<KappaEstimate> {
    if trials == 0 || max_points == 0 {
        return Err(QsliceError::Domain("trials and max_points must be positive".into()));
    }
    let mut per_trial = Vec::with_capacity(trials);
    let mut max_gram_size = 0;
    for t in 0..trials {
        let pts = sample_points(spec, max_points, sample::sub_seed(seed, t as u64))?;
        let g = gram_matrix(spec, &GramSpec::blocks(pts))?;
        max_gram_size = max_gram_size.max(g.rows());
        per_trial.push(gram_signature(&g)?.nu_minus);
    }
    Ok(KappaEstimate {
        kappa_hat: per_trial.iter().copied().max().unwrap_or(0),
        trials,
        max_gram_size,
        per_trial,
    })
}

/// Outcome of a congruence check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceResult {
    pub kappa_before: usize,
    pub kappa_after: usize,
    /// Points dropped because `alpha` was singular there.
    pub dropped: usize,
}

/// Negative squares of the sampled kernel before and after the congruence
/// `alpha(x) K(x, y) alpha(y)*` at real sample points.
pub fn congruence_kappa_check(
    spec: &KernelSpec,
    alpha: &PowerSeries,
    g: &GramSpec,
) -> Result<CongruenceResult> {
    let d = spec.dim();
    if alpha.shape() != (d, d) {
        return Err(QsliceError::Domain(format!("alpha must be {d}x{d}")));
    }
    if g.points.iter().any(|p| p.im_norm() != 0.0) {
        return Err(QsliceError::UnsupportedEvaluation(
            "congruence is evaluated at real points only".into(),
        ));
    }
    let mut kept = Vec::new();
    let mut alphas = Vec::new();
    for &p in &g.points {
        let a = alpha.eval(p);
        if qmat_inverse(&a).is_ok() {
            kept.push(p);
            alphas.push(a);
        }
    }
    let dropped = g.points.len() - kept.len();
    let spec_g = GramSpec::blocks(kept);
    let before = gram_matrix(spec, &spec_g)?;
    let n = spec_g.points.len();
    let mut after = QMatrix::zeros(n * d, n * d);
    for u in 0..n {
        for v in 0..n {
            let blk = before.block(u * d, v * d, d, d);
            let c = &(&alphas[u] * &blk) * &alphas[v].adjoint();
            for a in 0..d {
                for b in 0..d {
                    after[(u * d + a, v * d + b)] = c[(a, b)];
                }
            }
        }
    }
    let after = after.hermitian_part();
    Ok(CongruenceResult {
        kappa_before: gram_signature(&before)?.nu_minus,
        kappa_after: gram_signature(&after)?.nu_minus,
        dropped,
    })
}

/// Block sizes `(r1, c1)` of `S11`; `S22` is the trailing square block.
fn pg_blocks(s: &QMatrix, split: (usize, usize)) -> Result<(QMatrix, QMatrix, QMatrix, QMatrix)> {
    let (r1, c1) = split;
    let (rows, cols) = s.shape();
    if r1 > rows || c1 > cols || rows - r1 != cols - c1 || rows - r1 == 0 {
        return Err(QsliceError::Domain(format!(
            "split ({r1},{c1}) does not leave a square trailing block in a {rows}x{cols} matrix"
        )));
    }
    let q = rows - r1;
    Ok((
        s.block(0, 0, r1, c1),
        s.block(0, c1, r1, q),
        s.block(r1, 0, q, c1),
        s.block(r1, c1, q, q),
    ))
}

/// Potapov-Ginzburg transform of a value `S` split as `[[S11, S12], [S21, S22]]`:
/// `[[S11 - S12 S22^{-1} S21, -S12 S22^{-1}], [S22^{-1} S21, S22^{-1}]]`.
///
/// The transform is an involution and satisfies
/// `J2 - S(x) J1 S(y)* = A(x) (I - Sigma(x) Sigma(y)*) A(y)*`
/// with `A = [[I, S12], [0, S22]]`.
pub fn pg_transform(s: &QMatrix, split: (usize, usize)) -> Result<QMatrix> {
    let (s11, s12, s21, s22) = pg_blocks(s, split)?;
    let inv = qmat_inverse(&s22).map_err(|_| QsliceError::SingularBlock("S22"))?;
    let s12_inv = &s12 * &inv;
    let top_left = &s11 - &(&s12_inv * &s21);
    let bottom_left = &inv * &s21;
    QMatrix::from_blocks(&top_left, &(-&s12_inv), &bottom_left, &inv)
}

/// `A = [[I, S12], [0, S22]]` of the transform identity.
pub fn pg_left_factor(s: &QMatrix, split: (usize, usize)) -> Result<QMatrix> {
    let (_, s12, _, s22) = pg_blocks(s, split)?;
    let r1 = split.0;
    QMatrix::from_blocks(&QMatrix::identity(r1), &s12, &QMatrix::zeros(s22.rows(), r1), &s22)
}

/// Signature matrices `(J1, J2) = (diag(I_c1, -I_q), diag(I_r1, -I_q))`.
pub fn pg_signatures(s: &QMatrix, split: (usize, usize)) -> Result<(QMatrix, QMatrix)> {
    let (_, _, _, s22) = pg_blocks(s, split)?;
    let q = s22.rows();
    Ok((
        QMatrix::signature_matrix(split.1, q),
        QMatrix::signature_matrix(split.0, q),
    ))
}

/// Residual of `J2 - Sx J1 Sy* = A(x)(I - Sigma(x) Sigma(y)*) A(y)*`.
pub fn pg_identity_residual(sx: &QMatrix, sy: &QMatrix, split: (usize, usize)) -> Result<f64> {
    let (j1, j2) = pg_signatures(sx, split)?;
    let lhs = &j2 - &(&(sx * &j1) * &sy.adjoint());
    let gx = pg_transform(sx, split)?;
    let gy = pg_transform(sy, split)?;
    let ax = pg_left_factor(sx, split)?;
    let ay = pg_left_factor(sy, split)?;
    let mid = &QMatrix::identity(sx.rows()) - &(&gx * &gy.adjoint());
    let rhs = &(&ax * &mid) * &ay.adjoint();
    Ok(lhs.max_diff(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(k_eval(Quaternion::ONE, Quaternion::ONE).unwrap(), Quaternion::real(0.5));
        let k = k_eval(q(1.0, 1.0, 0.0, 0.0), q(2.0, 1.0, 0.0, 0.0)).unwrap();
        assert!(k.max_abs_diff(Quaternion::real(1.0 / 3.0)) < 1e-15);
        let k = k_eval(q(1.0, 1.0, 0.0, 0.0), q(2.0, 0.0, 1.0, 0.0)).unwrap();
        let expected = q(11.0, -3.0, 3.0, -2.0) / 39.0;
        assert!(k.max_abs_diff(expected) < 1e-15, "{k}");
        let k2 = k_eval_alt(q(1.0, 1.0, 0.0, 0.0), q(2.0, 0.0, 1.0, 0.0)).unwrap();
        assert!(k2.max_abs_diff(expected) < 1e-15);
    }

    #[test]
    fn singular_sphere_detected() {
        let p = q(-1.0, 0.0, 1.0, 0.0);
        let r = q(1.0, 1.0, 0.0, 0.0);
        assert_eq!(k_eval(p, r).unwrap_err(), QsliceError::SingularKernelPoint);
        assert!(k_eval(q(1.0, 0.0, 1.0, 0.0), r).is_ok());
    }

    #[test]
    fn identity_residual_small() {
        assert_eq!(k_identity_residual(Quaternion::ONE, Quaternion::ONE).unwrap(), 0.0);
        let r = k_identity_residual(q(1.0, 1.0, 0.0, 0.0), q(2.0, 0.0, 1.0, 0.0)).unwrap();
        assert!(r <= 1e-13);
    }

    #[test]
    fn hardy_gram_at_one_and_two() {
        let g = gram_matrix(
            &KernelSpec::hardy(),
            &GramSpec::blocks(vec![Quaternion::ONE, Quaternion::real(2.0)]),
        )
        .unwrap();
        let expected = QMatrix::from_real_rows(&[&[0.5, 1.0 / 3.0], &[1.0 / 3.0, 0.25]]).unwrap();
        assert!(g.max_diff(&expected) < 1e-15);
    }

    #[test]
    fn schur_kernel_of_constant_is_zero() {
        let one = QMatrix::identity(1);
        let spec = KernelSpec::schur(
            one.clone(),
            one.clone(),
            SliceMatrixFn::Series(PowerSeries::real_scalar(0.0, &[1.0])),
        )
        .unwrap();
        let k = schur_kernel_eval(&spec, q(1.0, 0.3, 0.0, 0.2), q(0.5, 0.0, 1.0, 0.0)).unwrap();
        assert!(k.max_abs() < 1e-15);
    }

    #[test]
    fn gp_kernel_of_one_is_twice_k() {
        let spec = KernelSpec::gp(
            QMatrix::identity(1),
            SliceMatrixFn::Series(PowerSeries::real_scalar(0.0, &[1.0])),
        )
        .unwrap();
        let (p, r) = (q(1.0, 0.3, 0.0, 0.2), q(0.5, 0.0, 1.0, 0.0));
        let k = gp_kernel_eval(&spec, p, r).unwrap();
        let expected = k_eval(p, r).unwrap() * 2.0;
        assert!(k[(0, 0)].max_abs_diff(expected) < 1e-14);
    }

    #[test]
    fn pg_examples() {
        let s = QMatrix::diag(&[q(0.5, 0.1, 0.0, 0.0), q(2.0, 0.0, 0.0, 1.0)]);
        let sigma = pg_transform(&s, (1, 1)).unwrap();
        let expected = QMatrix::diag(&[q(0.5, 0.1, 0.0, 0.0), q(2.0, 0.0, 0.0, 1.0).inverse().unwrap()]);
        assert!(sigma.max_diff(&expected) < 1e-15);
        let back = pg_transform(&sigma, (1, 1)).unwrap();
        assert!(back.max_diff(&s) < 1e-15);
        let sing = QMatrix::diag(&[Quaternion::ONE, Quaternion::ZERO]);
        assert_eq!(pg_transform(&sing, (1, 1)).unwrap_err(), QsliceError::SingularBlock("S22"));
    }
}
