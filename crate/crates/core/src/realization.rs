//! State-space realizations: S-spectrum, star resolvents, co-isometric
//! Schur realizations, characteristic operator functions, generalized
//! positive realizations, the anti-self-adjoint pair model, and the
//! inverse/product algebra of backward-shift quadruples.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QsliceError, Result};
use crate::kernel::is_signature_matrix;
use crate::qlinalg::{chi_embed, complex_eigenvalues, qmat_inverse, signature, QMatrix};
use crate::quat::Quaternion;
use crate::sample::{self, SampleRng};
use crate::slicefn::SliceMatrixFn;

/// Invariant tolerance of realization data.
pub const DATA_TOL: f64 = 1e-10;

fn pencil_inverse(m: &QMatrix, err: QsliceError) -> Result<QMatrix> {
    qmat_inverse(m).map_err(|_| err)
}

/// S-spectrum of a square matrix: one representative `x + i y` (`y >= 0`)
/// per sphere, with multiplicity, sorted by `(x, y)`.
pub fn s_spectrum(a: &QMatrix) -> Result<Vec<Quaternion>> {
    if !a.is_square() {
        return Err(QsliceError::Domain("S-spectrum needs a square matrix".into()));
    }
    let ev = complex_eigenvalues(&chi_embed(a))?;
    let mut reps: Vec<(f64, f64)> = ev.iter().map(|z| (z.re, z.im.abs())).collect();
    reps.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    // chi doubles every sphere: eigenvalues come as conjugate pairs
    Ok(reps
        .chunks(2)
        .map(|c| Quaternion::new(0.5 * (c[0].0 + c[1].0), 0.5 * (c[0].1 + c[1].1), 0.0, 0.0))
        .collect())
}

/// Slice extension of `x -> G (I - x A)^{-1}`:
/// `(G - pbar G A)(I - 2 Re(p) A + |p|^2 A^2)^{-1}`.
pub fn resolvent_star(g: &QMatrix, a: &QMatrix, p: Quaternion) -> Result<QMatrix> {
    let n = a.rows();
    let a2 = a * a;
    let pencil = &(&QMatrix::identity(n) - &a.scale(2.0 * p.re())) + &a2.scale(p.norm_sqr());
    let inv = pencil_inverse(&pencil, QsliceError::ResolventSingular)?;
    let num = g - &g.try_mul(a)?.scale_left(p.conj());
    num.try_mul(&inv)
}

/// Slice extension of `x -> C (x I - T)^{-1}`:
/// `(pbar C - C T)(|p|^2 I - 2 Re(p) T + T^2)^{-1}`.
pub fn affine_resolvent_star(c: &QMatrix, t: &QMatrix, p: Quaternion) -> Result<QMatrix> {
    let n = t.rows();
    let pencil = &(&QMatrix::identity(n).scale(p.norm_sqr()) - &t.scale(2.0 * p.re())) + &(t * t);
    let inv = pencil_inverse(&pencil, QsliceError::ResolventSingular)?;
    let num = &c.scale_left(p.conj()) - &c.try_mul(t)?;
    num.try_mul(&inv)
}

fn identity_default() -> Option<QMatrix> {
    None
}

/// Realization `S(p) = H - (p - x0) G * ((p + x0) I + (p - x0) B)^{-*} F`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchurRealization {
    pub x0: f64,
    #[serde(rename = "B")]
    pub b: QMatrix,
    #[serde(rename = "F")]
    pub f: QMatrix,
    #[serde(rename = "G")]
    pub g: QMatrix,
    #[serde(rename = "H")]
    pub h: QMatrix,
    /// State metric; identity when absent.
    #[serde(default = "identity_default", skip_serializing_if = "Option::is_none")]
    pub state_metric: Option<QMatrix>,
    /// Input signature; identity when absent.
    #[serde(default = "identity_default", rename = "J1", skip_serializing_if = "Option::is_none")]
    pub j1: Option<QMatrix>,
    /// Output signature; identity when absent.
    #[serde(default = "identity_default", rename = "J2", skip_serializing_if = "Option::is_none")]
    pub j2: Option<QMatrix>,
}

/// Evaluation path of [`schur_eval_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchurEvalMode {
    /// Intrinsic Mobius coordinate `lambda(p) = (p - x0)(p + x0)^{-1}`;
    /// exact on the real axis and slice regular.
    #[default]
    Mobius,
    /// Literal display with `A = -(B + I)/x0`,
    /// `H - (p - x0)(G - mu_bar G A)(|mu|^2 A^2 - 2 Re(mu) A + I)^{-1} F`,
    /// `mu = (p - x0)(p + x0)^{-1}`. Agrees with `Mobius` only at `p = x0`.
    Literal,
}

impl SchurRealization {
    pub fn new(x0: f64, b: QMatrix, f: QMatrix, g: QMatrix, h: QMatrix) -> Result<Self> {
        let r = Self {
            x0,
            b,
            f,
            g,
            h,
            state_metric: None,
            j1: None,
            j2: None,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x0 > 0.0) {
            return Err(QsliceError::Domain("x0 must be positive".into()));
        }
        let n = self.b.rows();
        if !self.b.is_square()
            || self.f.rows() != n
            || self.g.cols() != n
            || self.h.rows() != self.g.rows()
            || self.h.cols() != self.f.cols()
        {
            return Err(QsliceError::Domain("inconsistent realization block shapes".into()));
        }
        if let Some(m) = &self.state_metric {
            if m.shape() != (n, n) || !is_signature_matrix(m, 1e-12) {
                return Err(QsliceError::Domain("state metric must be an n x n signature matrix".into()));
            }
        }
        for (j, dim) in [(&self.j1, self.f.cols()), (&self.j2, self.g.rows())] {
            if let Some(j) = j {
                if j.shape() != (dim, dim) || !is_signature_matrix(j, 1e-12) {
                    return Err(QsliceError::Domain("J1/J2 must be signature matrices".into()));
                }
            }
        }
        Ok(())
    }

    pub fn state_dim(&self) -> usize {
        self.b.rows()
    }

    pub fn metric(&self) -> QMatrix {
        self.state_metric.clone().unwrap_or_else(|| QMatrix::identity(self.state_dim()))
    }

    pub fn j_in(&self) -> QMatrix {
        self.j1.clone().unwrap_or_else(|| QMatrix::identity(self.f.cols()))
    }

    pub fn j_out(&self) -> QMatrix {
        self.j2.clone().unwrap_or_else(|| QMatrix::identity(self.g.rows()))
    }

    /// `M = [[B, F], [G, H]]`.
    pub fn operator_matrix(&self) -> QMatrix {
        QMatrix::from_blocks(&self.b, &self.f, &self.g, &self.h).expect("validated shapes")
    }

    /// `lambda(p) = (p - x0)(p + x0)^{-1}`.
    pub fn mobius(&self, p: Quaternion) -> Result<Quaternion> {
        let x0 = Quaternion::real(self.x0);
        Ok((p - x0) * (p + x0).inverse().map_err(|_| QsliceError::EvaluationSingular)?)
    }

    /// `G((p + x0) I + (p - x0) B)^{-*}`, the extended output map.
    pub fn output_map(&self, p: Quaternion) -> Result<QMatrix> {
        let lam = self.mobius(p)?;
        let inv = (p + Quaternion::real(self.x0)).inverse().map_err(|_| QsliceError::EvaluationSingular)?;
        let r = resolvent_star(&self.g, &(-&self.b), lam).map_err(|_| QsliceError::EvaluationSingular)?;
        Ok(r.scale_left(inv))
    }

    /// `K(p, q) = 2 x0 G(p) J_st G(q)*`, the kernel of the realized function.
    pub fn kernel(&self, p: Quaternion, q: Quaternion) -> Result<QMatrix> {
        let gp = self.output_map(p)?;
        let gq = self.output_map(q)?;
        Ok((&(&gp * &self.metric()) * &gq.adjoint()).scale(2.0 * self.x0))
    }

    pub fn eval(&self, p: Quaternion) -> Result<QMatrix> {
        schur_eval(self, p)
    }

    /// The realized function as a shareable evaluator.
    pub fn to_fn(&self) -> SliceMatrixFn {
        let r = Arc::new(self.clone());
        SliceMatrixFn::Slice(Arc::new(move |p| r.eval(p)))
    }
}

pub fn schur_eval(r: &SchurRealization, p: Quaternion) -> Result<QMatrix> {
    schur_eval_with(r, p, SchurEvalMode::Mobius)
}

pub fn schur_eval_with(r: &SchurRealization, p: Quaternion, mode: SchurEvalMode) -> Result<QMatrix> {
    let lam = r.mobius(p)?;
    match mode {
        SchurEvalMode::Mobius => {
            let res = resolvent_star(&r.g, &(-&r.b), lam).map_err(|_| QsliceError::EvaluationSingular)?;
            Ok(&r.h - &(&res * &r.f).scale_left(lam))
        }
        SchurEvalMode::Literal => {
            let n = r.state_dim();
            let a = (&r.b + &QMatrix::identity(n)).scale(-1.0 / r.x0);
            let pencil = &(&(&a * &a).scale(lam.norm_sqr()) - &a.scale(2.0 * lam.re()))
                + &QMatrix::identity(n);
            let inv = pencil_inverse(&pencil, QsliceError::EvaluationSingular)?;
            let left = &r.g - &(&r.g * &a).scale_left(lam.conj());
            let corr = (&(&left * &inv) * &r.f).scale_left(p - Quaternion::real(r.x0));
            Ok(&r.h - &corr)
        }
    }
}

/// `||M diag(J_st, J1) M* - diag(J_st, J2)||_max`.
pub fn coisometry_residual(r: &SchurRealization) -> f64 {
    let m = r.operator_matrix();
    let jin = QMatrix::block_diag(&r.metric(), &r.j_in());
    let jout = QMatrix::block_diag(&r.metric(), &r.j_out());
    (&(&m * &jin) * &m.adjoint()).max_diff(&jout)
}

/// Realization of `b_a` centered at `x0 = 1`.
pub fn blaschke_realization(a: Quaternion) -> Result<SchurRealization> {
    if !(a.re() > 0.0) {
        return Err(QsliceError::Domain(format!("{a} is not in the right half-space")));
    }
    let one = Quaternion::ONE;
    let inv = (one + a.conj()).inverse()?;
    let s = 2.0 * a.re().sqrt();
    SchurRealization::new(
        1.0,
        QMatrix::scalar((one - a.conj()) * inv),
        QMatrix::scalar(inv * s),
        QMatrix::scalar(-(inv * s)),
        QMatrix::scalar((one - a) * inv),
    )
}

/// `(J2 - S(x) J1 S(y)*)/(x + y)` against
/// `2 x0 G P_x^{-1} J_st P_y^{-*} G*`, `P_x = (x + x0) I + (x - x0) B`.
pub fn step9_residual(r: &SchurRealization, x: f64, y: f64) -> Result<f64> {
    let sx = r.eval(Quaternion::real(x))?;
    let sy = r.eval(Quaternion::real(y))?;
    let lhs = (&r.j_out() - &(&(&sx * &r.j_in()) * &sy.adjoint())).scale(1.0 / (x + y));
    let n = r.state_dim();
    let pencil = |t: f64| -> Result<QMatrix> {
        let m = &QMatrix::identity(n).scale(t + r.x0) + &r.b.scale(t - r.x0);
        pencil_inverse(&m, QsliceError::EvaluationSingular)
    };
    let px = pencil(x)?;
    let py = pencil(y)?;
    let rhs = (&(&(&(&r.g * &px) * &r.metric()) * &py.adjoint()) * &r.g.adjoint()).scale(2.0 * r.x0);
    Ok(lhs.max_diff(&rhs))
}

/// Random realization with `M M* = I` built from the first `n + h2` rows
/// of a random unitary of size `n + h1` (`h2 <= h1`).
pub fn random_coisometric(rng: &mut SampleRng, n: usize, h1: usize, h2: usize, x0: f64) -> Result<SchurRealization> {
    if h2 > h1 {
        return Err(QsliceError::Domain("co-isometric data needs h2 <= h1".into()));
    }
    let u = sample::unitary(rng, n + h1);
    let m = u.block(0, 0, n + h2, n + h1);
    SchurRealization::new(
        x0,
        m.block(0, 0, n, n),
        m.block(0, n, n, h1),
        m.block(n, 0, h2, n),
        m.block(n, n, h2, h1),
    )
}

/// Random realization co-isometric in the metric `diag(J_st, I_h)` with
/// `J_st = diag(I_{n-neg}, -I_neg)`: unitaries preserving the metric
/// around a hyperbolic boost mixing each negative state coordinate with a
/// positive one.
pub fn random_krein_realization(rng: &mut SampleRng, n: usize, neg: usize, h: usize, x0: f64) -> Result<SchurRealization> {
    let total = n + h;
    let pos = total - neg.min(total);
    if neg > n || neg > pos {
        return Err(QsliceError::Domain("need neg <= n and neg <= n + h - neg".into()));
    }
    // coordinates in metric order: positive state, negative state, outputs
    let positive: Vec<usize> = (0..n - neg).chain(n..total).collect();
    let negative: Vec<usize> = (n - neg..n).collect();
    let mut preserving = || {
        let up = sample::unitary(rng, positive.len());
        let un = sample::unitary(rng, negative.len());
        let mut u = QMatrix::zeros(total, total);
        for (a, &r) in positive.iter().enumerate() {
            for (b, &c) in positive.iter().enumerate() {
                u[(r, c)] = up[(a, b)];
            }
        }
        for (a, &r) in negative.iter().enumerate() {
            for (b, &c) in negative.iter().enumerate() {
                u[(r, c)] = un[(a, b)];
            }
        }
        u
    };
    let u1 = preserving();
    let u2 = preserving();
    let mut boost = QMatrix::identity(total);
    for (k, &m) in negative.iter().enumerate() {
        let p = positive[k];
        let t: f64 = rng.gen_range(0.2..1.0);
        boost[(p, p)] = Quaternion::real(t.cosh());
        boost[(m, m)] = Quaternion::real(t.cosh());
        boost[(p, m)] = Quaternion::real(t.sinh());
        boost[(m, p)] = Quaternion::real(t.sinh());
    }
    let m = &(&u1 * &boost) * &u2;
    let mut r = SchurRealization {
        x0,
        b: m.block(0, 0, n, n),
        f: m.block(0, n, n, h),
        g: m.block(n, 0, h, n),
        h: m.block(n, n, h, h),
        state_metric: Some(QMatrix::signature_matrix(n - neg, neg)),
        j1: None,
        j2: None,
    };
    r.validate()?;
    let res = coisometry_residual(&r);
    if !(res <= DATA_TOL) {
        return Err(QsliceError::ConstructionFailure(format!("co-isometry residual {res:e}")));
    }
    if neg == 0 {
        r.state_metric = None;
    }
    Ok(r)
}

/// Characteristic operator function data, `A + A* = -C J C*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CofData {
    #[serde(rename = "A")]
    pub a: QMatrix,
    #[serde(rename = "C")]
    pub c: QMatrix,
    #[serde(rename = "J")]
    pub j: QMatrix,
}

impl CofData {
    pub fn new(a: QMatrix, c: QMatrix, j: QMatrix) -> Result<Self> {
        let d = Self { a, c, j };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.a.rows();
        let m = self.j.rows();
        if !self.a.is_square() || self.c.shape() != (n, m) || !is_signature_matrix(&self.j, 1e-12) {
            return Err(QsliceError::Domain("COF data needs A n x n, C n x m, J signature".into()));
        }
        let r = self.invariant_residual();
        if !(r <= DATA_TOL) {
            return Err(QsliceError::Domain(format!("A + A* + C J C* = {r:e}")));
        }
        Ok(())
    }

    /// `||A + A* + C J C*||_max`.
    pub fn invariant_residual(&self) -> f64 {
        let s = &(&self.a + &self.a.adjoint()) + &(&(&self.c * &self.j) * &self.c.adjoint());
        s.max_abs()
    }

    /// `C*(I - p A)^{-*}` extended.
    pub fn output_map(&self, p: Quaternion) -> Result<QMatrix> {
        resolvent_star(&self.c.adjoint(), &self.a, p)
    }

    /// `K(p, q) = C(p) C(q)*` with `C(p)` the extended output map.
    pub fn kernel(&self, p: Quaternion, q: Quaternion) -> Result<QMatrix> {
        Ok(&self.output_map(p)? * &self.output_map(q)?.adjoint())
    }

    pub fn eval(&self, p: Quaternion) -> Result<QMatrix> {
        cof_eval(self, p)
    }

    pub fn to_fn(&self) -> SliceMatrixFn {
        let d = Arc::new(self.clone());
        SliceMatrixFn::Slice(Arc::new(move |p| d.eval(p)))
    }
}

/// `S(p) = I - p C* * (I - p A)^{-*} C J`.
pub fn cof_eval(d: &CofData, p: Quaternion) -> Result<QMatrix> {
    let m = d.j.rows();
    let r = d.output_map(p)?;
    Ok(&QMatrix::identity(m) - &(&(&r * &d.c) * &d.j).scale_left(p))
}

/// `||J - S(p) J S(q)* - (p K + K qbar)||_max`.
pub fn cof_identity_residual(d: &CofData, p: Quaternion, q: Quaternion) -> Result<f64> {
    let sp = d.eval(p)?;
    let sq = d.eval(q)?;
    let lhs = &d.j - &(&(&sp * &d.j) * &sq.adjoint());
    let k = d.kernel(p, q)?;
    let rhs = &k.scale_left(p) + &k.scale_right(q.conj());
    Ok(lhs.max_diff(&rhs))
}

/// Random COF data: `A = K - C J C*/2` with `K` anti-Hermitian and a
/// signature `J` with `neg` negative entries.
pub fn random_cof(rng: &mut SampleRng, n: usize, m: usize, neg: usize) -> Result<CofData> {
    let k = sample::antihermitian(rng, n, 1.0);
    let c = sample::qmatrix(rng, n, m, 1.0);
    let j = QMatrix::signature_matrix(m - neg.min(m), neg.min(m));
    let a = &k - &(&(&c * &j) * &c.adjoint()).scale(0.5);
    CofData::new(a, c, j)
}

/// Backward-shift quadruple `Phi(p) = D + p C * (I - p A)^{-*} B`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GpBackwardShift {
    #[serde(rename = "A")]
    pub a: QMatrix,
    #[serde(rename = "B")]
    pub b: QMatrix,
    #[serde(rename = "C")]
    pub c: QMatrix,
    #[serde(rename = "D")]
    pub d: QMatrix,
}

impl GpBackwardShift {
    pub fn new(a: QMatrix, b: QMatrix, c: QMatrix, d: QMatrix) -> Result<Self> {
        let n = a.rows();
        if !a.is_square() || b.rows() != n || c.cols() != n || d.rows() != c.rows() || d.cols() != b.cols() {
            return Err(QsliceError::Domain("inconsistent quadruple shapes".into()));
        }
        Ok(Self { a, b, c, d })
    }

    /// Identity quadruple of size `m` with no state.
    pub fn identity(m: usize) -> Self {
        Self {
            a: QMatrix::zeros(0, 0),
            b: QMatrix::zeros(0, m),
            c: QMatrix::zeros(m, 0),
            d: QMatrix::identity(m),
        }
    }

    pub fn operator_matrix(&self) -> QMatrix {
        QMatrix::from_blocks(&self.a, &self.b, &self.c, &self.d).expect("validated shapes")
    }

    /// `Re(M diag(I, -I))` with `Re X = (X + X*)/2`.
    pub fn re_condition(&self) -> QMatrix {
        let n = self.a.rows();
        let m = self.b.cols();
        let md = &self.operator_matrix() * &QMatrix::signature_matrix(n, m);
        md.hermitian_part()
    }

    pub fn eval(&self, p: Quaternion) -> Result<QMatrix> {
        gp_backward_shift_eval(self, p)
    }

    pub fn to_fn(&self) -> SliceMatrixFn {
        let d = Arc::new(self.clone());
        SliceMatrixFn::Slice(Arc::new(move |p| d.eval(p)))
    }
}

pub fn gp_backward_shift_eval(d: &GpBackwardShift, p: Quaternion) -> Result<QMatrix> {
    if d.a.rows() == 0 {
        return Ok(d.d.clone());
    }
    let r = resolvent_star(&d.c, &d.a, p)?;
    Ok(&d.d + &(&r * &d.b).scale_left(p))
}

/// Quadruple of `(p + a)^{-*}` for purely imaginary `a`:
/// `A = -a^{-1}`, `B = a^{-1}`, `C = -a^{-1}`, `D = a^{-1}`.
pub fn shift_inverse_example(a: Quaternion) -> Result<GpBackwardShift> {
    if a.re() != 0.0 {
        return Err(QsliceError::Domain("the example needs a purely imaginary a".into()));
    }
    let ai = a.inverse()?;
    GpBackwardShift::new(
        QMatrix::scalar(-ai),
        QMatrix::scalar(ai),
        QMatrix::scalar(-ai),
        QMatrix::scalar(ai),
    )
}

/// Quadruple realizing the star inverse:
/// `(A - B D^{-1} C, B D^{-1}, -D^{-1} C, D^{-1})`.
pub fn realization_inverse(d: &GpBackwardShift) -> Result<GpBackwardShift> {
    let di = qmat_inverse(&d.d).map_err(|_| QsliceError::SingularBlock("D"))?;
    let bdi = &d.b * &di;
    GpBackwardShift::new(&d.a - &(&bdi * &d.c), bdi, -&(&di * &d.c), di)
}

/// Cascade realizing the star product `Phi1 * Phi2`.
pub fn realization_product(d1: &GpBackwardShift, d2: &GpBackwardShift) -> Result<GpBackwardShift> {
    if d1.d.cols() != d2.d.rows() {
        return Err(QsliceError::Domain("quadruples do not compose".into()));
    }
    let (n1, n2) = (d1.a.rows(), d2.a.rows());
    let a = QMatrix::from_blocks(&d1.a, &d1.b.try_mul(&d2.c)?, &QMatrix::zeros(n2, n1), &d2.a)?;
    let b = QMatrix::from_blocks(
        &d1.b.try_mul(&d2.d)?,
        &QMatrix::zeros(n1, 0),
        &d2.b,
        &QMatrix::zeros(n2, 0),
    )?;
    let c = QMatrix::from_blocks(
        &d1.c,
        &d1.d.try_mul(&d2.c)?,
        &QMatrix::zeros(0, n1),
        &QMatrix::zeros(0, n2),
    )?;
    GpBackwardShift::new(a, b, c, d1.d.try_mul(&d2.d)?)
}

/// Random quadruple with `Re(M diag(I, -I)) = -P <= 0`:
/// `M = (K - P) diag(I, -I)` with `K` anti-Hermitian, `P` positive.
pub fn random_gp_positive(rng: &mut SampleRng, n: usize, m: usize) -> Result<GpBackwardShift> {
    let k = sample::antihermitian(rng, n + m, 1.0);
    let w = sample::qmatrix(rng, n + m, n + m, 0.5);
    let p = &w * &w.adjoint();
    let md = &(&k - &p) * &QMatrix::signature_matrix(n, m);
    GpBackwardShift::new(
        md.block(0, 0, n, n),
        md.block(0, n, n, m),
        md.block(n, 0, m, n),
        md.block(n, n, m, m),
    )
}

/// Centered realization of a generalized positive function, with
/// `T = I + 2 x0 B` unitary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SchurRealization", into = "SchurRealization")]
pub struct GpRealization(SchurRealization);

impl TryFrom<SchurRealization> for GpRealization {
    type Error = QsliceError;
    fn try_from(r: SchurRealization) -> Result<Self> {
        Self::new(r)
    }
}

impl From<GpRealization> for SchurRealization {
    fn from(r: GpRealization) -> Self {
        r.0
    }
}

impl GpRealization {
    pub fn new(r: SchurRealization) -> Result<Self> {
        r.validate()?;
        let res = t_unitarity_residual(&r);
        if !(res <= DATA_TOL) {
            return Err(QsliceError::Domain(format!("I + 2 x0 B is not unitary ({res:e})")));
        }
        Ok(Self(r))
    }

    pub fn inner(&self) -> &SchurRealization {
        &self.0
    }

    pub fn eval(&self, p: Quaternion) -> Result<QMatrix> {
        schur_eval(&self.0, p)
    }

    pub fn to_fn(&self) -> SliceMatrixFn {
        self.0.to_fn()
    }
}

/// `||T T* - I||_max`, `T = I + 2 x0 B`.
pub fn t_unitarity_residual(r: &SchurRealization) -> f64 {
    let n = r.state_dim();
    let t = &QMatrix::identity(n) + &r.b.scale(2.0 * r.x0);
    (&t * &t.adjoint()).max_diff(&QMatrix::identity(n))
}

/// `||R + R* + 2 x0 R* R||_max` with `R = (T - I)/(2 x0) = B`.
pub fn r1r1_residual(r: &SchurRealization) -> f64 {
    let b = &r.b;
    let s = &(b + &b.adjoint()) + &(&b.adjoint() * b).scale(2.0 * r.x0);
    s.max_abs()
}

/// Validates a centered realization as generalized positive.
pub fn gp_realization_eval(r: SchurRealization) -> Result<GpRealization> {
    GpRealization::new(r)
}

/// Pair of anti-self-adjoint matrices with `Tp - Tm = -C* J C`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairModel {
    #[serde(rename = "Tp")]
    pub tp: QMatrix,
    #[serde(rename = "Tm")]
    pub tm: QMatrix,
    #[serde(rename = "C")]
    pub c: QMatrix,
    #[serde(rename = "J")]
    pub j: QMatrix,
}

impl PairModel {
    pub fn new(tp: QMatrix, tm: QMatrix, c: QMatrix, j: QMatrix) -> Result<Self> {
        let m = Self { tp, tm, c, j };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.tp.rows();
        let k = self.j.rows();
        if !self.tp.is_square() || self.tm.shape() != (n, n) || self.c.shape() != (k, n) || !self.j.is_square() {
            return Err(QsliceError::Domain("pair model needs Tp, Tm n x n, C m x n, J m x m".into()));
        }
        let checks = [
            ("Tp", self.tp.antihermitian_residual()),
            ("Tm", self.tm.antihermitian_residual()),
            ("J", self.j.antihermitian_residual()),
            ("J^2 + I", (&self.j * &self.j).max_diff(&(-&QMatrix::identity(k)))),
            ("Tp - Tm + C*JC", self.invariant_residual()),
        ];
        for (name, r) in checks {
            if !(r <= DATA_TOL) {
                return Err(QsliceError::Domain(format!("pair model invariant {name}: {r:e}")));
            }
        }
        Ok(())
    }

    /// `||Tp - Tm + C* J C||_max`.
    pub fn invariant_residual(&self) -> f64 {
        let s = &(&self.tp - &self.tm) + &(&(&self.c.adjoint() * &self.j) * &self.c);
        s.max_abs()
    }

    /// `C(p I - Tp)^{-*}` extended.
    pub fn output_map(&self, p: Quaternion) -> Result<QMatrix> {
        affine_resolvent_star(&self.c, &self.tp, p)
    }

    /// `K(p, q) = C(p) C(q)*`, with `Phi(p) + Phi(q)* = p K + K qbar`.
    pub fn kernel(&self, p: Quaternion, q: Quaternion) -> Result<QMatrix> {
        Ok(&self.output_map(p)? * &self.output_map(q)?.adjoint())
    }

    pub fn eval(&self, p: Quaternion) -> Result<QMatrix> {
        pair_phi_eval(self, p)
    }

    pub fn to_fn(&self) -> SliceMatrixFn {
        let d = Arc::new(self.clone());
        SliceMatrixFn::Slice(Arc::new(move |p| d.eval(p)))
    }
}

/// `Phi(p) = J + C * (p I - Tp)^{-*} C*`.
pub fn pair_phi_eval(m: &PairModel, p: Quaternion) -> Result<QMatrix> {
    Ok(&m.j + &(&m.output_map(p)? * &m.c.adjoint()))
}

/// `Phi^{-*}(p) = -J - (J C) * (p I - Tm)^{-*} C* J`.
pub fn pair_phi_inverse_eval(m: &PairModel, p: Quaternion) -> Result<QMatrix> {
    let jc = &m.j * &m.c;
    let r = affine_resolvent_star(&jc, &m.tm, p)?;
    Ok(&(-&m.j) - &(&(&r * &m.c.adjoint()) * &m.j))
}

/// Random pair model: `Tp` anti-Hermitian, `J = -i I_m`, `Tm = Tp + C* J C`.
pub fn random_pair_model(rng: &mut SampleRng, n: usize, m: usize) -> Result<PairModel> {
    let tp = sample::antihermitian(rng, n, 1.0);
    let c = sample::qmatrix(rng, m, n, 1.0);
    let j = QMatrix::diag(&vec![-Quaternion::I; m]);
    let tm = &tp + &(&(&c.adjoint() * &j) * &c);
    PairModel::new(tp, tm, c, j)
}

/// Real probe points uniform in `[lo, hi]`.
pub fn real_probes(rng: &mut SampleRng, count: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..count).map(|_| rng.gen_range(lo..=hi)).collect()
}

/// Negative index of a state metric.
pub fn state_index(r: &SchurRealization) -> Result<usize> {
    Ok(signature(&r.metric(), 1e-12)?.nu_minus)
}
