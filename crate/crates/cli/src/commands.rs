use qslice_core::blaschke::{
    boundary_modulus_check, convergence_diagnostic, prescribe_zeros, product_eval, real_derivative, sphere_samples,
    BlaschkeFactor, Factor, SphereFactor, ZeroSet, ZERO_CHECK_TOL,
};
use qslice_core::kernel::{
    estimate_negative_squares, gram_matrix, k_eval, k_eval_alt, k_identity_residual, min_eigenvalue, pg_identity_residual,
    pg_transform, sample_points, singular_distance, GramSpec, KernelSpec,
};
use qslice_core::realization::{
    coisometry_residual, cof_identity_residual, pair_phi_eval, pair_phi_inverse_eval, real_probes, realization_inverse,
    state_index, step9_residual, CofData, GpBackwardShift, PairModel, SchurRealization,
};
use qslice_core::sample::{self, rng_from_seed, sub_seed, SampleRng};
use qslice_core::{PowerSeries, QMatrix, Quaternion, SliceMatrixFn};
use clap::ValueEnum;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::*;
use crate::input::{parse_quaternion, read_json, require};
use crate::report::Checks;
use crate::CliError;

pub type Outcome = Result<(Checks, Value), CliError>;

fn internal(e: qslice_core::QsliceError) -> CliError {
    CliError::Internal(e.to_string())
}

fn invalid(e: qslice_core::QsliceError) -> CliError {
    CliError::Input(e.to_string())
}

pub fn eval(a: &EvalArgs, checks: Checks) -> Outcome {
    let p = parse_quaternion("p", &a.p)?;
    let value = match a.model {
        EvalModel::Blaschke | EvalModel::Sphere => {
            let zero = parse_quaternion("a", require("a", &a.a)?)?;
            if a.model == EvalModel::Blaschke {
                BlaschkeFactor::new(zero).map_err(invalid)?.eval(p)
            } else {
                SphereFactor::new(zero).map_err(invalid)?.eval(p)
            }
            .map(|v| json!(v))
        }
        EvalModel::Kernel => {
            let q = parse_quaternion("q", require("q", &a.q)?)?;
            k_eval(p, q).map(|v| json!(v))
        }
        EvalModel::Series => {
            let s: PowerSeries = read_json(require("data", &a.data)?)?;
            s.validate().map_err(invalid)?;
            if s.outside_radius(p) {
                return Err(CliError::Input(format!("{p} lies outside the series radius")));
            }
            Ok(json!(s.eval(p)))
        }
        EvalModel::Product => {
            let zs: ZeroSet = read_json(require("data", &a.data)?)?;
            let factors = prescribe_zeros(&zs).map_err(invalid)?;
            product_eval(&factors, p).map(|v| json!(v.value))
        }
    }
    .map_err(internal)?;
    let mut checks = checks;
    let finite = value_is_finite(&value);
    checks.push("value_finite", if finite { 0.0 } else { f64::INFINITY }, 0.0);
    Ok((checks, json!({ "model": a.model.to_possible_value().map(|v| v.get_name().to_string()), "p": p, "value": value })))
}

fn value_is_finite(v: &Value) -> bool {
    match v {
        Value::Number(n) => n.as_f64().is_some_and(f64::is_finite),
        Value::Array(a) => a.iter().all(value_is_finite),
        Value::Object(o) => o.values().all(value_is_finite),
        Value::Null => false,
        _ => true,
    }
}

/// Random half-space pairs off the singular sphere of `k`.
pub fn kernel_pairs(rng: &mut SampleRng, count: usize) -> Vec<(Quaternion, Quaternion)> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = sample::halfspace_point(rng);
        let q = sample::halfspace_point(rng);
        if singular_distance(p, q) > 1e-3 {
            out.push((p, q));
        }
    }
    out
}

/// Worst residuals of the kernel identity, the closed-form agreement and
/// the same-slice restriction over `pairs` random pairs.
pub fn kernel_sweeps(seed: u64, pairs: usize, checks: &mut Checks) -> Value {
    let mut rng = rng_from_seed(seed);
    let (mut identity, mut forms) = (0.0f64, 0.0f64);
    for (p, q) in kernel_pairs(&mut rng, pairs) {
        identity = identity.max(k_identity_residual(p, q).unwrap_or(f64::INFINITY));
        let diff = match (k_eval(p, q), k_eval_alt(p, q)) {
            (Ok(a), Ok(b)) => a.max_abs_diff(b) / a.norm().max(1.0),
            _ => f64::INFINITY,
        };
        forms = forms.max(diff);
    }
    let mut restriction = 0.0f64;
    for _ in 0..pairs.min(2000) {
        let unit = sample::unit_imaginary(&mut rng);
        let (zx, zy) = (rng.gen_range(0.05..4.0), rng.gen_range(-4.0..4.0));
        let (wx, wy) = (rng.gen_range(0.05..4.0), rng.gen_range(-4.0..4.0));
        // 1/(z + conj w) by hand in the slice
        let (re, im) = (zx + wx, zy - wy);
        let d = re * re + im * im;
        let oracle = Quaternion::from_slice(re / d, -im / d, unit);
        let k = k_eval(Quaternion::from_slice(zx, zy, unit), Quaternion::from_slice(wx, wy, unit));
        restriction = restriction.max(k.map(|k| k.max_abs_diff(oracle)).unwrap_or(f64::INFINITY));
    }
    checks.push("kernel_identity", identity, 1e-12);
    checks.push("closed_forms_agree", forms, 1e-12);
    checks.push("same_slice_restriction", restriction, 1e-13);
    json!({ "pairs": pairs, "identity": identity, "closed_forms": forms, "restriction": restriction })
}

pub fn kernel_check(a: &KernelCheckArgs, seed: u64, mut checks: Checks) -> Outcome {
    if a.pairs == 0 {
        return Err(CliError::Input("--pairs must be positive".into()));
    }
    let values = kernel_sweeps(seed, a.pairs, &mut checks);
    Ok((checks, values))
}

pub fn blaschke(a: &BlaschkeArgs, seed: u64, mut checks: Checks) -> Outcome {
    let zs: ZeroSet = read_json(&a.zeros)?;
    let factors = prescribe_zeros(&zs).map_err(invalid)?;
    let mut values = json!({ "factors": factors });
    if a.check {
        let eval = |p: Quaternion| product_eval(&factors, p).map(|v| v.value);
        for (i, z) in zs.points.iter().enumerate() {
            checks.push_result(format!("point_zero[{i}]"), eval(z.a).map(|v| v.norm()), ZERO_CHECK_TOL);
            if z.mu > 1 {
                let d = real_derivative(eval, z.a).map(|d| d.norm());
                checks.push_result(format!("multiplicity[{i}]"), d, 1e-6);
            }
        }
        for (i, z) in zs.spheres.iter().enumerate() {
            let worst = sphere_samples(z.c, 10, sub_seed(seed, i as u64))
                .into_iter()
                .map(|p| eval(p).map(|v| v.norm()))
                .try_fold(0.0f64, |m, r| r.map(|v| m.max(v)));
            checks.push_result(format!("sphere_zero[{i}]"), worst, 1e-12);
        }
        let mut worst = Ok(0.0f64);
        for (i, f) in factors.iter().enumerate() {
            if let Factor::Point(b) = f {
                let r = boundary_modulus_check(b, 1000, sub_seed(seed, 1000 + i as u64));
                worst = worst.and_then(|w| r.map(|v| w.max(v)));
            }
        }
        checks.push_result("boundary_modulus", worst, 1e-12);
        let zeros: Vec<Quaternion> = zs.points.iter().flat_map(|z| std::iter::repeat_n(z.a, z.mu)).collect();
        if zeros.len() >= 2 {
            values["convergence"] = json!(convergence_diagnostic(&zeros).map_err(internal)?);
        }
    }
    Ok((checks, values))
}

/// Realization data loaded from JSON.
pub enum Model {
    Schur(SchurRealization),
    Cof(CofData),
    Gp(GpBackwardShift),
    Pair(PairModel),
}

impl Model {
    pub fn load(kind: RealizeModel, path: &std::path::Path) -> Result<Self, CliError> {
        Ok(match kind {
            RealizeModel::Schur => {
                let r: SchurRealization = read_json(path)?;
                r.validate().map_err(invalid)?;
                Self::Schur(r)
            }
            RealizeModel::Cof => {
                let d: CofData = read_json(path)?;
                d.validate().map_err(invalid)?;
                Self::Cof(d)
            }
            RealizeModel::Gp => {
                let d: GpBackwardShift = read_json(path)?;
                Self::Gp(GpBackwardShift::new(d.a, d.b, d.c, d.d).map_err(invalid)?)
            }
            RealizeModel::Pair => {
                let m: PairModel = read_json(path)?;
                m.validate().map_err(invalid)?;
                Self::Pair(m)
            }
        })
    }

    pub fn to_fn(&self) -> SliceMatrixFn {
        match self {
            Self::Schur(r) => r.to_fn(),
            Self::Cof(d) => d.to_fn(),
            Self::Gp(d) => d.to_fn(),
            Self::Pair(m) => m.to_fn(),
        }
    }

    /// Kernel attached to the model: `K_S` for Schur-type data, `K_Phi`
    /// with `J = I` for positive-type data.
    pub fn kernel_spec(&self) -> qslice_core::Result<KernelSpec> {
        match self {
            Self::Schur(r) => KernelSpec::schur(r.j_in(), r.j_out(), r.to_fn()),
            Self::Cof(d) => KernelSpec::schur(d.j.clone(), d.j.clone(), d.to_fn()),
            Self::Gp(d) => KernelSpec::gp(QMatrix::identity(d.d.rows()), d.to_fn()),
            Self::Pair(m) => KernelSpec::gp(QMatrix::identity(m.j.rows()), m.to_fn()),
        }
    }
}

/// `max(0, -lambda_min)` of a block Gram at `count` sampled points.
pub fn gram_psd_defect(spec: &KernelSpec, count: usize, seed: u64) -> qslice_core::Result<f64> {
    let pts = sample_points(spec, count, seed)?;
    let g = gram_matrix(spec, &GramSpec::blocks(pts))?;
    Ok((-min_eigenvalue(&g)?).max(0.0))
}

/// Worst relative gap between the Sylvester kernel and a product-form kernel.
fn product_form_gap(
    spec: &KernelSpec,
    product: impl Fn(Quaternion, Quaternion) -> qslice_core::Result<QMatrix>,
    rng: &mut SampleRng,
    count: usize,
) -> qslice_core::Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..count {
        let p = sample::halfspace_point(rng);
        let q = sample::halfspace_point(rng);
        let a = spec.eval(p, q)?;
        let b = product(p, q)?;
        worst = worst.max(a.max_diff(&b) / b.max_abs().max(1.0));
    }
    Ok(worst)
}

pub fn verify_model(model: &Model, seed: u64, checks: &mut Checks) -> qslice_core::Result<Value> {
    let mut rng = rng_from_seed(seed);
    let mut values = json!({});
    match model {
        Model::Schur(r) => {
            checks.push("coisometry", coisometry_residual(r), 1e-10);
            let mut worst = Ok(0.0f64);
            for a in 0..10 {
                for b in 0..10 {
                    let x = r.x0 * (0.5 + a as f64 / 9.0);
                    let y = r.x0 * (0.5 + b as f64 / 9.0);
                    worst = worst.and_then(|w| step9_residual(r, x, y).map(|v| w.max(v)));
                }
            }
            checks.push_result("step9_factorization", worst, 1e-10);
            let gap = model.kernel_spec().and_then(|spec| product_form_gap(&spec, |p, q| r.kernel(p, q), &mut rng, 20));
            checks.push_result("kernel_product_form", gap, 1e-9);
            values["state_index"] = json!(state_index(r)?);
        }
        Model::Cof(d) => {
            checks.push("invariant", d.invariant_residual(), 1e-10);
            let mut worst = 0.0f64;
            for _ in 0..50 {
                let p = sample::halfspace_point(&mut rng);
                let q = sample::halfspace_point(&mut rng);
                let scale = d.kernel(p, q)?.max_abs().max(1.0);
                worst = worst.max(cof_identity_residual(d, p, q)? / scale);
            }
            checks.push("kernel_identity", worst, 1e-11);
            let spec = model.kernel_spec()?;
            checks.push_result("gram_psd", gram_psd_defect(&spec, 40, rng.gen()), 1e-8);
        }
        Model::Gp(d) => {
            let re_max = (-min_eigenvalue(&(-&d.re_condition()))?).max(0.0);
            checks.push("re_condition_nonpositive", re_max, 1e-12);
            let spec = model.kernel_spec()?;
            checks.push_result("gram_psd", gram_psd_defect(&spec, 20, rng.gen()), 1e-8);
            if let Ok(inv) = realization_inverse(d) {
                let mut worst = 0.0f64;
                for x in real_probes(&mut rng, 10, 0.1, 4.0) {
                    let x = Quaternion::real(x);
                    let prod = &d.eval(x)? * &inv.eval(x)?;
                    worst = worst.max(prod.max_diff(&QMatrix::identity(d.d.rows())));
                }
                checks.push("inverse_product", worst, 1e-9);
            }
        }
        Model::Pair(m) => {
            checks.push("invariant", m.invariant_residual(), 1e-10);
            let mut worst = 0.0f64;
            for x in real_probes(&mut rng, 10, 0.1, 4.0) {
                let x = Quaternion::real(x);
                let prod = &pair_phi_eval(m, x)? * &pair_phi_inverse_eval(m, x)?;
                worst = worst.max(prod.max_diff(&QMatrix::identity(m.j.rows())));
            }
            checks.push("star_inverse", worst, 1e-10);
            let spec = model.kernel_spec()?;
            let gap = product_form_gap(&spec, |p, q| m.kernel(p, q), &mut rng, 20);
            checks.push_result("kernel_product_form", gap, 1e-9);
            checks.push_result("gram_psd", gram_psd_defect(&spec, 20, rng.gen()), 1e-8);
        }
    }
    Ok(values)
}

#[derive(Serialize)]
struct PointValue {
    p: Quaternion,
    value: Option<QMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

pub fn realize(a: &RealizeArgs, seed: u64, mut checks: Checks) -> Outcome {
    let model = Model::load(a.model, &a.data)?;
    let points: Vec<Quaternion> = match &a.eval {
        Some(path) => read_json(path)?,
        None => Vec::new(),
    };
    let f = model.to_fn();
    let evaluations: Vec<PointValue> = points
        .iter()
        .map(|&p| match f.eval(p) {
            Ok(v) => PointValue { p, value: Some(v), error: None },
            Err(e) => PointValue { p, value: None, error: Some(e.to_string()) },
        })
        .collect();
    let mut values = json!({ "evaluations": evaluations });
    if a.verify {
        values["verification"] = verify_model(&model, seed, &mut checks).map_err(internal)?;
    }
    Ok((checks, values))
}

/// Input of `qslice pg`: values `S(x_u)` and the block split of `S11`.
#[derive(Debug, Serialize, Deserialize)]
pub struct PgInput {
    pub split: (usize, usize),
    pub values: Vec<QMatrix>,
}

pub fn pg(a: &PgArgs, mut checks: Checks) -> Outcome {
    let input: PgInput = read_json(&a.data)?;
    if input.values.is_empty() {
        return Err(CliError::Input("at least one value is required".into()));
    }
    let mut transforms = Vec::with_capacity(input.values.len());
    for (u, s) in input.values.iter().enumerate() {
        let t = pg_transform(s, input.split).map_err(invalid)?;
        let back = pg_transform(&t, input.split).map_err(internal)?;
        checks.push(format!("involution[{u}]"), back.max_diff(s), 1e-11);
        transforms.push(t);
    }
    for u in 0..input.values.len() {
        for v in u..input.values.len() {
            let r = pg_identity_residual(&input.values[u], &input.values[v], input.split);
            checks.push_result(format!("transform_identity[{u},{v}]"), r, 1e-10);
        }
    }
    Ok((checks, json!({ "split": input.split, "transforms": transforms })))
}

pub fn kappa(a: &KappaArgs, seed: u64, mut checks: Checks) -> Outcome {
    if a.trials == 0 || a.points == 0 {
        return Err(CliError::Input("--trials and --points must be positive".into()));
    }
    let model_kind = match a.kernel {
        KappaKernel::Hardy | KappaKernel::NegHardy => None,
        KappaKernel::Schur => Some(RealizeModel::Schur),
        KappaKernel::Cof => Some(RealizeModel::Cof),
        KappaKernel::Gp => Some(RealizeModel::Gp),
        KappaKernel::Pair => Some(RealizeModel::Pair),
    };
    let model = match model_kind {
        Some(kind) => Some(Model::load(kind, require("data", &a.data)?)?),
        None => None,
    };
    let spec = match (&model, a.kernel) {
        (Some(m), _) => m.kernel_spec().map_err(invalid)?,
        (None, KappaKernel::NegHardy) => KernelSpec::hardy().scaled(-1.0),
        (None, _) => KernelSpec::hardy(),
    };
    let est = estimate_negative_squares(&spec, a.trials, a.points, seed).map_err(internal)?;
    let pts = sample_points(&spec, a.points.min(20), sub_seed(seed, 0)).map_err(internal)?;
    let mut sym = 0.0f64;
    for &p in &pts {
        for &q in &pts {
            let kpq = spec.eval(p, q).map_err(internal)?;
            let kqp = spec.eval(q, p).map_err(internal)?;
            sym = sym.max(kpq.max_diff(&kqp.adjoint()) / kpq.max_abs().max(1.0));
        }
    }
    checks.push("hermitian_symmetry", sym, 1e-10);
    if let Some(k) = a.expect {
        checks.push("kappa_hat", est.kappa_hat.abs_diff(k) as f64, 0.0);
    }
    let mut values = json!({ "estimate": est, "real_axis_only": spec.real_axis_only() });
    if let Some(Model::Schur(r)) = &model {
        let idx = state_index(r).map_err(internal)?;
        checks.push("state_index_bound", est.kappa_hat.saturating_sub(idx) as f64, 0.0);
        values["state_index"] = json!(idx);
    }
    Ok((checks, values))
}
