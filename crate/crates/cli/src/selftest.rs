use qslice_core::blaschke::{boundary_modulus_check, product_eval, BlaschkeFactor, Factor, SphereFactor};
use qslice_core::kernel::{estimate_negative_squares, pg_identity_residual, pg_transform, KernelSpec};
use qslice_core::qlinalg::{chi_embed, signature};
use qslice_core::realization::{
    blaschke_realization, cof_identity_residual, coisometry_residual, pair_phi_eval, pair_phi_inverse_eval,
    r1r1_residual, random_cof, random_coisometric, random_pair_model, real_probes, shift_inverse_example,
    step9_residual, SchurRealization,
};
use qslice_core::sample::{self, rng_from_seed, sub_seed, SampleRng};
use qslice_core::slicefn::{cauchy_eval, ps_star_mul, pointwise_star_eval, SliceRestriction};
use qslice_core::{PowerSeries, QMatrix, Quaternion, Signature, SliceMatrixFn};
use rand::Rng;
use serde_json::json;

use crate::commands::{kernel_sweeps, Outcome};
use crate::report::Checks;

type Suite = fn(&mut SampleRng, u64, &mut Checks) -> qslice_core::Result<()>;

const SUITES: [(&str, Suite); 9] = [
    ("quaternion", quaternion),
    ("linalg", linalg),
    ("star", star),
    ("kernel", kernel),
    ("blaschke", blaschke),
    ("realization", realization),
    ("pg", potapov_ginzburg),
    ("kappa", kappa),
    ("cauchy", cauchy),
];

pub fn run(seed: u64, mut checks: Checks) -> Outcome {
    let mut names = Vec::new();
    for (i, (name, suite)) in SUITES.iter().enumerate() {
        let s = sub_seed(seed, i as u64);
        let mut local = Checks::new(checks.tol());
        if let Err(e) = suite(&mut rng_from_seed(s), s, &mut local) {
            local.push(format!("completed ({e})"), f64::INFINITY, 0.0);
        }
        for mut c in local.into_vec() {
            c.name = format!("{name}.{}", c.name);
            checks.push_check(c);
        }
        names.push(*name);
    }
    Ok((checks, json!({ "suites": names })))
}

fn quaternion(rng: &mut SampleRng, _: u64, c: &mut Checks) -> qslice_core::Result<()> {
    let (mut norm, mut sphere) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let p = sample::quaternion(rng, 5.0);
        let q = sample::quaternion(rng, 5.0);
        norm = norm.max(((p * q).norm() - p.norm() * q.norm()).abs() / (p.norm() * q.norm()));
        let t = p.twist(q)?;
        sphere = sphere.max((t.re() - p.re()).abs().max((t.im_norm() - p.im_norm()).abs()));
    }
    c.push("norm_multiplicative", norm, 1e-12);
    c.push("twist_on_sphere", sphere, 1e-12);
    Ok(())
}

fn linalg(rng: &mut SampleRng, _: u64, c: &mut Checks) -> qslice_core::Result<()> {
    let mut hom = 0.0f64;
    for _ in 0..200 {
        let (m, n, k) = (rng.gen_range(1..5), rng.gen_range(1..5), rng.gen_range(1..5));
        let a = sample::qmatrix(rng, m, n, 1.0);
        let b = sample::qmatrix(rng, n, k, 1.0);
        hom = hom.max((chi_embed(&(&a * &b)) - chi_embed(&a) * chi_embed(&b)).camax());
    }
    c.push("chi_homomorphism", hom, 1e-12);
    let mut mismatches = 0usize;
    for _ in 0..50 {
        let n = rng.gen_range(1..=12);
        let d: Vec<f64> = (0..n)
            .map(|_| match rng.gen_range(0..3) {
                0 => rng.gen_range(0.5..5.0),
                1 => -rng.gen_range(0.5..5.0),
                _ => 0.0,
            })
            .collect();
        let expected = Signature {
            nu_plus: d.iter().filter(|&&v| v > 0.0).count(),
            nu_minus: d.iter().filter(|&&v| v < 0.0).count(),
            nu_zero: d.iter().filter(|&&v| v == 0.0).count(),
        };
        if signature(&sample::hermitian_udu(rng, &d), 1e-9)? != expected {
            mismatches += 1;
        }
    }
    c.push("udu_signature_mismatches", mismatches as f64, 0.0);
    Ok(())
}

fn random_series(rng: &mut SampleRng) -> PowerSeries {
    let deg = rng.gen_range(0..=8);
    let coeffs: Vec<Quaternion> = (0..=deg).map(|_| sample::quaternion(rng, 1.0)).collect();
    PowerSeries::scalar(0.0, &coeffs)
}

fn star(rng: &mut SampleRng, _: u64, c: &mut Checks) -> qslice_core::Result<()> {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let f = random_series(rng);
        let g = random_series(rng);
        let fg = ps_star_mul(&f, &g)?;
        for _ in 0..20 {
            let p = sample::quaternion(rng, 1.0);
            let ff = |x: Quaternion| Ok(f.eval_scalar(x));
            let gg = |x: Quaternion| Ok(g.eval_scalar(x));
            let v = pointwise_star_eval(&[&ff, &gg], p)?.value;
            worst = worst.max(v.max_abs_diff(fg.eval_scalar(p)) / fg.eval_scalar(p).norm().max(1.0));
        }
    }
    c.push("series_vs_pointwise", worst, 1e-9);
    let a = PowerSeries::scalar(0.0, &[-Quaternion::I, Quaternion::ONE]);
    let b = PowerSeries::scalar(0.0, &[-Quaternion::J, Quaternion::ONE]);
    let v = ps_star_mul(&a, &b)?.eval_scalar(Quaternion::J);
    c.push("worked_value_2k", v.max_abs_diff(Quaternion::K * 2.0), 1e-14);
    Ok(())
}

fn kernel(_: &mut SampleRng, seed: u64, c: &mut Checks) -> qslice_core::Result<()> {
    kernel_sweeps(seed, 1000, c);
    Ok(())
}

fn blaschke(rng: &mut SampleRng, seed: u64, c: &mut Checks) -> qslice_core::Result<()> {
    let (mut vanish, mut boundary, mut sphere) = (0.0f64, 0.0f64, 0.0f64);
    for t in 0..100 {
        let a = sample::halfspace_point(rng);
        let f = BlaschkeFactor::new(a)?;
        vanish = vanish.max(f.eval(a)?.norm());
        if t < 10 {
            boundary = boundary.max(boundary_modulus_check(&f, 100, sub_seed(seed, t))?);
            let s = SphereFactor::new(a)?;
            let pair = [Factor::Point(f), Factor::Point(BlaschkeFactor::new(a.conj())?)];
            for _ in 0..10 {
                let p = sample::halfspace_point(rng);
                sphere = sphere.max(s.eval(p)?.max_abs_diff(product_eval(&pair, p)?.value));
            }
        }
    }
    c.push("factor_vanishes", vanish, 1e-13);
    c.push("boundary_modulus", boundary, 1e-12);
    c.push("sphere_is_conjugate_pair", sphere, 1e-12);
    Ok(())
}

fn realization(rng: &mut SampleRng, _: u64, c: &mut Checks) -> qslice_core::Result<()> {
    let r = blaschke_realization(Quaternion::ONE)?;
    let swap = QMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]])?;
    c.push("blaschke_example_matrix", r.operator_matrix().max_diff(&swap), 1e-12);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let a = sample::halfspace_point(rng);
        let r = blaschke_realization(a)?;
        worst = worst.max(coisometry_residual(&r));
        let f = BlaschkeFactor::new(a)?;
        for _ in 0..40 {
            let p = sample::halfspace_point(rng);
            worst = worst.max(r.eval(p)?[(0, 0)].max_abs_diff(f.eval(p)?));
        }
    }
    c.push("blaschke_realization", worst, 1e-10);

    let mut cof = 0.0f64;
    for n in 1..=6 {
        let d = random_cof(rng, n, 2, n % 2)?;
        for _ in 0..10 {
            let p = sample::halfspace_point(rng);
            let q = sample::halfspace_point(rng);
            cof = cof.max(cof_identity_residual(&d, p, q)? / d.kernel(p, q)?.max_abs().max(1.0));
        }
    }
    c.push("cof_kernel_identity", cof, 1e-11);

    let mut step9 = 0.0f64;
    for n in 1..=4 {
        let r: SchurRealization = random_coisometric(rng, n, 2, 2, 1.0)?;
        for a in 0..5 {
            for b in 0..5 {
                if let Ok(v) = step9_residual(&r, 0.5 + 0.25 * a as f64, 0.5 + 0.25 * b as f64) {
                    step9 = step9.max(v);
                }
            }
        }
    }
    c.push("step9_factorization", step9, 1e-10);

    let d = shift_inverse_example(Quaternion::I)?;
    let mut shift = 0.0f64;
    for _ in 0..200 {
        let p = sample::halfspace_point(rng);
        let expected = (p * p + Quaternion::ONE).inverse()? * (p - Quaternion::I);
        shift = shift.max(d.eval(p)?[(0, 0)].max_abs_diff(expected));
    }
    c.push("shift_inverse_example", shift, 1e-12);
    c.push("shift_inverse_re_condition", d.re_condition().max_abs(), 0.0);

    let mut pair = 0.0f64;
    for n in 1..=5 {
        let m = random_pair_model(rng, n, 2)?;
        for x in real_probes(rng, 5, 0.1, 4.0) {
            let x = Quaternion::real(x);
            let prod = &pair_phi_eval(&m, x)? * &pair_phi_inverse_eval(&m, x)?;
            pair = pair.max(prod.max_diff(&QMatrix::identity(2)));
        }
    }
    c.push("pair_model_star_inverse", pair, 1e-10);

    let mut r1r1 = 0.0f64;
    for n in 1..=4 {
        let u = sample::unitary(rng, n);
        let b = (&u - &QMatrix::identity(n)).scale(0.5);
        let r = SchurRealization::new(1.0, b, QMatrix::zeros(n, 1), QMatrix::zeros(1, n), QMatrix::identity(1))?;
        r1r1 = r1r1.max(r1r1_residual(&r));
    }
    c.push("r1r1", r1r1, 1e-12);
    Ok(())
}

fn potapov_ginzburg(rng: &mut SampleRng, _: u64, c: &mut Checks) -> qslice_core::Result<()> {
    let (mut inv, mut ident) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let (r1, c1, q) = (rng.gen_range(1..3), rng.gen_range(1..3), rng.gen_range(1..3));
        let mut make = || {
            let mut m = sample::qmatrix(rng, r1 + q, c1 + q, 0.5);
            for k in 0..q {
                m[(r1 + k, c1 + k)] += Quaternion::real(2.0);
            }
            m
        };
        let (sx, sy) = (make(), make());
        inv = inv.max(pg_transform(&pg_transform(&sx, (r1, c1))?, (r1, c1))?.max_diff(&sx));
        ident = ident.max(pg_identity_residual(&sx, &sy, (r1, c1))?);
    }
    c.push("involution", inv, 1e-11);
    c.push("transform_identity", ident, 1e-10);
    Ok(())
}

fn kappa(_: &mut SampleRng, seed: u64, c: &mut Checks) -> qslice_core::Result<()> {
    let hardy = estimate_negative_squares(&KernelSpec::hardy(), 5, 20, seed)?;
    c.push("hardy_kappa", hardy.kappa_hat as f64, 0.0);
    let neg = estimate_negative_squares(&KernelSpec::hardy().scaled(-1.0), 5, 1, seed)?;
    c.push("neg_hardy_kappa_minus_one", neg.kappa_hat.abs_diff(1) as f64, 0.0);
    let inv_b1 = SliceMatrixFn::real_axis(|x| {
        if x == 1.0 {
            return Err(qslice_core::QsliceError::EvaluationSingular);
        }
        Ok(QMatrix::scalar(Quaternion::real((x + 1.0) / (x - 1.0))))
    });
    let spec = KernelSpec::schur(QMatrix::identity(1), QMatrix::identity(1), inv_b1)?;
    let est = estimate_negative_squares(&spec, 5, 20, seed)?;
    c.push("inverse_blaschke_kappa_minus_one", est.kappa_hat.abs_diff(1) as f64, 0.0);
    Ok(())
}

fn cauchy(rng: &mut SampleRng, _: u64, c: &mut Checks) -> qslice_core::Result<()> {
    let coeffs: Vec<Quaternion> = (0..5).map(|_| sample::quaternion(rng, 1.0)).collect();
    let f = PowerSeries::scalar(0.0, &coeffs);
    let unit = sample::unit_imaginary(rng);
    let restriction = SliceRestriction::new(unit, |p| Ok(f.eval(p)));
    let mut worst = 0.0f64;
    for _ in 0..10 {
        // targets on random slices, inside the circle of radius 2 about 1
        let p = Quaternion::from_slice(rng.gen_range(0.5..1.5), rng.gen_range(-0.8..0.8), sample::unit_imaginary(rng));
        let v = cauchy_eval(&restriction, p, 1.0, 2.0, 256)?;
        worst = worst.max(v.max_diff(&f.eval(p)));
    }
    c.push("polynomial_reproduction", worst, 1e-10);
    let other = SliceRestriction::new(sample::unit_imaginary(rng), |p| Ok(f.eval(p)));
    let p = Quaternion::new(1.1, 0.2, -0.3, 0.1);
    let a = cauchy_eval(&restriction, p, 1.0, 2.0, 256)?;
    let b = cauchy_eval(&other, p, 1.0, 2.0, 256)?;
    c.push("slice_independence", a.max_diff(&b), 1e-9);
    Ok(())
}
