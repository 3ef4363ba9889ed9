use qslice_core::blaschke::{blaschke_eval, BlaschkeFactor};
use qslice_core::kernel::{gram_matrix, min_eigenvalue, GramSpec, KernelSpec};
use qslice_core::realization::*;
use qslice_core::sample::{self, rng_from_seed};
use qslice_core::slicefn::pointwise_star_eval;
use qslice_core::{QMatrix, Quaternion};
use rand::Rng;

fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
    Quaternion::new(w, x, y, z)
}

/// `sum_n p^n G A^n`, the series of the star resolvent for small `|p| ||A||`.
fn resolvent_series(g: &QMatrix, a: &QMatrix, p: Quaternion) -> QMatrix {
    let mut term = g.clone();
    let mut pn = Quaternion::ONE;
    let mut sum = QMatrix::zeros(g.rows(), g.cols());
    for _ in 0..200 {
        sum = &sum + &term.scale_left(pn);
        term = &term * a;
        pn *= p;
    }
    sum
}

#[test]
fn resolvent_matches_series_oracle() {
    let mut rng = rng_from_seed(1);
    for n in 1..5 {
        let a = sample::qmatrix(&mut rng, n, n, 0.3);
        let g = sample::qmatrix(&mut rng, 2, n, 1.0);
        let norm = (0..n).map(|r| (0..n).map(|c| a[(r, c)].norm()).sum::<f64>()).fold(0.0, f64::max);
        for _ in 0..10 {
            let p = sample::quaternion(&mut rng, 1.0);
            let p = p * (0.5 / (p.norm() * norm.max(1.0)));
            let lhs = resolvent_star(&g, &a, p).unwrap();
            assert!(lhs.max_diff(&resolvent_series(&g, &a, p)) <= 1e-12);
        }
    }
}

#[test]
fn affine_resolvent_at_real_points() {
    let mut rng = rng_from_seed(2);
    let t = sample::antihermitian(&mut rng, 3, 1.0);
    let c = sample::qmatrix(&mut rng, 2, 3, 1.0);
    for x in [0.3, 1.0, 2.5] {
        let direct = &c * &qslice_core::qlinalg::qmat_inverse(&(&QMatrix::identity(3).scale(x) - &t)).unwrap();
        assert!(affine_resolvent_star(&c, &t, Quaternion::real(x)).unwrap().max_diff(&direct) <= 1e-12);
    }
}

#[test]
fn s_spectrum_of_similar_matrices() {
    let mut rng = rng_from_seed(3);
    let d = QMatrix::diag(&[q(1.0, 2.0, 0.0, 0.0), q(-0.5, 0.0, 0.0, 1.0), Quaternion::real(3.0)]);
    let u = sample::unitary(&mut rng, 3);
    let a = &(&u * &d) * &u.adjoint();
    let s = s_spectrum(&a).unwrap();
    let expected = [q(-0.5, 1.0, 0.0, 0.0), q(1.0, 2.0, 0.0, 0.0), Quaternion::real(3.0)];
    for (x, e) in s.iter().zip(expected) {
        assert!(x.max_abs_diff(e) <= 1e-9, "{x} vs {e}");
    }
}

#[test]
fn blaschke_example_realization() {
    let r = blaschke_realization(Quaternion::ONE).unwrap();
    let m = r.operator_matrix();
    let expected = QMatrix::from_rows(&[vec![Quaternion::ZERO, Quaternion::ONE], vec![-Quaternion::ONE, Quaternion::ZERO]]).unwrap();
    assert_eq!(m, expected);
    let mut rng = rng_from_seed(0xC0FFEE);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let a = sample::halfspace_point(&mut rng);
        let r = blaschke_realization(a).unwrap();
        assert!(coisometry_residual(&r) <= 1e-12);
        let mm = &r.operator_matrix().adjoint() * &r.operator_matrix();
        assert!(mm.max_diff(&QMatrix::identity(2)) <= 1e-12);
        let f = BlaschkeFactor::new(a).unwrap();
        for _ in 0..100 {
            let p = sample::halfspace_point(&mut rng);
            let v = schur_eval(&r, p).unwrap()[(0, 0)];
            worst = worst.max(v.max_abs_diff(blaschke_eval(&f, p).unwrap()));
        }
    }
    assert!(worst <= 1e-10, "{worst:e}");
}

#[test]
fn realized_functions_are_contractive_on_the_real_axis() {
    let mut rng = rng_from_seed(4);
    for _ in 0..10 {
        let r = random_coisometric(&mut rng, 3, 2, 2, 1.0).unwrap();
        for _ in 0..20 {
            let s = r.eval(Quaternion::real(rng.gen_range(0.01..10.0))).unwrap();
            let defect = &QMatrix::identity(2) - &(&s * &s.adjoint());
            assert!(qslice_core::kernel::gram_signature(&defect.hermitian_part()).unwrap().nu_minus == 0);
        }
    }
}

#[test]
fn cof_identity_and_positivity() {
    let mut rng = rng_from_seed(5);
    let mut worst = 0.0f64;
    for t in 0..20 {
        let n = 1 + t % 6;
        let m = rng.gen_range(1..4);
        let neg = rng.gen_range(0..=m);
        let d = random_cof(&mut rng, n, m, neg).unwrap();
        assert!(d.invariant_residual() <= 1e-12);
        for _ in 0..50 {
            let p = sample::halfspace_point(&mut rng);
            let w = sample::halfspace_point(&mut rng);
            let scale = d.kernel(p, w).unwrap().max_abs().max(1.0);
            worst = worst.max(cof_identity_residual(&d, p, w).unwrap() / scale);
        }
        let spec = KernelSpec::schur(d.j.clone(), d.j.clone(), d.to_fn()).unwrap();
        let pts = qslice_core::kernel::sample_points(&spec, 40, t as u64).unwrap();
        let g = gram_matrix(&spec, &GramSpec::blocks(pts)).unwrap();
        assert!(min_eigenvalue(&g).unwrap() >= -1e-8);
    }
    assert!(worst <= 1e-11, "{worst:e}");
}

#[test]
fn cof_rejects_bad_data() {
    let a = QMatrix::scalar(Quaternion::real(1.0));
    assert!(CofData::new(a, QMatrix::identity(1), QMatrix::identity(1)).is_err());
    let a = QMatrix::scalar(Quaternion::real(-0.5));
    assert!(CofData::new(a, QMatrix::identity(1), QMatrix::real_diag(&[2.0])).is_err());
}

#[test]
fn step9_factorization_on_real_grid() {
    let mut rng = rng_from_seed(6);
    let mut worst = 0.0f64;
    for t in 0..20 {
        let n = 1 + t % 4;
        let x0 = rng.gen_range(0.5..2.0);
        let r = random_coisometric(&mut rng, n, 2, 2, x0).unwrap();
        for a in 0..20 {
            for b in 0..20 {
                let x = x0 * (0.5 + a as f64 / 19.0);
                let y = x0 * (0.5 + b as f64 / 19.0);
                if let Ok(res) = step9_residual(&r, x, y) {
                    worst = worst.max(res);
                }
            }
        }
    }
    assert!(worst <= 1e-10, "{worst:e}");
}

#[test]
fn literal_and_mobius_forms_agree_at_real_points_near_center() {
    let mut rng = rng_from_seed(7);
    let r = random_coisometric(&mut rng, 2, 1, 1, 1.0).unwrap();
    let x = Quaternion::real(1.0);
    let a = schur_eval_with(&r, x, SchurEvalMode::Literal).unwrap();
    let b = schur_eval_with(&r, x, SchurEvalMode::Mobius).unwrap();
    assert!(a.max_diff(&b) <= 1e-12);
}

#[test]
fn krein_realization_index() {
    let mut rng = rng_from_seed(8);
    for (n, neg) in [(2, 1), (4, 2), (3, 0)] {
        let r = random_krein_realization(&mut rng, n, neg, 2, 1.0).unwrap();
        assert!(coisometry_residual(&r) <= 1e-10);
        assert_eq!(state_index(&r).unwrap(), neg);
    }
    assert!(random_krein_realization(&mut rng, 2, 3, 1, 1.0).is_err());
}

#[test]
fn shift_inverse_example_reproduces_function() {
    let d = shift_inverse_example(Quaternion::I).unwrap();
    assert_eq!(d.re_condition().max_abs(), 0.0);
    let v = d.eval(Quaternion::ONE).unwrap()[(0, 0)];
    assert!(v.max_abs_diff(q(0.5, -0.5, 0.0, 0.0)) <= 1e-15);
    let mut rng = rng_from_seed(0xC0FFEE);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let p = sample::halfspace_point(&mut rng);
        let expected = (p * p + Quaternion::ONE).inverse().unwrap() * (p - Quaternion::I);
        worst = worst.max(d.eval(p).unwrap()[(0, 0)].max_abs_diff(expected));
    }
    assert!(worst <= 1e-12, "{worst:e}");
    assert!(shift_inverse_example(q(1.0, 1.0, 0.0, 0.0)).is_err());
}

#[test]
fn quadruple_inverse_and_product() {
    let mut rng = rng_from_seed(9);
    for _ in 0..10 {
        let d1 = random_gp_positive(&mut rng, 2, 1).unwrap();
        let d2 = random_gp_positive(&mut rng, 3, 1).unwrap();
        let inv = realization_inverse(&d1).unwrap();
        let prod = realization_product(&d1, &d2).unwrap();
        for _ in 0..10 {
            let x = Quaternion::real(rng.gen_range(0.1..3.0));
            let one = &d1.eval(x).unwrap() * &inv.eval(x).unwrap();
            assert!(one.max_diff(&QMatrix::identity(1)) <= 1e-9);
            let pd = &d1.eval(x).unwrap() * &d2.eval(x).unwrap();
            assert!(prod.eval(x).unwrap().max_diff(&pd) <= 1e-9);
            // off the real axis the cascade is the star product
            let p = sample::halfspace_point(&mut rng);
            let f1 = |w: Quaternion| d1.eval(w).map(|m| m[(0, 0)]);
            let f2 = |w: Quaternion| d2.eval(w).map(|m| m[(0, 0)]);
            let star = pointwise_star_eval(&[&f1, &f2], p).unwrap().value;
            assert!(prod.eval(p).unwrap()[(0, 0)].max_abs_diff(star) <= 1e-9);
        }
    }
    let id = GpBackwardShift::identity(2);
    assert_eq!(id.eval(q(1.0, 2.0, 3.0, 4.0)).unwrap(), QMatrix::identity(2));
}

#[test]
fn positive_quadruples_have_positive_kernels() {
    let mut rng = rng_from_seed(10);
    for _ in 0..10 {
        let d = random_gp_positive(&mut rng, 3, 2).unwrap();
        assert!(min_eigenvalue(&(-&d.re_condition())).unwrap() >= -1e-12);
        let spec = KernelSpec::gp(QMatrix::identity(2), d.to_fn()).unwrap();
        let pts: Vec<_> = (0..15).map(|_| sample::halfspace_point(&mut rng)).collect();
        let g = gram_matrix(&spec, &GramSpec::blocks(pts)).unwrap();
        assert!(min_eigenvalue(&g).unwrap() >= -1e-8);
    }
}

#[test]
fn centered_gp_realization_and_r1r1() {
    let mut rng = rng_from_seed(11);
    for n in 1..5 {
        let x0 = rng.gen_range(0.5..2.0);
        let u = sample::unitary(&mut rng, n);
        let b = (&u - &QMatrix::identity(n)).scale(1.0 / (2.0 * x0));
        let f = sample::qmatrix(&mut rng, n, 1, 1.0);
        let g = sample::qmatrix(&mut rng, 1, n, 1.0);
        let r = SchurRealization::new(x0, b, f, g, QMatrix::identity(1)).unwrap();
        assert!(t_unitarity_residual(&r) <= 1e-12);
        assert!(r1r1_residual(&r) <= 1e-12);
        let gp = gp_realization_eval(r.clone()).unwrap();
        assert_eq!(gp.eval(Quaternion::real(x0)).unwrap(), r.eval(Quaternion::real(x0)).unwrap());
    }
    let r = SchurRealization::new(1.0, QMatrix::identity(1), QMatrix::identity(1), QMatrix::identity(1), QMatrix::identity(1)).unwrap();
    assert!(gp_realization_eval(r).is_err());
}

#[test]
fn pair_model_inverse_and_kernel() {
    let mut rng = rng_from_seed(12);
    let mut worst = 0.0f64;
    for t in 0..20 {
        let n = 1 + t % 5;
        let m = rng.gen_range(1..3);
        let pm = random_pair_model(&mut rng, n, m).unwrap();
        for x in real_probes(&mut rng, 10, 0.1, 4.0) {
            let x = Quaternion::real(x);
            let prod = &pair_phi_eval(&pm, x).unwrap() * &pair_phi_inverse_eval(&pm, x).unwrap();
            worst = worst.max(prod.max_diff(&QMatrix::identity(m)));
        }
        let spec = KernelSpec::gp(QMatrix::identity(m), pm.to_fn()).unwrap();
        for _ in 0..5 {
            let p = sample::halfspace_point(&mut rng);
            let w = sample::halfspace_point(&mut rng);
            let a = spec.eval(p, w).unwrap();
            assert!(a.max_diff(&pm.kernel(p, w).unwrap()) <= 1e-9 * a.max_abs().max(1.0));
        }
        let pts: Vec<_> = (0..10).map(|_| sample::halfspace_point(&mut rng)).collect();
        let g = gram_matrix(&spec, &GramSpec::blocks(pts)).unwrap();
        assert!(min_eigenvalue(&g).unwrap() >= -1e-8);
    }
    assert!(worst <= 1e-10, "{worst:e}");
}

#[test]
fn pair_model_rejects_broken_invariant() {
    let mut rng = rng_from_seed(13);
    let pm = random_pair_model(&mut rng, 2, 1).unwrap();
    let tm = &pm.tm + &QMatrix::diag(&[Quaternion::I, Quaternion::ZERO]);
    assert!(PairModel::new(pm.tp.clone(), tm, pm.c.clone(), pm.j.clone()).is_err());
}

#[test]
fn serde_round_trips() {
    let r = blaschke_realization(q(1.0, 0.5, 0.0, 0.0)).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert!(v.get("B").is_some() && v.get("J1").is_none());
    assert_eq!(serde_json::from_value::<SchurRealization>(v).unwrap(), r);

    let mut rng = rng_from_seed(14);
    let d = random_cof(&mut rng, 2, 2, 1).unwrap();
    let text = serde_json::to_string(&d).unwrap();
    assert_eq!(serde_json::from_str::<CofData>(&text).unwrap(), d);
    let pm = random_pair_model(&mut rng, 2, 1).unwrap();
    let text = serde_json::to_string(&pm).unwrap();
    assert_eq!(serde_json::from_str::<PairModel>(&text).unwrap(), pm);
    let bad = serde_json::json!({"x0": 1.0, "B": {"rows": 1, "cols": 1, "data": [[1, 0, 0, 0]]},
        "F": {"rows": 1, "cols": 1, "data": [[1, 0, 0, 0]]}, "G": {"rows": 1, "cols": 1, "data": [[1, 0, 0, 0]]},
        "H": {"rows": 1, "cols": 1, "data": [[1, 0, 0, 0]]}});
    assert!(serde_json::from_value::<GpRealization>(bad).is_err());
}
