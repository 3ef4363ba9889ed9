use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qslice_core::blaschke::{product_eval, BlaschkeFactor, Factor};
use qslice_core::hardy::{hardy_inner, HardyFunction, QuadratureSpec};
use qslice_core::kernel::{estimate_negative_squares, k_eval, KernelSpec};
use qslice_core::qlinalg::signature;
use qslice_core::realization::random_coisometric;
use qslice_core::sample::{self, rng_from_seed};
use qslice_core::slicefn::ps_star_mul;
use qslice_core::{PowerSeries, Quaternion, UnitImaginary};

fn kernel(c: &mut Criterion) {
    let mut rng = rng_from_seed(1);
    let p = sample::halfspace_point(&mut rng);
    let q = sample::halfspace_point(&mut rng);
    c.bench_function("k_eval", |b| b.iter(|| k_eval(black_box(p), black_box(q))));
}

fn linalg(c: &mut Criterion) {
    let mut group = c.benchmark_group("signature");
    let mut rng = rng_from_seed(2);
    for n in [4, 8, 16] {
        let d: Vec<f64> = (0..n).map(|k| if k % 3 == 0 { -1.0 } else { 2.0 }).collect();
        let h = sample::hermitian_udu(&mut rng, &d);
        group.bench_with_input(BenchmarkId::from_parameter(n), &h, |b, h| b.iter(|| signature(h, 1e-9)));
    }
    group.finish();
}

fn star(c: &mut Criterion) {
    let mut rng = rng_from_seed(3);
    let coeffs = |rng: &mut _| (0..16).map(|_| sample::quaternion(rng, 1.0)).collect::<Vec<Quaternion>>();
    let f = PowerSeries::scalar(0.0, &coeffs(&mut rng));
    let g = PowerSeries::scalar(0.0, &coeffs(&mut rng));
    c.bench_function("ps_star_mul_16", |b| b.iter(|| ps_star_mul(black_box(&f), black_box(&g))));
}

fn blaschke(c: &mut Criterion) {
    let mut rng = rng_from_seed(4);
    let factors: Vec<Factor> = (0..8)
        .map(|_| Factor::Point(BlaschkeFactor::new(sample::halfspace_point(&mut rng)).unwrap()))
        .collect();
    let p = sample::halfspace_point(&mut rng);
    c.bench_function("blaschke_product_8", |b| b.iter(|| product_eval(black_box(&factors), black_box(p))));
}

fn realization(c: &mut Criterion) {
    let mut rng = rng_from_seed(5);
    let r = random_coisometric(&mut rng, 6, 2, 2, 1.0).unwrap();
    let p = sample::halfspace_point(&mut rng);
    c.bench_function("schur_eval_6", |b| b.iter(|| r.eval(black_box(p))));
}

fn estimation(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimation");
    group.sample_size(10);
    let spec = KernelSpec::hardy();
    group.bench_function("kappa_hardy_4x20", |b| b.iter(|| estimate_negative_squares(&spec, 4, 20, 6)));
    let f = HardyFunction::onb(3);
    let g = HardyFunction::onb(5);
    let qs = QuadratureSpec::default();
    group.bench_function("hardy_inner_default", |b| b.iter(|| hardy_inner(&f, &g, UnitImaginary::j(), &qs)));
    group.finish();
}

criterion_group!(paths, kernel, linalg, star, blaschke, realization);
criterion_group!(heavy, estimation);
criterion_main!(paths, heavy);
