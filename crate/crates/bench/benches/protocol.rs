use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use qxor_bench::{perturbed, point, random_function};
use qxor_core::oracle::error_profile;
use qxor_core::protocol::{PipelineParams, ProtocolInstance};
use qxor_core::rng::seeded;
use qxor_core::{approx_l1, gf2_degree, pipeline_bounded_error, wht, Family, SparsifierParams};

fn transforms(c: &mut Criterion) {
    let mut group = c.benchmark_group("wht");
    for n in [6, 10, 14] {
        let f = random_function(n, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| b.iter(|| wht(black_box(f))));
    }
    group.finish();

    let f = random_function(12, 2);
    c.bench_function("gf2_degree/12", |b| b.iter(|| gf2_degree(black_box(&f))));
}

fn linear_program(c: &mut Criterion) {
    let mut group = c.benchmark_group("approx_l1");
    group.sample_size(10);
    for n in [3, 5, 6] {
        let f = Family::HammingLe(1).build(n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| b.iter(|| approx_l1(f, 0.01).unwrap()));
    }
    group.finish();
}

fn sparsifier(c: &mut Criterion) {
    let g = approx_l1(&Family::HammingLe(2).build(6).unwrap(), 0.1).unwrap().g;
    let params = SparsifierParams::for_target(wht(&g).l1(), 6, 0.2, 0.1).unwrap();
    let mut rng = seeded(3);
    c.bench_function("sparsify/n6", |b| {
        b.iter(|| qxor_core::sparsify(&g, &params, &mut rng).unwrap())
    });
}

fn protocol_runs(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_exact");
    for n in [4, 8, 12] {
        let inst = ProtocolInstance::exact(random_function(n, 4), 0).unwrap();
        let mut rng = seeded(5);
        group.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| inst.run(point(n, 3), point(n, 11), &mut rng).unwrap())
        });
    }
    group.finish();

    let f = Family::HammingLe(1).build(6).unwrap();
    let pipeline = pipeline_bounded_error(&f, 2f64.powi(-11), &PipelineParams::default(), &mut seeded(6)).unwrap();
    let mut seed = 0;
    c.bench_function("pipeline_majority/hamming_le_6_1", |b| {
        b.iter(|| {
            seed += 1;
            pipeline.run(point(6, 5), point(6, 9), seed).unwrap()
        })
    });
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("error_profile");
    group.sample_size(10);
    for n in [3, 4, 5] {
        let f = random_function(n, 7);
        let g = perturbed(&f, 2f64.powi(-(gf2_degree(&f) as i32) - 2), 8);
        group.bench_with_input(BenchmarkId::from_parameter(n), &(f, g), |b, (f, g)| {
            b.iter(|| error_profile(f, g).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, transforms, linear_program, sparsifier, protocol_runs, oracle);
criterion_main!(benches);
