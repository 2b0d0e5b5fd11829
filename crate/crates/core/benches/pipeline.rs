//! With the default `parallel` feature each case runs twice: once on the
//! global rayon pool and once inside a single-thread pool. Build with
//! `--no-default-features` to time the sequential fallback itself.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qdm_core::connection::connection_matrices;
use qdm_core::matrix::Matrix;
use qdm_core::ore::{buchberger, Mode, DEFAULT_STEP_CAP};
use qdm_core::parse::parse_operator;
use qdm_core::pipeline::run_full_pipeline;
use qdm_core::problem::bundled;

const SIGMA2: [&str; 2] = ["h^2*d1^2 - q1*h^2*(d2-2*d1)*(d2-2*d1-1)", "h^2*d2*(d2-2*d1) - q2"];

type Runner = Box<dyn Fn(&mut (dyn FnMut() + Send))>;

fn backends() -> Vec<(&'static str, Runner)> {
    #[cfg(feature = "parallel")]
    {
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("thread pool");
        vec![("rayon", Box::new(|f: &mut (dyn FnMut() + Send)| f())), ("one-thread", Box::new(move |f: &mut (dyn FnMut() + Send)| single.install(f)))]
    }
    #[cfg(not(feature = "parallel"))]
    {
        vec![("sequential", Box::new(|f: &mut (dyn FnMut() + Send)| f()))]
    }
}

fn bench_pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    for name in ["cp2", "fano3", "sigma2"] {
        let problem = bundled(name).expect("bundled");
        for (backend, run) in backends() {
            group.bench_with_input(BenchmarkId::new(backend, name), &problem, |b, p| {
                b.iter(|| run(&mut || drop(std::hint::black_box(run_full_pipeline(p)))))
            });
        }
    }
    group.finish();
}

fn bench_kernels(c: &mut Criterion) {
    let gens: Vec<_> = SIGMA2.iter().map(|s| parse_operator(s, 2).expect("parses")).collect();
    let gb = buchberger(&2, 2, &gens, Mode::Ore, DEFAULT_STEP_CAP).expect("basis");
    let omega = connection_matrices(&gb).expect("connection").omega;
    let product: Matrix<_> = omega[0].mul(&omega[1]);
    let mut group = c.benchmark_group("kernels");
    for (backend, run) in backends() {
        group.bench_function(BenchmarkId::new(backend, "groebner-sigma2"), |b| {
            b.iter(|| run(&mut || drop(std::hint::black_box(buchberger(&2, 2, &gens, Mode::Ore, DEFAULT_STEP_CAP)))))
        });
        group.bench_function(BenchmarkId::new(backend, "connection-sigma2"), |b| {
            b.iter(|| run(&mut || drop(std::hint::black_box(connection_matrices(&gb)))))
        });
        group.bench_function(BenchmarkId::new(backend, "matmul-sigma2"), |b| {
            b.iter(|| run(&mut || drop(std::hint::black_box(product.mul(&omega[0])))))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_pipeline, bench_kernels);
criterion_main!(benches);
