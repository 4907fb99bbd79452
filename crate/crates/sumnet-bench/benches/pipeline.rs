//! Benchmarks for the two constructions and the primitives they lean on.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sumnet_bench::bench_instance;
use sumnet_core::field::FieldSpec;
use sumnet_core::flow::max_flow_unit;
use sumnet_core::solve::{default_field, SolverKind};
use sumnet_core::{solve_n_by_two, solve_two_by_n};

fn solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    for terminals in [2usize, 4, 8] {
        let inst = bench_instance(SolverKind::TwoByN, 2, terminals, 8);
        let field = default_field(SolverKind::TwoByN, terminals).unwrap();
        group.bench_with_input(
            BenchmarkId::new("two_sources", terminals),
            &inst,
            |b, inst| b.iter(|| solve_two_by_n(black_box(inst), field, 0).unwrap()),
        );
    }
    for sources in [2usize, 4, 8] {
        let inst = bench_instance(SolverKind::NByTwo, sources, 2, 8);
        let field = default_field(SolverKind::NByTwo, 2).unwrap();
        group.bench_with_input(
            BenchmarkId::new("two_terminals", sources),
            &inst,
            |b, inst| b.iter(|| solve_n_by_two(black_box(inst), field).unwrap()),
        );
    }
    group.finish();
}

fn primitives(c: &mut Criterion) {
    let inst = bench_instance(SolverKind::NByTwo, 8, 2, 8);
    let g = inst.graph();

    c.bench_function("flow/all_pairs", |b| {
        b.iter(|| {
            let mut total = 0usize;
            for &s in inst.sources() {
                for &t in inst.terminals() {
                    total += max_flow_unit(black_box(g), s, t);
                }
            }
            total
        })
    });

    c.bench_function("graph/count_paths", |b| {
        let s = inst.sources()[0];
        let t = inst.terminals()[0];
        b.iter(|| black_box(g).count_paths(s, t))
    });

    let f = FieldSpec::with_default_modulus(8).unwrap();
    let elems: Vec<_> = (1..f.order()).map(|i| f.element(i).unwrap()).collect();
    c.bench_function("field/mul", |b| {
        b.iter(|| {
            let mut acc = f.one();
            for &x in &elems {
                acc = acc * black_box(x);
            }
            acc
        })
    });
    c.bench_function("field/inverse", |b| {
        b.iter(|| {
            let mut acc = f.one();
            for &x in &elems {
                acc = acc + x.inverse().unwrap();
            }
            acc
        })
    });
}

criterion_group!(benches, solvers, primitives);
criterion_main!(benches);
