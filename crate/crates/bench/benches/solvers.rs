use std::hint::black_box;

use ammdrpg::convex_sub::{solve_fixed, SolveOptions};
use ammdrpg::matheuristic::step4_tsp;
use ammdrpg::model_ir::{build_model, emit_lp};
use ammdrpg::{run_matheuristic, MatheuristicParams, Mode, ModelOptions, Point};
use ammdrpg_bench::grid;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn matheuristic(c: &mut Criterion) {
    let mut g = c.benchmark_group("matheuristic");
    g.sample_size(10);
    for n in [5, 10] {
        let inst = grid(n, 2, 1);
        let params = MatheuristicParams::default();
        g.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| b.iter(|| run_matheuristic(black_box(inst), &params)));
    }
    g.finish();
}

fn fixed_subproblem(c: &mut Criterion) {
    let inst = grid(5, 2, 1);
    let fixed = run_matheuristic(&inst, &MatheuristicParams::default()).expect("feasible").fixed;
    c.bench_function("solve_fixed/5", |b| {
        b.iter(|| solve_fixed(black_box(&inst), &fixed, Mode::Sync, &SolveOptions::default()))
    });
}

fn emission(c: &mut Criterion) {
    let inst = grid(5, 3, 1);
    let opts = ModelOptions { valid_inequalities: true, ..Default::default() };
    c.bench_function("build_and_emit/5", |b| b.iter(|| emit_lp(&build_model(black_box(&inst), &opts))));
}

fn held_karp(c: &mut Criterion) {
    let pts: Vec<Point> = (0..12).map(|k| Point::new((k * 37 % 17) as f64, (k * 11 % 13) as f64)).collect();
    c.bench_function("tsp/12", |b| b.iter(|| step4_tsp(black_box(&pts), Point::new(0.0, 0.0), Point::new(20.0, 0.0))));
}

criterion_group!(benches, matheuristic, fixed_subproblem, emission, held_karp);
criterion_main!(benches);
