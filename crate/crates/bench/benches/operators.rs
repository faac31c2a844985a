use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use fracvar_bench::{half, trajectory};
use fracvar_core::approx::{el_n_residual, TruncationLevel};
use fracvar_core::fracops::{apply_operator, build_operator_matrix, OperatorKind};
use fracvar_core::noether::{conserved_quantity, ConservationForm};
use fracvar_core::presets;
use fracvar_core::solver::{assemble_oscillator_system, solve_linear_system, OscillatorProblem};

fn operators(c: &mut Criterion) {
    let mut g = c.benchmark_group("left_rl");
    for n in [256, 1024, 4096] {
        let u = trajectory(n);
        g.bench_with_input(BenchmarkId::new("apply", n), &u, |b, u| b.iter(|| apply_operator(OperatorKind::LEFT_RL, half(), black_box(u))));
        g.bench_with_input(BenchmarkId::new("matrix", n), &u, |b, u| {
            b.iter(|| build_operator_matrix(OperatorKind::LEFT_RL, half(), black_box(u.grid())))
        });
    }
    g.finish();
}

fn conservation(c: &mut Criterion) {
    let l = presets::oscillator_lagrangian(1.0);
    let v = presets::time_translation();
    let mut g = c.benchmark_group("conserved_quantity");
    for n in [256, 1024] {
        let u = trajectory(n);
        for form in [ConservationForm::Cl, ConservationForm::Cl2] {
            g.bench_with_input(BenchmarkId::new(format!("{form:?}"), n), &u, |b, u| {
                b.iter(|| conserved_quantity(&l, half(), &v, black_box(u), 1.0, form))
            });
        }
    }
    g.finish();
}

fn oscillator(c: &mut Criterion) {
    let mut g = c.benchmark_group("oscillator_solve");
    g.sample_size(10);
    for n in [256, 512] {
        let p = OscillatorProblem::new(1.0, half(), n).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| {
            b.iter(|| solve_linear_system(&assemble_oscillator_system(black_box(p)).unwrap()))
        });
    }
    g.finish();
}

fn truncated_series(c: &mut Criterion) {
    let l = presets::weighted_oscillator_lagrangian(1.0, 1.0, 10);
    let u = presets::case_b_polynomial();
    let grid = fracvar_core::types::make_uniform_grid(0.0, 1.0, 256).unwrap();
    let mut g = c.benchmark_group("el_n_residual");
    for level in [2, 4, 8] {
        let lv = TruncationLevel::new(level).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(level), &lv, |b, &lv| b.iter(|| el_n_residual(&l, half(), lv, &u, black_box(&grid))));
    }
    g.finish();
}

criterion_group!(benches, operators, conservation, oscillator, truncated_series);
criterion_main!(benches);
