use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ratapprox_core::{
    greedy_sequence, level_sets, omega_expectation_mc, random_sequence, s_closed, s_direct, sieve_range, Rational,
};

fn sieve(c: &mut Criterion) {
    let mut g = c.benchmark_group("sieve_range");
    for bound in [100_000u64, 1_000_000, 10_000_000] {
        g.bench_with_input(BenchmarkId::from_parameter(bound), &bound, |b, &n| b.iter(|| sieve_range(black_box(n))));
    }
    g.finish();
}

fn greedy(c: &mut Criterion) {
    let half = Rational::frac(1, 2);
    let mut g = c.benchmark_group("greedy_sequence");
    g.sample_size(10);
    for bound in [500u64, 2_000, 5_000] {
        g.bench_with_input(BenchmarkId::from_parameter(bound), &bound, |b, &n| b.iter(|| greedy_sequence(n, &half)));
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let quarter = Rational::frac(1, 4);
    let mut g = c.benchmark_group("level_sets");
    for bound in [200u64, 2_000, 20_000] {
        let seq = random_sequence(bound, &quarter, 7).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(bound), &seq, |b, s| b.iter(|| level_sets(s, 1, bound)));
    }
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let quarter = Rational::frac(1, 4);
    let mut g = c.benchmark_group("omega_expectation_mc");
    g.sample_size(10);
    g.bench_function("2..5000 x 20", |b| b.iter(|| omega_expectation_mc(2, 5_000, &quarter, 20, 1)));
    g.finish();
}

fn exponential_sums(c: &mut Criterion) {
    let mut g = c.benchmark_group("s_p");
    g.bench_function("direct p=9973", |b| b.iter(|| s_direct(9973, black_box(4000), 0.3, 0.7123)));
    g.bench_function("closed p=9973", |b| b.iter(|| s_closed(9973, black_box(4000), 0.3, 0.7123)));
    g.finish();
}

criterion_group!(benches, sieve, greedy, sweep, monte_carlo, exponential_sums);
criterion_main!(benches);
