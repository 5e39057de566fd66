use cbifree::series::{check_cfree_series_relations, check_partial_functional_equation};
use cbifree::{cbf_join, pair_cumulants, CumulantTable, PairMomentTable};
use cbifree_bench::random_distribution;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn word_cumulants(c: &mut Criterion) {
    let mut group = c.benchmark_group("word_cumulants");
    group.sample_size(10);
    for degree in [3, 4] {
        let dist = random_distribution(0..2, degree, 1);
        group.bench_with_input(BenchmarkId::from_parameter(degree), &dist, |b, d| {
            b.iter(|| CumulantTable::from_distribution(d, degree).unwrap())
        });
    }
    group.finish();
}

fn pair(c: &mut Criterion) {
    let mut group = c.benchmark_group("pair_cumulants");
    for degree in [4, 6, 8] {
        let t = PairMomentTable::random(degree, &mut ChaCha8Rng::seed_from_u64(2));
        group.bench_with_input(BenchmarkId::new("rational", degree), &t, |b, t| b.iter(|| pair_cumulants(t).unwrap()));
        let f = t.map(cbifree::Scalar::to_f64);
        group.bench_with_input(BenchmarkId::new("float", degree), &f, |b, t| b.iter(|| pair_cumulants(t).unwrap()));
    }
    group.finish();
}

fn residuals(c: &mut Criterion) {
    let t = PairMomentTable::random(6, &mut ChaCha8Rng::seed_from_u64(3));
    c.bench_function("residuals/marginal", |b| b.iter(|| check_cfree_series_relations(&t).unwrap()));
    c.bench_function("residuals/bivariate", |b| b.iter(|| check_partial_functional_equation(&t).unwrap()));
}

fn join(c: &mut Criterion) {
    let parts = [random_distribution(0..1, 4, 4), random_distribution(1..2, 4, 5)];
    let mut group = c.benchmark_group("cbf_join");
    group.sample_size(10);
    group.bench_function("two_pairs/4", |b| b.iter(|| cbf_join(&parts, 4).unwrap()));
    group.finish();
}

criterion_group!(benches, word_cumulants, pair, residuals, join);
criterion_main!(benches);
