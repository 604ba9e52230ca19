use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use graphcode_bench::{double, extreme, single, triple, Fixture};

fn fixtures() -> Vec<(usize, Fixture)> {
    vec![
        (31, single(31, 32)),
        (101, single(101, 2)),
        (31, double(31)),
        (101, double(101)),
        (31, triple(31, 32)),
        (61, triple(61, 61)),
        (13, extreme(13, 3)),
    ]
}

fn encode(c: &mut Criterion) {
    let mut group = c.benchmark_group("encode");
    for (n, f) in fixtures() {
        group.bench_with_input(BenchmarkId::new(f.name, n), &f, |b, f| {
            b.iter(|| f.code.encode(black_box(&f.info)).unwrap())
        });
    }
    group.finish();
}

fn decode(c: &mut Criterion) {
    let mut group = c.benchmark_group("decode");
    for (n, f) in fixtures() {
        group.bench_with_input(BenchmarkId::new(f.name, n), &f, |b, f| {
            b.iter(|| f.code.decode(black_box(&f.erased)).unwrap())
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    for (n, f) in fixtures().into_iter().filter(|(n, _)| *n <= 31) {
        group.bench_with_input(BenchmarkId::new(f.name, n), &f, |b, f| {
            b.iter(|| f.code.spec().oracle_decode(black_box(&f.erased)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, encode, decode, oracle);
criterion_main!(benches);
