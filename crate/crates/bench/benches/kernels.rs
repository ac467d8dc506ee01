use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use motzkin_core::excursion::{self, ExcursionDensity};
use motzkin_core::hamiltonian::{self, EigenOptions};
use motzkin_core::walks::CountTable;
use motzkin_core::{field, markov, schmidt, Boundary, ChainSpec};

fn counting(c: &mut Criterion) {
    let mut g = c.benchmark_group("counts");
    g.bench_function("exact table n=300 s=2", |b| b.iter(|| CountTable::exact(black_box(300), 2).unwrap()));
    for n in [1_000usize, 10_000] {
        g.bench_with_input(BenchmarkId::new("entropy s=2", n), &n, |b, &n| {
            b.iter(|| schmidt::entropy_exact(black_box(n), 2).unwrap())
        });
    }
    g.finish();
}

fn spectra(c: &mut Criterion) {
    let mut g = c.benchmark_group("hamiltonian");
    g.sample_size(10);
    for two_n in [6usize, 8] {
        let spec = ChainSpec::new(two_n, 1, Boundary::MotzkinBoundary);
        g.bench_with_input(BenchmarkId::new("build s=1", two_n), &spec, |b, spec| {
            b.iter(|| hamiltonian::build_hamiltonian(spec).unwrap())
        });
        let h = hamiltonian::build_hamiltonian(&spec).unwrap();
        g.bench_with_input(BenchmarkId::new("lowest two s=1", two_n), &h, |b, h| {
            b.iter(|| hamiltonian::lowest_spectrum_with(h, 2, &EigenOptions::default()).unwrap())
        });
    }
    g.finish();
}

fn markov_chain(c: &mut Criterion) {
    let mut g = c.benchmark_group("markov");
    g.sample_size(10);
    g.bench_function("P and λ₂ 2n=8 s=2", |b| {
        b.iter(|| markov::build_p(black_box(8), 2).unwrap().lambda2_nonsymmetric().unwrap())
    });
    let p = markov::build_p(8, 2).unwrap();
    g.bench_function("edge load n=4 s=2", |b| {
        b.iter(|| markov::edge_load(&markov::build_canonical_tree(4, 2).unwrap(), &p).unwrap())
    });
    g.finish();
}

fn excursion_area(c: &mut Criterion) {
    let mut g = c.benchmark_group("excursion");
    let density = ExcursionDensity::standard();
    g.bench_function("density at 0.6", |b| b.iter(|| density.density(black_box(0.6)).unwrap()));
    g.sample_size(10);
    g.bench_function("characteristic at 1/σ", |b| {
        b.iter(|| density.characteristic(black_box(1.0 / excursion::area_std())).unwrap())
    });
    g.bench_function("area profile 2n=16 s=1", |b| b.iter(|| excursion::area_profile(black_box(16), 1).unwrap()));
    g.finish();
}

fn field_levels(c: &mut Criterion) {
    let mut g = c.benchmark_group("field");
    g.bench_function("exact expectation L=2000 m=10", |b| {
        b.iter(|| field::field_expectation_exact(black_box(2000), 10, 1).unwrap())
    });
    g.bench_function("log expectation L=1e6 m=10", |b| {
        b.iter(|| field::field_expectation_log(black_box(1_000_000), 10, 1).unwrap())
    });
    g.finish();
}

criterion_group!(benches, counting, spectra, markov_chain, excursion_area, field_levels);
criterion_main!(benches);
