use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dopgolay_core::ambiguity::{composite_ambiguity, grid, matrix_ambiguity, taylor_b, taylor_c};
use dopgolay_core::radarsim::{
    alamouti_receive, hypothesis_stats, matched_filter, synthesize, synthesize_polarimetric,
};
use dopgolay_core::sequences::{expand_to, ExpandMethod};
use dopgolay_core::trains::{alamouti_train, ptm_train};
use dopgolay_core::{Channel, Complex64, Doppler, GolayPair, NoiseSpec, PointTarget, Scheme, Waveform};

fn seed(len: usize) -> GolayPair {
    expand_to(&GolayPair::builtin8(), len, ExpandMethod::Concatenate).unwrap()
}

fn ambiguity(c: &mut Criterion) {
    let mut g = c.benchmark_group("ambiguity");
    for len in [8, 64, 256] {
        let train = ptm_train(&seed(len), 3).unwrap();
        let wm = alamouti_train(&seed(len), 3, Scheme::Ptm).unwrap();
        let theta = Doppler::new(0.05).unwrap();
        g.bench_with_input(BenchmarkId::new("composite", len), &train, |b, t| {
            b.iter(|| composite_ambiguity(black_box(t), theta))
        });
        g.bench_with_input(BenchmarkId::new("matrix", len), &wm, |b, w| {
            b.iter(|| matrix_ambiguity(black_box(w), theta))
        });
    }
    let train = ptm_train(&GolayPair::builtin8(), 3).unwrap();
    let thetas: Vec<Doppler> = (0..201).map(|i| Doppler::new(i as f64 * 5e-4).unwrap()).collect();
    g.bench_function("grid_201", |b| {
        b.iter(|| grid(Waveform::Train(&train), Channel::Single, black_box(&thetas)).unwrap())
    });
    g.finish();
}

fn taylor(c: &mut Criterion) {
    let mut g = c.benchmark_group("taylor");
    let train = ptm_train(&seed(64), 5).unwrap();
    let wm = alamouti_train(&seed(64), 5, Scheme::Ptm).unwrap();
    for m in [1, 3, 5] {
        g.bench_with_input(BenchmarkId::new("c", m), &m, |b, &m| {
            b.iter(|| taylor_c(&train, m).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("b", m), &m, |b, &m| {
            b.iter(|| taylor_b(&wm, m).unwrap())
        });
    }
    g.finish();
}

fn receivers(c: &mut Criterion) {
    let mut g = c.benchmark_group("receivers");
    let pair = GolayPair::builtin8();
    let train = ptm_train(&pair, 3).unwrap();
    let wm = alamouti_train(&pair, 3, Scheme::Ptm).unwrap();
    let target = PointTarget::scalar(4, Doppler::new(0.05).unwrap(), Complex64::new(1.0, 0.0));
    let noise = NoiseSpec::new(1.0, 7).unwrap();
    let returns = synthesize(&train, &target, &noise).unwrap();
    let polar = synthesize_polarimetric(&wm, &target, &noise).unwrap();
    g.bench_function("matched_filter", |b| {
        b.iter(|| matched_filter(black_box(&returns), &train).unwrap())
    });
    g.bench_function("alamouti_receive", |b| {
        b.iter(|| alamouti_receive(black_box(&polar), &wm, Doppler::ZERO).unwrap())
    });
    g.sample_size(10);
    g.bench_function("hypothesis_stats_10k", |b| {
        b.iter(|| hypothesis_stats(10_000, &train, Some(&target), &noise).unwrap())
    });
    g.finish();
}

criterion_group!(benches, ambiguity, taylor, receivers);
criterion_main!(benches);
