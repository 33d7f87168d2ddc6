use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use fbmimo_core::numerics::{sample_complex_gaussian, ComplexMatrix};
use fbmimo_core::quantizer::generate_codebook;
use fbmimo_core::simulate::{mu_throughput, SamplingPath};
use fbmimo_core::{RngStream, ScalingPolicy, SimConfig};

fn quantizer(c: &mut Criterion) {
    let mut g = c.benchmark_group("quantizer");
    for bits in [6u32, 10, 14] {
        g.bench_function(format!("generate_and_quantize_M4_B{bits}"), |b| {
            let mut rng = RngStream::new(1, 0);
            b.iter(|| {
                let cb = generate_codebook(4, bits, &mut rng).unwrap();
                let h = sample_complex_gaussian(4, &mut rng);
                black_box(cb.quantize(&h).unwrap())
            })
        });
    }
    g.finish();
}

fn inverse(c: &mut Criterion) {
    let mut rng = RngStream::new(2, 0);
    for m in [4usize, 8] {
        c.bench_function(&format!("inverse_{m}x{m}"), |b| {
            b.iter_batched(
                || {
                    let rows: Vec<_> = (0..m).map(|_| sample_complex_gaussian(m, &mut rng)).collect();
                    ComplexMatrix::from_adjoint_rows(&rows).unwrap()
                },
                |a| black_box(a.inverse().unwrap()),
                BatchSize::SmallInput,
            )
        });
    }
}

fn trials(c: &mut Criterion) {
    let mut g = c.benchmark_group("mu_throughput_1000_trials");
    g.sample_size(10);
    for path in [SamplingPath::FastDecomposition, SamplingPath::BruteForce] {
        let cfg = SimConfig::multiuser(4, ScalingPolicy::fixed(8), vec![10.0]).with_trials(1000).with_path(path);
        g.bench_function(path.label(), |b| b.iter(|| black_box(mu_throughput(&cfg).unwrap())));
    }
    g.finish();
}

criterion_group!(benches, quantizer, inverse, trials);
criterion_main!(benches);
