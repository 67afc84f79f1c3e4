use std::hint::black_box;

use chained_hadamard::hadamard::spec_for_exponent;
use chained_hadamard::Kernel;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn naive_vs_fast(c: &mut Criterion) {
    let mut group = c.benchmark_group("hadamard_kernel");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for exponent in [5u64, 31] {
        for order in [8usize, 32, 128] {
            let spec = spec_for_exponent(order, exponent).unwrap();
            let v: Vec<u64> = (0..order).map(|_| rng.gen_range(0..spec.modulus())).collect();
            let label = format!("p{}_n{order}", spec.modulus());
            for (name, kernel) in [("naive", Kernel::Naive), ("fast", Kernel::Fast)] {
                group.bench_with_input(BenchmarkId::new(name, &label), &v, |b, v| {
                    b.iter(|| spec.apply(kernel, black_box(v)).unwrap())
                });
            }
        }
    }
    group.finish();
}

criterion_group!(benches, naive_vs_fast);
criterion_main!(benches);
