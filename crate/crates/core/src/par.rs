//! Per-chunk transform execution within one level.
//!
//! Chunks are independent, so with the `parallel` feature they are spread
//! over the rayon pool. Without it, or for short inputs, they run in order.

use crate::hadamard::HadamardSpec;

/// Below this many chunks the sequential loop wins.
pub const PARALLEL_MIN_CHUNKS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

fn run_chunk(spec: &HadamardSpec, dir: Direction, chunk: &mut [u64]) {
    match dir {
        Direction::Forward => spec.forward_in_place(chunk),
        Direction::Inverse => spec.inverse_in_place(chunk),
    }
}

/// Transforms every `order`-sized chunk of `data` in order on the calling thread.
pub fn transform_chunks_sequential(spec: &HadamardSpec, dir: Direction, data: &mut [u64]) {
    debug_assert_eq!(data.len() % spec.order(), 0);
    for chunk in data.chunks_exact_mut(spec.order()) {
        run_chunk(spec, dir, chunk);
    }
}

/// Transforms every chunk on the rayon pool.
#[cfg(feature = "parallel")]
pub fn transform_chunks_parallel(spec: &HadamardSpec, dir: Direction, data: &mut [u64]) {
    use rayon::prelude::*;
    debug_assert_eq!(data.len() % spec.order(), 0);
    data.par_chunks_exact_mut(spec.order())
        .for_each(|chunk| run_chunk(spec, dir, chunk));
}

/// Default dispatch used by the cipher.
pub fn transform_chunks(spec: &HadamardSpec, dir: Direction, data: &mut [u64]) {
    #[cfg(feature = "parallel")]
    if data.len() / spec.order() >= PARALLEL_MIN_CHUNKS {
        return transform_chunks_parallel(spec, dir, data);
    }
    transform_chunks_sequential(spec, dir, data)
}

/// Maps `f` over `0..count`, in parallel when the feature is enabled.
pub(crate) fn map_indices<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::spec_for_exponent;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dispatch_matches_per_chunk_naive() {
        let spec = spec_for_exponent(16, 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data: Vec<u64> = (0..16 * 200).map(|_| rng.gen_range(0..=127)).collect();
        let expected: Vec<u64> = data
            .chunks(16)
            .flat_map(|c| spec.apply_naive(c).unwrap())
            .collect();
        let mut got = data.clone();
        transform_chunks(&spec, Direction::Forward, &mut got);
        assert_eq!(got, expected);
        transform_chunks(&spec, Direction::Inverse, &mut got);
        let reduced: Vec<u64> = data.iter().map(|v| v % 127).collect();
        assert_eq!(got, reduced);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_equals_sequential() {
        let spec = spec_for_exponent(8, 5).unwrap();
        let data: Vec<u64> = (0..8 * 500).map(|i| i as u64 % 32).collect();
        let mut a = data.clone();
        let mut b = data;
        transform_chunks_sequential(&spec, Direction::Forward, &mut a);
        transform_chunks_parallel(&spec, Direction::Forward, &mut b);
        assert_eq!(a, b);
    }

    #[test]
    fn map_indices_keeps_order() {
        assert_eq!(map_indices(5, |i| i * i), [0, 1, 4, 9, 16]);
    }
}
