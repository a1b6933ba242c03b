//! Data-parallel evaluation helpers.
//!
//! Probes evaluate many independent tasks (tagged partitions, sampled
//! vector triples, grid points) and then reduce with either an
//! order-independent max or a sequential left-to-right fold. The helpers
//! here parallelize only the independent evaluations and always return
//! results in task order, so every caller is bit-identical with and
//! without the `parallel` feature.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Evaluates `f(0..n)` and collects the results in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Evaluates `f(0..n)` and collects the results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Sequential twin of [`map_indexed`], kept unconditionally for the
/// benchmark suite.
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Rayon twin of [`map_indexed`] for benches comparing both paths.
#[cfg(feature = "parallel")]
pub fn map_indexed_par<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Deterministic per-task RNG: one ChaCha stream per `(seed, stream)`
/// pair, independent of scheduling.
pub fn subrng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn map_indexed_preserves_order() {
        let v = map_indexed(100, |i| i * i);
        assert_eq!(v, (0..100).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn subrng_streams_are_stable_and_distinct() {
        let a: f64 = subrng(7, 0).gen();
        let a2: f64 = subrng(7, 0).gen();
        let b: f64 = subrng(7, 1).gen();
        assert_eq!(a, a2);
        assert_ne!(a, b);
    }
}
