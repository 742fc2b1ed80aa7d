//! Deterministic parallel replicates.

use lwf_core::RngStream;
use rayon::prelude::*;

/// Stream id of replicate `i` in sub-run `sub_run`.
pub fn stream_id(sub_run: u64, i: u64) -> u64 {
    debug_assert!(i < 1 << 40);
    (sub_run << 40) | i
}

/// Runs `f` for replicates `0..n` in parallel, each on its own stream, and returns
/// the results in replicate order regardless of scheduling.
pub fn replicates<T, E, F>(seed: u64, sub_run: u64, n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(u64, &mut RngStream) -> Result<T, E> + Sync,
{
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(seed, stream_id(sub_run, i));
            f(i, &mut rng)
        })
        .collect()
}

/// Runs `f` on a pool of `threads` workers (the global pool when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}
