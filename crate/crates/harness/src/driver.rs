//! Deterministic replicate scheduler.
//!
//! Replicates are pure functions of their index; results are collected in
//! index order and all floating-point reduction happens afterwards in a
//! fixed tree ([`wigner_core::stats::tree_reduce`]). Output is therefore
//! identical for any worker count, including the sequential build.

/// Map `f` over replicate indices `0..replicates`.
///
/// With the `parallel` feature enabled and `threads != 1`, the work runs on
/// a rayon pool (`threads == 0` means all available cores); otherwise it
/// runs inline on the calling thread.
pub fn map_replicates<T, F>(replicates: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    #[cfg(feature = "parallel")]
    if threads != 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build();
        match pool {
            Ok(pool) => {
                return pool.install(|| (0..replicates as u64).into_par_iter().map(&f).collect())
            }
            Err(_) => {
                // pool creation failure degrades to sequential execution
            }
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    (0..replicates as u64).map(f).collect()
}
