//! Replica-parallel execution with results in replica order.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Runs `job(r)` for `r in 0..replicas` on `threads` workers (0 = rayon default)
/// and returns the results indexed by replica, independent of scheduling.
pub fn run_replicas<T, F>(replicas: usize, threads: usize, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    pool.install(|| (0..replicas as u64).into_par_iter().map(&job).collect())
}
