use rayon::prelude::*;

use crate::error::CliError;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "DUFFING_QSD_THREADS";

pub fn thread_count() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::config(format!("{THREADS_ENV}: expected a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(None),
    }
}

/// Thread pool honoring [`THREADS_ENV`].
pub fn pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count()? {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::io(e.to_string()))
}

/// `f(0), ..., f(n - 1)` in parallel, results in index order. Results never
/// depend on the number of threads as long as `f` depends only on its index.
pub fn map_indexed<T, E, F>(pool: &rayon::ThreadPool, n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    pool.install(|| (0..n).into_par_iter().map(&f).collect())
}
