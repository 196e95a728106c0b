//! Data-parallel helpers. With the `parallel` feature off everything runs on
//! the calling thread.

/// Applies `f` to every item, in parallel unless `sequential` is set or the
/// crate was built without the `parallel` feature. Output order follows input
/// order.
pub fn map_with<T, R, F>(items: &[T], sequential: bool, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if !sequential {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
    }
    let _ = sequential;
    items.iter().map(f).collect()
}

pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map_with(items, false, f)
}

/// Runs `f` with at most `jobs` worker threads.
pub fn with_jobs<R: Send>(jobs: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
            return pool.install(f);
        }
    }
    let _ = jobs;
    f()
}

pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}
