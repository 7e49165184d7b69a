//! Data-parallel sweep helper with a sequential fallback.
//!
//! Built with the `parallel` feature (default), sweeps run on rayon; the
//! `NCD_THREADS` environment variable caps the pool size, and `NCD_THREADS=1`
//! short-circuits to the sequential path. Without the feature the same entry
//! point is a plain iterator, so results are bit-identical either way: every
//! sample derives its RNG from `(seed, label, index)` and reductions run in
//! index order.

#[cfg(feature = "parallel")]
mod imp {
    use rayon::prelude::*;
    use std::sync::OnceLock;

    fn thread_cap() -> Option<usize> {
        static CAP: OnceLock<Option<usize>> = OnceLock::new();
        *CAP.get_or_init(|| {
            std::env::var("NCD_THREADS")
                .ok()
                .and_then(|v| v.parse::<usize>().ok())
                .filter(|&n| n > 0)
        })
    }

    fn ensure_pool() {
        static POOL: OnceLock<()> = OnceLock::new();
        POOL.get_or_init(|| {
            if let Some(n) = thread_cap() {
                // Ignore the error if a global pool already exists.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        });
    }

    pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        if thread_cap() == Some(1) {
            return (0..n).map(f).collect();
        }
        ensure_pool();
        (0..n).into_par_iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
mod imp {
    pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}

pub use imp::map_indexed;

/// Sequential sweep entry point with the same signature as [`map_indexed`].
///
/// Kept unconditionally compiled so benchmarks can compare the two paths in
/// a single build.
pub fn map_indexed_sequential<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}
