//! Run-level parallelism for sweeps and Monte-Carlo batches.
//!
//! With the `parallel` feature (default) independent runs are spread over the
//! rayon pool; without it they run in order on the calling thread. Results
//! are returned in index order either way, so output does not depend on the
//! feature or on scheduling.

/// Evaluates `f(0), …, f(n − 1)` with the crate's configured strategy.
pub fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        map_indices_parallel(n, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_indices_sequential(n, f)
    }
}

pub fn map_indices_sequential<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_indices_parallel<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}
