//! Execution strategy for the data-parallel inner loops.
//!
//! With the `parallel` feature (default) independent work items run on the
//! rayon pool; without it the same closures run sequentially. Both paths
//! visit items in index order with order-preserving collection and keep
//! every floating-point reduction inside a single item, so results are
//! byte-identical regardless of feature selection or pool size.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Runs `f` on a dedicated pool of `jobs` threads, or on the default/current
/// pool when `jobs` is `None` or zero. Sequential builds ignore `jobs`.
#[cfg(feature = "parallel")]
pub fn run_with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match jobs {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("rayon pool construction")
            .install(f),
        _ => f(),
    }
}

/// Sequential fallback: runs `f` directly.
#[cfg(not(feature = "parallel"))]
pub fn run_with_jobs<R>(jobs: Option<usize>, f: impl FnOnce() -> R) -> R {
    let _ = jobs;
    f()
}

/// Maps `0..n` through `f`, collecting results in index order.
#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Applies `f` to disjoint consecutive chunks of `data`, passing each chunk's
/// index. Chunks are independent, so scheduling cannot change the result.
#[cfg(feature = "parallel")]
pub(crate) fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync,
{
    data.par_chunks_mut(chunk)
        .enumerate()
        .for_each(|(i, c)| f(i, c));
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    F: Fn(usize, &mut [T]),
{
    for (i, c) in data.chunks_mut(chunk).enumerate() {
        f(i, c);
    }
}
