//! Execution helpers: data-parallel index maps with a sequential fallback.
//!
//! With the `parallel` feature (on by default) [`map_indexed`] fans work out
//! over rayon's global thread pool; without the feature the same call runs
//! sequentially. Both paths return identical results for pure per-index work
//! because outputs are collected in index order and no cross-item reduction
//! happens here. [`map_indexed_seq`] is always sequential so a single build
//! can benchmark both strategies side by side.
//!
//! Reductions that must be bit-reproducible (e.g. window sums) are performed
//! by callers over these ordered vectors, never via unordered parallel folds.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, in parallel when the `parallel` feature is enabled.
///
/// The result vector is ordered by index regardless of scheduling, so the
/// output is independent of thread count.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sequential twin of [`map_indexed`]; exists so benchmarks can compare the
/// parallel and sequential strategies within one compiled artifact.
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
