//! Data-parallel map over an index range with a sequential fallback.
//!
//! With the `parallel` feature (default) large maps run on the rayon pool;
//! results are always collected in index order, so any reduction performed on
//! the returned `Vec` is independent of the execution schedule. Without the
//! feature, [`map_indexed`] degrades to the sequential loop.

/// Below this length the rayon dispatch overhead outweighs the work.
pub const PAR_MIN_LEN: usize = 64;

/// Applies `f` to each index in `0..len`, returning results in index order.
/// Runs on the rayon pool when the `parallel` feature is enabled and `len`
/// is at least [`PAR_MIN_LEN`].
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if len >= PAR_MIN_LEN {
            return (0..len).into_par_iter().map(f).collect();
        }
    }
    (0..len).map(f).collect()
}

/// Sequential reference path with the same contract as [`map_indexed`].
/// Kept public so benchmarks can compare both under one build.
pub fn map_indexed_seq<T, F>(len: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..len).map(f).collect()
}
