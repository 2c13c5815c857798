//! Data-parallel helpers for independent work items (theorem trials,
//! oracle batches, instance sets). With the `parallel` feature these fan
//! out over rayon; without it they fall back to plain iteration. Results
//! always come back in input order, so callers stay deterministic either
//! way. The `*_seq` twins are always sequential, for comparison.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f` to `0..n`, collecting in index order.
pub fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
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

/// Sequential twin of [`map_indexed`].
pub fn map_indexed_seq<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

/// Runs two closures, in parallel when enabled.
pub fn join<A, B, FA, FB>(fa: FA, fb: FB) -> (A, B)
where
    A: Send,
    B: Send,
    FA: FnOnce() -> A + Send,
    FB: FnOnce() -> B + Send,
{
    #[cfg(feature = "parallel")]
    {
        rayon::join(fa, fb)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (fa(), fb())
    }
}
