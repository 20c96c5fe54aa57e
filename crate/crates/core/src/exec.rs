//! Parallel/sequential execution helpers.
//!
//! Per-tick pair evaluation is embarrassingly parallel: every (threat,
//! asset) or (threat, weapon) computation reads immutable snapshots and
//! writes nothing shared. With the `parallel` feature the maps below fan
//! out over rayon; without it they run as plain iterators. Results are
//! collected in input order either way, so both paths produce identical
//! output — the sequential variants stay available for benchmarking the
//! two side by side.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Ordered map over a slice, parallel when the `parallel` feature is on.
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Always-sequential twin of [`map_ordered`].
pub fn map_ordered_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}
