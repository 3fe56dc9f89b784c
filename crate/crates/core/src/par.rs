//! Data-parallel map helper.
//!
//! With the `parallel` feature (on by default) the work is spread over a rayon
//! pool; without it the same call runs sequentially. Callers must keep the
//! closure free of shared mutable state so both paths produce identical
//! output; all determinism-sensitive call sites derive per-item seeds up
//! front, so the schedule never influences results.

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(usize, &T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().enumerate().map(|(i, x)| f(i, x)).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(usize, &T) -> U,
{
    items.iter().enumerate().map(|(i, x)| f(i, x)).collect()
}
