//! Thin dispatch layer between rayon and plain loops.
//!
//! Every data-parallel kernel in this crate funnels through these helpers.
//! With the `parallel` feature (default) the `*_auto` versions fan out over
//! the rayon pool; without it they alias the sequential versions. The
//! sequential versions are always compiled so tests and benches can compare
//! the two paths directly — results must be identical either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Does `pred` hold for some index in `0..n`? Sequential reference version.
pub fn any_index_seq(n: usize, pred: impl Fn(usize) -> bool) -> bool {
    (0..n).any(pred)
}

/// Does `pred` hold for some index in `0..n`?
#[cfg(feature = "parallel")]
pub fn any_index(n: usize, pred: impl Fn(usize) -> bool + Sync + Send) -> bool {
    (0..n).into_par_iter().any(pred)
}

#[cfg(not(feature = "parallel"))]
pub fn any_index(n: usize, pred: impl Fn(usize) -> bool + Sync + Send) -> bool {
    any_index_seq(n, pred)
}

/// First index in `0..n` satisfying `pred`, if any (smallest index wins).
pub fn find_index_seq(n: usize, pred: impl Fn(usize) -> bool) -> Option<usize> {
    (0..n).find(|&i| pred(i))
}

#[cfg(feature = "parallel")]
pub fn find_index(n: usize, pred: impl Fn(usize) -> bool + Sync + Send) -> Option<usize> {
    (0..n).into_par_iter().find_first(|&i| pred(i))
}

#[cfg(not(feature = "parallel"))]
pub fn find_index(n: usize, pred: impl Fn(usize) -> bool + Sync + Send) -> Option<usize> {
    find_index_seq(n, pred)
}

/// Maps `f` over `0..n` preserving order. Sequential reference version.
pub fn map_indices_seq<T: Send>(n: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_indices<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indices<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    map_indices_seq(n, f)
}

/// Runs `f` over items of `work`, collecting results in input order.
#[cfg(feature = "parallel")]
pub fn map_slice<I: Sync, T: Send>(work: &[I], f: impl Fn(&I) -> T + Sync + Send) -> Vec<T> {
    work.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_slice<I: Sync, T: Send>(work: &[I], f: impl Fn(&I) -> T + Sync + Send) -> Vec<T> {
    work.iter().map(f).collect()
}

/// True iff the crate was built with rayon dispatch.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

/// Caps the global worker pool. No-op without the `parallel` feature.
/// Must be called before any parallel work; later calls fail.
#[cfg(feature = "parallel")]
pub fn set_threads(n: usize) -> std::result::Result<(), String> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

#[cfg(not(feature = "parallel"))]
pub fn set_threads(_n: usize) -> std::result::Result<(), String> {
    Ok(())
}
