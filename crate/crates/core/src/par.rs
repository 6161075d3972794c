//! Deterministic data-parallel helpers.
//!
//! Reductions split the index range into chunks of [`CHUNK`] elements, reduce each chunk
//! sequentially and then combine the chunk results in index order. The reduction tree is
//! therefore fixed, and the result is bit-identical whether the chunks run on rayon or on the
//! sequential fallback (`--no-default-features`).

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub const CHUNK: usize = 2048;

fn chunk_count(n: usize) -> usize {
    n.div_ceil(CHUNK)
}

/// Map-reduce over `0..n` with a fixed reduction tree.
pub fn reduce<T, M, C>(n: usize, identity: T, map: M, combine: C) -> T
where
    T: Copy + Send + Sync,
    M: Fn(usize) -> T + Sync + Send,
    C: Fn(T, T) -> T + Sync + Send,
{
    let chunk = |c: usize| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(n);
        (lo..hi).fold(identity, |acc, i| combine(acc, map(i)))
    };
    #[cfg(feature = "parallel")]
    let partial: Vec<T> = (0..chunk_count(n)).into_par_iter().map(chunk).collect();
    #[cfg(not(feature = "parallel"))]
    let partial: Vec<T> = (0..chunk_count(n)).map(chunk).collect();
    partial.into_iter().fold(identity, &combine)
}

pub fn sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    reduce(n, 0.0, f, |a, b| a + b)
}

/// Largest value of `f` over `0..n`; `-inf` for an empty range.
pub fn max<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    reduce(n, f64::NEG_INFINITY, f, f64::max)
}

pub fn map<T, F>(n: usize, f: F) -> Vec<T>
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

/// First index (in index order) where `pred` holds.
pub fn position<F>(n: usize, pred: F) -> Option<usize>
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().position_first(pred)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).position(pred)
    }
}
