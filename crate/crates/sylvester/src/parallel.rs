//! Deterministic data-parallel chunking.
//!
//! Per-target work is split into fixed-size index chunks; chunk results
//! are combined sequentially in index order. Because the chunk boundaries
//! do not depend on the thread count, outputs are bitwise identical
//! whether the chunks run on rayon, on a single-thread pool, or through
//! the sequential fallback compiled without the `parallel` feature.

use std::ops::Range;

/// Targets per chunk. Small enough to load-balance a thousand targets,
/// large enough that per-chunk overhead stays negligible.
pub const CHUNK: usize = 32;

pub fn chunk_ranges(len: usize) -> Vec<Range<usize>> {
    (0..len)
        .step_by(CHUNK)
        .map(|lo| lo..(lo + CHUNK).min(len))
        .collect()
}

/// Map `f` over the fixed chunks of 0..len, results in chunk order.
#[cfg(feature = "parallel")]
pub fn map_chunks<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    use rayon::prelude::*;
    chunk_ranges(len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_chunks<T, F>(len: usize, f: F) -> Vec<T>
where
    F: Fn(Range<usize>) -> T,
{
    chunk_ranges(len).into_iter().map(f).collect()
}

/// Always-sequential variant with the identical chunking, for reference
/// results and benchmarks.
pub fn map_chunks_seq<T, F>(len: usize, f: F) -> Vec<T>
where
    F: Fn(Range<usize>) -> T,
{
    chunk_ranges(len).into_iter().map(f).collect()
}
