//! Execution-mode plumbing for the sampling campaigns.
//!
//! With the `parallel` feature (default) the campaigns fan out over rayon;
//! without it everything runs sequentially and rayon is not compiled in.
//! Maps preserve input order and all reductions happen sequentially on the
//! collected results, so both modes produce identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use std::ops::Range;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            ExecMode::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            ExecMode::Sequential
        }
    }
}

/// Order-preserving map over a slice.
pub fn map_collect<T, R, F>(mode: ExecMode, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match mode {
        ExecMode::Sequential => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => items.par_iter().map(f).collect(),
    }
}

/// Order-preserving map over an index range.
pub fn map_range<R, F>(mode: ExecMode, range: Range<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match mode {
        ExecMode::Sequential => range.map(f).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => range.into_par_iter().map(f).collect(),
    }
}
