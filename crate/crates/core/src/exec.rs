//! Execution strategy for data-parallel loops.
//!
//! Work is cut into fixed index blocks whose partial results are merged in
//! block order, so the output never depends on the number of worker threads
//! or on whether rayon is enabled at all.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Number of indices handled by one work unit in [`Exec::map_blocks`].
pub const BLOCK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Exec::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Applies `f` to every index in `0..n`, preserving order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Exec::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
        }
    }

    /// Applies `f` to consecutive index ranges of length [`BLOCK`] covering
    /// `0..n` and returns the per-block results in block order.
    pub fn map_blocks<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(std::ops::Range<usize>) -> T + Sync + Send,
    {
        let blocks = n.div_ceil(BLOCK);
        self.map(blocks, |b| {
            let start = b * BLOCK;
            f(start..(start + BLOCK).min(n))
        })
    }
}
