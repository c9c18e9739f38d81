//! Execution strategy for the data-parallel kernels.
//!
//! With the `parallel` feature disabled, [`Execution::Parallel`] silently runs
//! sequentially. Results never depend on the strategy.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Smallest `i` in `0..n` for which `f(i)` is `Some`, with its value.
pub fn find_map_first<T, F>(exec: Execution, n: usize, f: F) -> Option<T>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().find_map_first(f)
        }
        _ => (0..n).find_map(f),
    }
}

/// `(0..n).flat_map(f)` collected in index order.
pub fn flat_map_collect<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> Vec<T> + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            let parts: Vec<Vec<T>> = (0..n).into_par_iter().map(f).collect();
            parts.into_iter().flatten().collect()
        }
        _ => (0..n).flat_map(f).collect(),
    }
}

/// `(0..n).map(f)` collected in index order.
pub fn map_collect<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}
