//! Execution policy for batch work (grid sweeps, random samples, trajectory fans).
//!
//! With the `parallel` feature (on by default) [`Execution::Parallel`] fans work
//! out over the rayon pool. Without it, every policy runs sequentially. Results
//! are always returned in input order, so output does not depend on scheduling.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Map `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }

    /// Map `f` over `0..n`, preserving order.
    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    /// Maximum of `f` over `items` together with the maximizing item's index.
    /// Ties resolve to the lowest index; a NaN value wins so that failed
    /// evaluations surface. Returns `None` for empty input.
    pub fn argmax<T, F>(self, items: &[T], f: F) -> Option<(usize, f64)>
    where
        T: Sync,
        F: Fn(&T) -> f64 + Sync + Send,
    {
        let values = self.map(items, f);
        let mut best: Option<(usize, f64)> = None;
        for (i, v) in values.into_iter().enumerate() {
            let replace = match best {
                None => true,
                Some((_, b)) => !b.is_nan() && (v.is_nan() || v > b),
            };
            if replace {
                best = Some((i, v));
            }
        }
        best
    }
}
