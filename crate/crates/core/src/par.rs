//! Sequential or data-parallel evaluation of independent work items.
//!
//! With the `parallel` feature off, only [`Exec::Sequential`] exists and the
//! crate builds without rayon.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
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
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Exec::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.par_iter().map(f).collect(),
        }
    }

    /// The result for the smallest index in `range` where `f` returns `Some`.
    pub fn find_first<R, F>(self, range: Range<u64>, f: F) -> Option<R>
    where
        R: Send,
        F: Fn(u64) -> Option<R> + Sync + Send,
    {
        match self {
            Exec::Sequential => range.into_iter().find_map(f),
            #[cfg(feature = "parallel")]
            Exec::Parallel => range.into_par_iter().find_map_first(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        let seq = Exec::Sequential.map(&xs, |x| x * x);
        assert_eq!(Exec::default().map(&xs, |x| x * x), seq);
        let hit = |i: u64| (i % 97 == 96).then_some(i);
        assert_eq!(Exec::Sequential.find_first(0..1000, hit), Some(96));
        assert_eq!(Exec::default().find_first(0..1000, hit), Some(96));
    }
}
