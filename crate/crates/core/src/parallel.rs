//! Order-preserving map over independent work items.
//!
//! With the `parallel` feature the work is spread over the current rayon pool;
//! without it, or with [`Execution::Sequential`], items run in order on the
//! calling thread. Results are always returned in input order, so downstream
//! reductions see identical inputs either way.

use crate::error::{PdcError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether parallel execution is compiled in.
    pub const fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Like [`map`], failing with the error of the lowest failing index.
pub fn try_map<T, R, F>(exec: Execution, items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    map(exec, items, f).into_iter().collect()
}

/// Run `f` on a dedicated pool of `threads` workers; sequential builds just call it.
pub fn with_threads<R, F>(threads: usize, f: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    if threads == 0 {
        return Err(PdcError::Config("thread count must be at least 1".into()));
    }
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| PdcError::Config(format!("cannot start {threads} worker threads: {e}")))?;
        Ok(pool.install(f))
    }
    #[cfg(not(feature = "parallel"))]
    Ok(f())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::PdcError;

    #[test]
    fn both_modes_agree_and_keep_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = map(Execution::Sequential, &xs, |x| x * x);
        let b = map(Execution::Parallel, &xs, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(a[999], 999 * 999);
    }

    #[test]
    fn first_error_by_index() {
        let xs: Vec<usize> = (0..100).collect();
        let r = try_map(Execution::Parallel, &xs, |&x| {
            if x % 30 == 29 {
                Err(PdcError::Physics(format!("{x}")))
            } else {
                Ok(x)
            }
        });
        assert_eq!(r.unwrap_err(), PdcError::Physics("29".into()));
    }

    #[test]
    fn pool_size_is_honoured() {
        let n = with_threads(3, || if Execution::parallel_available() { rayon_threads() } else { 3 }).unwrap();
        assert_eq!(n, 3);
        assert!(with_threads(0, || ()).is_err());
    }

    #[cfg(feature = "parallel")]
    fn rayon_threads() -> usize {
        rayon::current_num_threads()
    }

    #[cfg(not(feature = "parallel"))]
    fn rayon_threads() -> usize {
        3
    }
}
