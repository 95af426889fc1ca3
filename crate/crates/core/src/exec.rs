//! Ordered task map with a rayon backend and a sequential fallback.
//!
//! Results always come back in task order, so any reduction performed by
//! the caller sees the same sequence of values whatever the scheduling.

/// How independent Monte Carlo tasks are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Uses the ambient rayon pool. Without the `parallel` feature this is
    /// the same as `Sequential`.
    #[default]
    Parallel,
}

impl Execution {
    pub fn map<T, F>(self, n_tasks: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Send + Sync,
    {
        match self {
            Execution::Sequential => (0..n_tasks).map(f).collect(),
            Execution::Parallel => par_map(n_tasks, f),
        }
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, F>(n_tasks: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    use rayon::prelude::*;
    (0..n_tasks).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, F>(n_tasks: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    (0..n_tasks).map(f).collect()
}

pub fn num_threads() -> usize {
    #[cfg(feature = "parallel")]
    return rayon::current_num_threads();

    #[cfg(not(feature = "parallel"))]
    return 1;
}
