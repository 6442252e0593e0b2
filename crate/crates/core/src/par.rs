//! Index-parallel map used by ensembles and grid sweeps.
//!
//! With the `parallel` feature the work is spread over the rayon pool;
//! without it the same closure runs sequentially. Output order is always the
//! index order, so reductions over the result are deterministic.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluate `f(0), …, f(n-1)` and collect in index order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
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
        map_indexed_serial(n, f)
    }
}

/// Sequential reference path; always available.
pub fn map_indexed_serial<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_serial_agree() {
        let f = |i: usize| (i as f64).sqrt().sin();
        assert_eq!(map_indexed(1000, f), map_indexed_serial(1000, f));
    }
}
