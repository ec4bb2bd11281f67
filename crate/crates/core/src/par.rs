//! Data-parallel helpers. With the `parallel` feature they run on rayon;
//! without it, or when [`Parallelism::Sequential`] is requested, they run on
//! the calling thread. Results are identical either way.

/// Runtime choice of execution strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Sequential,
    #[default]
    Parallel,
}

impl Parallelism {
    /// Whether work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Parallel
    }
}

/// Below this many items a parallel fold is not worth the scheduling cost.
#[cfg(feature = "parallel")]
const MIN_PARALLEL_ITEMS: u64 = 1 << 10;

/// Folds `0..n` into per-worker accumulators and merges them.
pub fn fold_range<A, I, F, C>(par: Parallelism, n: u64, init: I, fold: F, combine: C) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(A, u64) -> A + Sync + Send,
    C: Fn(A, A) -> A + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par.is_parallel() && n >= MIN_PARALLEL_ITEMS {
        use rayon::prelude::*;
        return (0..n).into_par_iter().fold(&init, &fold).reduce(&init, &combine);
    }
    let _ = (&combine, par);
    (0..n).fold(init(), fold)
}

/// Maps a slice, keeping input order in the output.
pub fn map_ordered<T, R, F>(par: Parallelism, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par.is_parallel() && items.len() > 1 {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = par;
    items.iter().map(f).collect()
}

/// Runs two closures, concurrently when parallelism is enabled.
pub fn join<A, B, RA, RB>(par: Parallelism, a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    #[cfg(feature = "parallel")]
    if par.is_parallel() {
        return rayon::join(a, b);
    }
    let _ = par;
    (a(), b())
}
