//! Data-parallel execution with a sequential fallback.
//!
//! Every parallel routine in the crate goes through [`Executor::map`], which
//! returns results in index order. Callers assign each index its own random
//! stream, so the output never depends on how work is scheduled.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug)]
enum Backend {
    Sequential,
    #[cfg(feature = "parallel")]
    Global,
    #[cfg(feature = "parallel")]
    Pool(rayon::ThreadPool),
}

#[derive(Debug)]
pub struct Executor {
    backend: Backend,
}

impl Executor {
    /// `None` uses every available core, `Some(1)` runs on the calling
    /// thread. Without the `parallel` feature this is always sequential.
    pub fn new(workers: Option<usize>) -> Self {
        Self {
            backend: Self::backend_for(workers),
        }
    }

    pub fn sequential() -> Self {
        Self {
            backend: Backend::Sequential,
        }
    }

    #[cfg(feature = "parallel")]
    fn backend_for(workers: Option<usize>) -> Backend {
        match workers {
            Some(0 | 1) => Backend::Sequential,
            None => Backend::Global,
            Some(k) => rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map(Backend::Pool)
                .unwrap_or(Backend::Global),
        }
    }

    #[cfg(not(feature = "parallel"))]
    fn backend_for(_workers: Option<usize>) -> Backend {
        Backend::Sequential
    }

    pub fn is_parallel(&self) -> bool {
        !matches!(self.backend, Backend::Sequential)
    }

    /// Applies `f` to `0..len` and collects the results in index order.
    pub fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match &self.backend {
            Backend::Sequential => (0..len).map(f).collect(),
            #[cfg(feature = "parallel")]
            Backend::Global => (0..len).into_par_iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Backend::Pool(pool) => pool.install(|| (0..len).into_par_iter().map(f).collect()),
        }
    }
}

impl Default for Executor {
    fn default() -> Self {
        Self::new(None)
    }
}
