use std::sync::Arc;

use calmix_core::BlockExecutor;
use rayon::prelude::*;

/// Runs simulation blocks on a rayon pool. Block results are collected in
/// block order, so output does not depend on the thread count.
#[derive(Debug, Clone, Default)]
pub struct Rayon {
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl Rayon {
    /// `threads = None` uses the global pool.
    pub fn new(threads: Option<usize>) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = match threads {
            Some(n) => Some(Arc::new(
                rayon::ThreadPoolBuilder::new().num_threads(n).build()?,
            )),
            None => None,
        };
        Ok(Self { pool })
    }
}

impl BlockExecutor for Rayon {
    fn map_blocks<R, F>(&self, blocks: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        let run = || (0..blocks).into_par_iter().map(&f).collect();
        match &self.pool {
            Some(pool) => pool.install(run),
            None => run(),
        }
    }
}
