//! Thread-pool batch evaluation. Results are collected in input order, so the
//! outcome never depends on the worker count.

use anyhow::{Context, Result};
use qmeta_core::metaloop::{rollout, BatchEvaluator, CostInput, Rollout};
use qmeta_core::qsim::CostTable;
use qmeta_core::seqmodels::MetaOptimizer;
use rayon::prelude::*;

pub struct ParallelEvaluator {
    pool: rayon::ThreadPool,
}

impl ParallelEvaluator {
    /// `workers = 0` picks the number of available cores.
    pub fn new(workers: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .context("starting worker pool")?;
        Ok(Self { pool })
    }

    pub fn pool(&self) -> &rayon::ThreadPool {
        &self.pool
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl BatchEvaluator for ParallelEvaluator {
    fn rollouts<M: MetaOptimizer + Sync>(
        &self,
        model: &M,
        tables: &[&CostTable],
        horizon: usize,
        input: &CostInput,
    ) -> Vec<qmeta_core::Result<Rollout>> {
        self.pool.install(|| {
            tables
                .par_iter()
                .map(|t| rollout(model, t, horizon, input, true))
                .collect()
        })
    }
}
