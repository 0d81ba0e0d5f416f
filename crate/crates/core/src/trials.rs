//! Block-partitioned Monte Carlo driver.
//!
//! Trials are cut into fixed-size blocks. Block `b` draws from
//! `stream.split(b)`, and block results are merged left to right in block
//! order, so the outcome is a function of the seed alone: it does not change
//! with the number of worker threads or with the `parallel` feature.

use crate::rng::RandomStream;

/// Trials per block. Part of the reproducibility contract: changing it
/// changes every seeded Monte Carlo result.
pub const BLOCK_SIZE: usize = 1024;

/// How blocks are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Execution::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Execution::Sequential
        }
    }
}

/// Runs `trials` trials and returns the per-block results in block order.
///
/// `block` receives the block's stream and the number of trials it owns.
pub fn map_blocks_with<T, F>(exec: Execution, stream: &RandomStream, trials: usize, block: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RandomStream, usize) -> T + Sync + Send,
{
    let blocks = trials.div_ceil(BLOCK_SIZE);
    let run = |b: usize| {
        let len = BLOCK_SIZE.min(trials - b * BLOCK_SIZE);
        let mut s = stream.split(b as u64);
        block(&mut s, len)
    };
    match exec {
        Execution::Sequential => (0..blocks).map(run).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..blocks).into_par_iter().map(run).collect()
        }
    }
}

pub fn map_blocks<T, F>(stream: &RandomStream, trials: usize, block: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RandomStream, usize) -> T + Sync + Send,
{
    map_blocks_with(Execution::default(), stream, trials, block)
}

/// Per-trial values, concatenated in trial order.
pub fn collect_trials<T, F>(stream: &RandomStream, trials: usize, trial: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RandomStream) -> T + Sync + Send,
{
    collect_trials_with(Execution::default(), stream, trials, trial)
}

pub fn collect_trials_with<T, F>(exec: Execution, stream: &RandomStream, trials: usize, trial: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RandomStream) -> T + Sync + Send,
{
    let blocks = map_blocks_with(exec, stream, trials, |s, len| {
        (0..len).map(|_| trial(s)).collect::<Vec<_>>()
    });
    let mut out = Vec::with_capacity(trials);
    for b in blocks {
        out.extend(b);
    }
    out
}

/// Folds trials into an accumulator per block, then merges blocks in order.
pub fn fold_trials<A, F, M>(stream: &RandomStream, trials: usize, init: A, trial: F, merge: M) -> A
where
    A: Clone + Send + Sync,
    F: Fn(&mut A, &mut RandomStream) + Sync + Send,
    M: Fn(&mut A, A),
{
    let blocks = map_blocks(stream, trials, |s, len| {
        let mut acc = init.clone();
        for _ in 0..len {
            trial(&mut acc, s);
        }
        acc
    });
    let mut total = init;
    for b in blocks {
        merge(&mut total, b);
    }
    total
}
