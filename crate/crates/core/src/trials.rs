//! Seeded, order-stable execution of independent trials.
//!
//! Every trial draws from its own ChaCha8 stream: the master seed selects the
//! key and the trial index selects the stream. Trials are grouped into fixed
//! chunks of [`CHUNK`] indices and chunk results are combined in index order,
//! so results are bit-identical whatever the worker count, and identical
//! between [`Execution::Sequential`] and [`Execution::Parallel`].

use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG handed to every trial.
pub type TrialRng = ChaCha8Rng;

/// Trials per chunk.
pub const CHUNK: u64 = 1024;

/// Environment variable that caps the worker count.
pub const THREADS_ENV: &str = "COVER_SAMPLER_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled and otherwise runs
    /// sequentially.
    #[default]
    Parallel,
}

/// The RNG of trial `trial` under master seed `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Installs a global thread pool sized by `COVER_SAMPLER_THREADS`, if set.
/// Returns the number of workers in effect.
pub fn init_threads_from_env() -> usize {
    #[cfg(feature = "parallel")]
    {
        if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
            // A pool may already exist (tests, repeated calls); keep it.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

fn chunks(trials: u64) -> Vec<Range<u64>> {
    (0..trials.div_ceil(CHUNK))
        .map(|c| c * CHUNK..((c + 1) * CHUNK).min(trials))
        .collect()
}

/// Runs `per_chunk` over every chunk of `0..trials` and returns the chunk
/// results in index order.
pub fn run_chunks<A, F>(trials: u64, exec: Execution, per_chunk: F) -> Vec<A>
where
    A: Send,
    F: Fn(Range<u64>) -> A + Sync + Send,
{
    let ranges = chunks(trials);
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            ranges.into_par_iter().map(per_chunk).collect()
        }
        _ => ranges.into_iter().map(per_chunk).collect(),
    }
}

/// Maps every trial to a value; the output is ordered by trial index.
pub fn map_trials<T, F>(seed: u64, trials: u64, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut TrialRng) -> T + Sync + Send,
{
    run_chunks(trials, exec, |range| {
        range
            .map(|t| {
                let mut rng = trial_rng(seed, t);
                f(t, &mut rng)
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Folds trials chunk by chunk. `init` builds a per-chunk accumulator (and
/// any scratch space it carries), `step` consumes one trial, and `merge`
/// combines chunk accumulators left to right.
pub fn fold_trials<A, I, S, M>(seed: u64, trials: u64, exec: Execution, init: I, step: S, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    S: Fn(&mut A, u64, &mut TrialRng) + Sync + Send,
    M: Fn(A, A) -> A,
{
    run_chunks(trials, exec, |range| {
        let mut acc = init();
        for t in range {
            let mut rng = trial_rng(seed, t);
            step(&mut acc, t, &mut rng);
        }
        acc
    })
    .into_iter()
    .fold(init(), merge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn chunk_ranges_cover_everything() {
        let c = chunks(2500);
        assert_eq!(c.len(), 3);
        assert_eq!(c[2], 2048..2500);
        assert!(chunks(0).is_empty());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let f = |t: u64, rng: &mut TrialRng| rng.random::<u64>() ^ t;
        let a = map_trials(9, 5000, Execution::Sequential, f);
        let b = map_trials(9, 5000, Execution::Parallel, f);
        assert_eq!(a, b);

        let sum = |exec| {
            fold_trials(3, 4000, exec, || 0.0f64, |acc, _, rng| *acc += rng.random::<f64>(), |a, b| a + b)
        };
        assert_eq!(sum(Execution::Sequential).to_bits(), sum(Execution::Parallel).to_bits());
    }

    #[test]
    fn streams_differ_per_trial() {
        let a: u64 = trial_rng(1, 0).random();
        let b: u64 = trial_rng(1, 1).random();
        let c: u64 = trial_rng(2, 0).random();
        assert!(a != b && a != c);
    }
}
