//! Trial executor.
//!
//! Trials are split into fixed chunks of [`CHUNK`] consecutive trial indices.
//! Each chunk starts from a fresh accumulator, trial `t` reads the stream
//! `StreamRng::for_trial(seed, t)`, and chunk results are merged in chunk
//! order. The result therefore does not depend on how chunks are scheduled,
//! and the sequential and parallel executors agree bit for bit.

use crate::rng::StreamRng;

/// Trials per chunk.
pub const CHUNK: u64 = 4096;

fn chunk_bounds(trials: u64, chunk: u64) -> (u64, u64) {
    let start = chunk * CHUNK;
    (start, (start + CHUNK).min(trials))
}

fn run_chunk<A, S, E>(
    seed: u64,
    trials: u64,
    chunk: u64,
    init: &(impl Fn() -> A + Sync),
    scratch: &(impl Fn() -> S + Sync),
    trial: &(impl Fn(&mut A, &mut S, &mut StreamRng) -> Result<(), E> + Sync),
) -> Result<A, E> {
    let (lo, hi) = chunk_bounds(trials, chunk);
    let mut acc = init();
    let mut s = scratch();
    for t in lo..hi {
        let mut rng = StreamRng::for_trial(seed, t);
        trial(&mut acc, &mut s, &mut rng)?;
    }
    Ok(acc)
}

/// Runs all chunks on the calling thread.
pub fn run_trials_sequential<A, S, E>(
    trials: u64,
    seed: u64,
    init: impl Fn() -> A + Sync,
    scratch: impl Fn() -> S + Sync,
    trial: impl Fn(&mut A, &mut S, &mut StreamRng) -> Result<(), E> + Sync,
    merge: impl Fn(&mut A, A),
) -> Result<A, E> {
    let chunks = trials.div_ceil(CHUNK);
    let mut total = init();
    for c in 0..chunks {
        merge(&mut total, run_chunk(seed, trials, c, &init, &scratch, &trial)?);
    }
    Ok(total)
}

/// Runs chunks on the current rayon pool and merges them in chunk order.
#[cfg(feature = "parallel")]
pub fn run_trials_parallel<A, S, E>(
    trials: u64,
    seed: u64,
    init: impl Fn() -> A + Sync,
    scratch: impl Fn() -> S + Sync,
    trial: impl Fn(&mut A, &mut S, &mut StreamRng) -> Result<(), E> + Sync,
    merge: impl Fn(&mut A, A),
) -> Result<A, E>
where
    A: Send,
    E: Send,
{
    use rayon::prelude::*;
    let chunks = trials.div_ceil(CHUNK);
    let parts: Vec<Result<A, E>> =
        (0..chunks).into_par_iter().map(|c| run_chunk(seed, trials, c, &init, &scratch, &trial)).collect();
    let mut total = init();
    for part in parts {
        merge(&mut total, part?);
    }
    Ok(total)
}

/// The parallel executor when the `parallel` feature is enabled, otherwise the
/// sequential one.
pub fn run_trials<A, S, E>(
    trials: u64,
    seed: u64,
    init: impl Fn() -> A + Sync,
    scratch: impl Fn() -> S + Sync,
    trial: impl Fn(&mut A, &mut S, &mut StreamRng) -> Result<(), E> + Sync,
    merge: impl Fn(&mut A, A),
) -> Result<A, E>
where
    A: Send,
    E: Send,
{
    #[cfg(feature = "parallel")]
    {
        run_trials_parallel(trials, seed, init, scratch, trial, merge)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_trials_sequential(trials, seed, init, scratch, trial, merge)
    }
}

/// Counts trials for which `hit` returns true.
pub fn count_hits<S, E>(
    trials: u64,
    seed: u64,
    scratch: impl Fn() -> S + Sync,
    hit: impl Fn(&mut S, &mut StreamRng) -> Result<bool, E> + Sync,
) -> Result<u64, E>
where
    E: Send,
{
    run_trials(
        trials,
        seed,
        || 0u64,
        scratch,
        |acc, s, rng| {
            *acc += hit(s, rng)? as u64;
            Ok(())
        },
        |a, b| *a += b,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    fn sum_of_words(executor: fn(u64) -> Vec<u64>) -> Vec<u64> {
        executor(10_000)
    }

    #[test]
    fn executors_agree_bitwise() {
        let seq = sum_of_words(|n| {
            run_trials_sequential(
                n,
                5,
                Vec::new,
                || (),
                |acc: &mut Vec<u64>, _, rng| {
                    acc.push(rng.next_word());
                    Ok::<_, Infallible>(())
                },
                |a, b| a.extend(b),
            )
            .unwrap()
        });
        let par = run_trials(
            10_000,
            5,
            Vec::new,
            || (),
            |acc: &mut Vec<u64>, _, rng| {
                acc.push(rng.next_word());
                Ok::<_, Infallible>(())
            },
            |a, b| a.extend(b),
        )
        .unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq.len(), 10_000);
        assert_eq!(seq[17], StreamRng::for_trial(5, 17).next_word());
    }

    #[test]
    fn errors_propagate() {
        let r: Result<u64, &str> = count_hits(100, 1, || (), |_, _| Err("boom"));
        assert_eq!(r, Err("boom"));
    }
}
