//! Parallel drivers for the core suites. Results come back in trial order
//! whatever the thread count.

use monosched_core::numerics::Rational;
use monosched_core::solver::Schedule;
use monosched_core::verify::generate::Shape;
use monosched_core::verify::properties;
use monosched_core::verify::suites as core_suites;
use monosched_core::verify::TrialRecord;
use rayon::prelude::*;
use rayon::ThreadPool;

/// Suites selectable from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    /// Canonicality, workload bounds and approximation ratio on random instances.
    Checks,
    /// Every small instance over a fixed size and speed grid.
    Exhaustive,
    Monotonicity,
    Truthfulness,
    /// Canonical rounded optimum, its path encoding and the path optimum.
    Construction,
    /// Path optimum against OPT at t = 22.
    Fine,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Checks => "checks",
            Suite::Exhaustive => "exhaustive",
            Suite::Monotonicity => "monotonicity",
            Suite::Truthfulness => "truthfulness",
            Suite::Construction => "construction",
            Suite::Fine => "fine",
        }
    }
}

/// Rayon pool with `threads` workers (0 lets rayon decide).
pub fn thread_pool(threads: usize) -> ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
}

fn indexed(pool: &ThreadPool, trials: u64, f: impl Fn(u64) -> TrialRecord + Sync + Send) -> Vec<TrialRecord> {
    pool.install(|| (0..trials).into_par_iter().map(&f).collect())
}

/// Every trial of the exhaustive suite, indexed consecutively. `trials` caps the count.
pub fn exhaustive(pool: &ThreadPool, trials: Option<u64>) -> Vec<TrialRecord> {
    let groups = core_suites::approx_groups();
    let mut starts = Vec::with_capacity(groups.len());
    let mut next = 0u64;
    for (_, m) in &groups {
        starts.push(next);
        // multisets of size m over three speeds
        next += ((m + 1) * (m + 2) / 2) as u64;
    }
    let mut out: Vec<TrialRecord> = pool.install(|| {
        groups
            .par_iter()
            .zip(starts)
            .flat_map_iter(|((jobs, m), start)| core_suites::approx_group(jobs, *m, start))
            .collect()
    });
    if let Some(cap) = trials {
        out.truncate(cap as usize);
    }
    out
}

/// Runs `suite` with `trials` trials (the exhaustive suite runs to completion unless capped).
pub fn run(
    suite: Suite,
    shape: &Shape,
    seed: u64,
    trials: Option<u64>,
    pool: &ThreadPool,
    tamper: Option<fn(&mut Schedule)>,
) -> Vec<TrialRecord> {
    let n = trials.unwrap_or(100);
    match suite {
        Suite::Checks => indexed(pool, n, |i| core_suites::verify_trial(seed, i, shape, tamper)),
        Suite::Exhaustive => exhaustive(pool, trials),
        Suite::Monotonicity => indexed(pool, n, |i| core_suites::monotonicity_trial(seed, i, shape)),
        Suite::Truthfulness => indexed(pool, n, |i| core_suites::truthfulness_trial(seed, i, shape)),
        Suite::Construction => indexed(pool, n, |i| core_suites::construction_trial(seed, i)),
        Suite::Fine => indexed(pool, n, |i| core_suites::fine_trial(seed, i)),
    }
}

/// Default random-instance shape, with optional epsilon and degree overrides.
pub fn shape(epsilon: Option<&Rational>, t: Option<u32>) -> Shape {
    let mut s = Shape::small();
    if let Some(e) = epsilon {
        s.epsilon = e.clone();
    }
    if let Some(t) = t {
        s.degrees = vec![t];
    }
    s
}

/// Failures of one structural property suite.
pub struct PropertyOutcome {
    pub name: &'static str,
    pub calls: usize,
    pub failures: Vec<String>,
}

const LEMMA_BATCH: usize = 100;

/// Runs `calls` randomized calls of every structural property check, in batches of 100.
pub fn property_suites(seed: u64, calls: usize, pool: &ThreadPool) -> Vec<PropertyOutcome> {
    type Batch = fn(u64, u64, usize) -> Vec<Result<(), String>>;
    let suites: [(&'static str, Batch); 4] = [
        ("core sorting", properties::core_sorting_batch),
        ("core bounds", properties::core_bounds_batch),
        ("delta division", properties::delta_division_batch),
        ("block size", properties::block_size_batch),
    ];
    let batches = calls.div_ceil(LEMMA_BATCH) as u64;
    suites
        .iter()
        .map(|&(name, f)| {
            let results: Vec<Result<(), String>> = pool.install(|| {
                (0..batches)
                    .into_par_iter()
                    .flat_map_iter(|b| {
                        let size = LEMMA_BATCH.min(calls - b as usize * LEMMA_BATCH);
                        f(seed, b, size)
                    })
                    .collect()
            });
            PropertyOutcome {
                name,
                calls: results.len(),
                failures: results.into_iter().filter_map(Result::err).collect(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_count_does_not_change_order() {
        let s = shape(None, None);
        let a = run(Suite::Checks, &s, 5, Some(6), &thread_pool(1), None);
        let b = run(Suite::Checks, &s, 5, Some(6), &thread_pool(4), None);
        assert_eq!(a, b);
        assert_eq!(a.iter().map(|r| r.index).collect::<Vec<_>>(), (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn exhaustive_indices_are_consecutive() {
        let r = exhaustive(&thread_pool(2), Some(40));
        assert_eq!(r.iter().map(|r| r.index).collect::<Vec<_>>(), (0..40).collect::<Vec<_>>());
    }
}
