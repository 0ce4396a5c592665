//! Randomized single-call checks of structural properties.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::canonical::{check_core_bounds, check_delta_division, core, sort_cores, check_sorted_cores};
use crate::config::{extract_sets, weights, Config};
use crate::graph::Graph;
use crate::instance::{JobPool, Params};
use crate::numerics::{cmp_alg, cmp_alg_rational, int, pow2, rat, Rational};

use super::generate::rng_for;

/// Random sizes `{1..16} * 2^e`, `e` in `-3..=2`.
fn random_pool(rng: &mut ChaCha8Rng, n: usize, t: u32) -> JobPool {
    let sizes: Vec<Rational> = (0..n)
        .map(|_| int(rng.gen_range(1..=16)) * pow2(rng.gen_range(-3..=2)))
        .collect();
    JobPool::new(&sizes, Params::new(int(1), t).expect("valid parameters")).expect("positive sizes")
}

/// Core sorting: random sets ordered by rounded weight satisfy properties 1 to 3.
pub fn core_sorting_call(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let t = rng.gen_range(1..=2);
    let n = rng.gen_range(1..=8);
    let pool = random_pool(rng, n, t);
    let m = rng.gen_range(1..=4);
    let mut qs: Vec<Vec<usize>> = alloc::vec![Vec::new(); m];
    for id in 0..n {
        qs[rng.gen_range(0..m)].push(id);
    }
    qs.sort_by(|a, b| cmp_alg(&pool.rounded_weight_of(a), &pool.rounded_weight_of(b)));
    let ls = sort_cores(&qs, &pool).map_err(|e| format!("{e}"))?;
    check_sorted_cores(&qs, &ls, &pool)
}

/// Core bounds on a random set.
pub fn core_bounds_call(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let t = rng.gen_range(1..=4);
    let n = rng.gen_range(1..=10);
    let pool = random_pool(rng, n, t);
    let ids: Vec<usize> = (0..n).collect();
    let c = core(&ids, &pool);
    if check_core_bounds(&ids, &c, &pool) {
        Ok(())
    } else {
        Err(format!("core bounds fail for sizes {:?}", pool.jobs.iter().map(|j| j.size.clone()).collect::<Vec<_>>()))
    }
}

/// Configurations of the graph of a random small instance (hidden ones excluded).
fn graph_configs(rng: &mut ChaCha8Rng) -> (Arc<JobPool>, Vec<Config>) {
    let t = rng.gen_range(1..=2);
    let n = rng.gen_range(1..=3);
    let pool = Arc::new(random_pool(rng, n, t));
    let m = rng.gen_range(3..=4);
    let g = Graph::new(pool.clone(), m);
    let mut out: Vec<Config> = g.layers.iter().flatten().map(|v| v.alpha.clone()).collect();
    for d in &g.doubles {
        out.push(d.first.clone());
        out.push(d.second.clone());
    }
    (pool, out)
}

/// A batch of calls, each on one random configuration of one random graph.
fn config_batch(seed: u64, batch: u64, calls: usize, f: impl Fn(&Config, &JobPool) -> Result<(), String>) -> Vec<Result<(), String>> {
    let mut rng = rng_for(seed, batch);
    let (pool, configs) = loop {
        let (pool, configs) = graph_configs(&mut rng);
        if !configs.is_empty() {
            break (pool, configs);
        }
    };
    (0..calls)
        .map(|_| {
            let c = &configs[rng.gen_range(0..configs.len())];
            f(c, &pool)
        })
        .collect()
}

/// Every valid configuration's sets form a delta-division.
pub fn delta_division_check(alpha: &Config, pool: &JobPool) -> Result<(), String> {
    let sets = extract_sets(alpha, pool);
    let report = check_delta_division(&sets.large, &sets.small, pool);
    if report.is_division() {
        Ok(())
    } else {
        Err(format!("not a delta-division: {:?}", report.violations))
    }
}

/// `(3/2) rho w < delta |L_alpha|` for non-empty configurations.
pub fn block_size_check(alpha: &Config, pool: &JobPool) -> Result<(), String> {
    let w = weights(alpha, pool);
    if alpha.is_empty() {
        return Ok(());
    }
    let lhs = rat(3, 2) * alpha.block_size(&pool.params);
    let rhs = pool.params.delta.scale(&w.large);
    if cmp_alg_rational(&rhs, &lhs) == Ordering::Greater {
        Ok(())
    } else {
        Err(format!("(3/2) rho w = {lhs} is not below delta |L| with |L| = {}", w.large))
    }
}

pub fn delta_division_batch(seed: u64, batch: u64, calls: usize) -> Vec<Result<(), String>> {
    config_batch(seed, batch, calls, delta_division_check)
}

pub fn block_size_batch(seed: u64, batch: u64, calls: usize) -> Vec<Result<(), String>> {
    config_batch(seed, batch, calls, block_size_check)
}

pub fn core_sorting_batch(seed: u64, batch: u64, calls: usize) -> Vec<Result<(), String>> {
    let mut rng = rng_for(seed, batch);
    (0..calls).map(|_| core_sorting_call(&mut rng)).collect()
}

pub fn core_bounds_batch(seed: u64, batch: u64, calls: usize) -> Vec<Result<(), String>> {
    let mut rng = rng_for(seed, batch);
    (0..calls).map(|_| core_bounds_call(&mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_batches_pass() {
        for r in core_sorting_batch(1, 0, 50).into_iter().chain(core_bounds_batch(1, 0, 50)) {
            r.unwrap();
        }
        for r in delta_division_batch(1, 0, 50).into_iter().chain(block_size_batch(1, 0, 50)) {
            r.unwrap();
        }
    }
}
