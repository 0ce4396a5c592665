//! One function per suite trial. Each trial is a pure function of its inputs,
//! so callers may run trials in any order and merge by index.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;

use crate::canonical::{canonicalize, check_canonical, makespan_of};
use crate::error::Error;
use crate::graph::{Finish, Graph};
use crate::instance::{Instance, JobPool, Params};
use crate::mechanism::{payment_on_curve, work_at, work_curve, DEFAULT_MAX_STEPS};
use crate::numerics::{cmp_alg_rational, format_rational, int, Rational};
use crate::solver::{optpath, ptas_with_graph, Schedule};

use super::checks::{bound_violations, canonical_violations, check_approx, check_monotonicity};
use super::encode::encode_path;
use super::generate::{rng_for, sample, trial_seed, Sample, Shape};
use super::oracle::{brute_force_opt, brute_force_rounded};

/// What a failure is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    /// The scheme returned an error (usually: no `m`-path).
    Solve,
    Monotonicity,
    Approximation,
    Canonical,
    Bounds,
    Truthfulness,
    /// Canonical construction from an optimum.
    Construction,
    /// Path encoding of the constructed allocation.
    Encoding,
    /// Path optimum against the encoded path or against `(1+eps) OPT`.
    PathOptimum,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Solve => "solve",
            Check::Monotonicity => "monotonicity",
            Check::Approximation => "approximation",
            Check::Canonical => "canonical",
            Check::Bounds => "bounds",
            Check::Truthfulness => "truthfulness",
            Check::Construction => "construction",
            Check::Encoding => "encoding",
            Check::PathOptimum => "path-optimum",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub check: Check,
    pub detail: String,
}

/// Result of one trial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialRecord {
    pub index: u64,
    /// Seed that reproduces the instance (`None` for enumerated suites).
    pub seed: Option<u64>,
    pub sample: Sample,
    pub failures: Vec<Failure>,
    /// Measured quantity of the trial (ratio, workloads), for the report.
    pub metric: Option<Rational>,
}

impl TrialRecord {
    fn new(index: u64, seed: Option<u64>, sample: Sample) -> Self {
        TrialRecord {
            index,
            seed,
            sample,
            failures: Vec::new(),
            metric: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn fails(&self, check: Check) -> bool {
        self.failures.iter().any(|f| f.check == check)
    }

    fn fail(&mut self, check: Check, detail: impl Into<String>) {
        self.failures.push(Failure {
            check,
            detail: detail.into(),
        });
    }
}

fn pool_of(s: &Sample) -> Result<Arc<JobPool>, Error> {
    let params = Params::new(s.epsilon.clone(), s.t)?;
    Ok(Arc::new(JobPool::new(&s.sizes, params)?))
}

/// Runs the scheme and the output checks; returns the input-order workloads.
fn solve_and_check(rec: &mut TrialRecord, inst: &Instance, g: &Graph) -> Option<Vec<Rational>> {
    match ptas_with_graph(inst, g) {
        Ok(sched) => {
            for v in canonical_violations(&sched, &inst.pool) {
                rec.fail(Check::Canonical, v);
            }
            for v in bound_violations(&sched, inst) {
                rec.fail(Check::Bounds, v);
            }
            Some(sched.workloads)
        }
        Err(e) => {
            rec.fail(Check::Solve, e.to_string());
            None
        }
    }
}

/// Lowers one random machine by one rounding step.
pub fn monotonicity_trial(seed: u64, index: u64, shape: &Shape) -> TrialRecord {
    let mut rng = rng_for(seed, index);
    let s = sample(&mut rng, shape);
    let i = rng.gen_range(0..s.speeds.len());
    let mut rec = TrialRecord::new(index, Some(trial_seed(seed, index)), s.clone());
    let pool = match pool_of(&s) {
        Ok(p) => p,
        Err(e) => {
            rec.fail(Check::Solve, e.to_string());
            return rec;
        }
    };
    let g = Graph::new(pool.clone(), s.speeds.len().max(3));
    let Ok(inst) = Instance::with_pool(pool.clone(), &s.speeds) else {
        rec.fail(Check::Solve, "bad instance");
        return rec;
    };
    if solve_and_check(&mut rec, &inst, &g).is_none() {
        return rec;
    }
    match check_monotonicity(&pool, &s.speeds, i, &g) {
        Ok(Some(c)) => {
            rec.metric = Some(c.after.clone());
            if !c.holds() {
                rec.fail(
                    Check::Monotonicity,
                    format!(
                        "machine {i}: speed {} -> {}, work {} -> {}",
                        format_rational(&c.before_speed),
                        format_rational(&c.after_speed),
                        format_rational(&c.before),
                        format_rational(&c.after)
                    ),
                );
            }
        }
        Ok(None) => {}
        Err(e) => rec.fail(Check::Solve, format!("after lowering machine {i}: {e}")),
    }
    rec
}

/// Canonicality, bounds and approximation ratio on a random instance.
/// `tamper` may alter the schedule before it is checked.
pub fn verify_trial(seed: u64, index: u64, shape: &Shape, tamper: Option<fn(&mut Schedule)>) -> TrialRecord {
    let mut rng = rng_for(seed, index);
    let s = sample(&mut rng, shape);
    let mut rec = TrialRecord::new(index, Some(trial_seed(seed, index)), s.clone());
    let inst = match pool_of(&s).and_then(|p| Instance::with_pool(p, &s.speeds)) {
        Ok(i) => i,
        Err(e) => {
            rec.fail(Check::Solve, e.to_string());
            return rec;
        }
    };
    let g = Graph::new(inst.pool.clone(), inst.m());
    let mut sched = match ptas_with_graph(&inst, &g) {
        Ok(x) => x,
        Err(e) => {
            rec.fail(Check::Solve, e.to_string());
            return rec;
        }
    };
    if let Some(f) = tamper {
        f(&mut sched);
    }
    for v in canonical_violations(&sched, &inst.pool) {
        rec.fail(Check::Canonical, v);
    }
    for v in bound_violations(&sched, &inst) {
        rec.fail(Check::Bounds, v);
    }
    match check_approx(&sched, &s.sizes, &s.speeds, &s.epsilon) {
        Ok(a) => {
            rec.metric = a.ratio.clone();
            if !a.within {
                rec.fail(Check::Approximation, format!("makespan {} vs OPT {}", format_rational(&a.makespan), format_rational(&a.opt)));
            }
        }
        Err(e) => rec.fail(Check::Approximation, e.to_string()),
    }
    rec
}

/// Multisets of size `n` drawn from `items`, in lexicographic order of indices.
fn multisets<T: Clone>(items: &[T], n: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        out.push(idx.iter().map(|&i| items[i].clone()).collect());
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] + 1 < items.len() {
                let v = idx[pos] + 1;
                for x in &mut idx[pos..] {
                    *x = v;
                }
                break;
            }
        }
    }
}

/// Job multisets of the exhaustive approximation suite, paired with machine counts.
pub fn approx_groups() -> Vec<(Vec<Rational>, usize)> {
    let sizes: Vec<Rational> = [1, 2, 3, 4, 5, 8].iter().map(|&x| int(x)).collect();
    let mut out = Vec::new();
    for n in 0..=4 {
        for jobs in multisets(&sizes, n) {
            for m in [3usize, 4] {
                out.push((jobs.clone(), m));
            }
        }
    }
    out
}

/// Every speed vector of one group (multisets over `{1,2,4}`), sharing one graph.
pub fn approx_group(jobs: &[Rational], m: usize, first_index: u64) -> Vec<TrialRecord> {
    let speeds_all = multisets(&[int(1), int(2), int(4)], m);
    let mut out = Vec::with_capacity(speeds_all.len());
    let params = Params::new(int(1), 1).expect("valid parameters");
    let pool = Arc::new(JobPool::new(jobs, params).expect("positive sizes"));
    let g = Graph::new(pool.clone(), m);
    for (j, speeds) in speeds_all.into_iter().enumerate() {
        let s = Sample {
            sizes: jobs.to_vec(),
            speeds: speeds.clone(),
            epsilon: int(1),
            t: 1,
        };
        let mut rec = TrialRecord::new(first_index + j as u64, None, s);
        let inst = Instance::with_pool(pool.clone(), &speeds).expect("valid speeds");
        match ptas_with_graph(&inst, &g) {
            Ok(sched) => {
                for v in canonical_violations(&sched, &pool) {
                    rec.fail(Check::Canonical, v);
                }
                for v in bound_violations(&sched, &inst) {
                    rec.fail(Check::Bounds, v);
                }
                match check_approx(&sched, jobs, &speeds, &int(1)) {
                    Ok(a) => {
                        rec.metric = a.ratio.clone();
                        if !a.within {
                            rec.fail(
                                Check::Approximation,
                                format!("makespan {} vs OPT {}", format_rational(&a.makespan), format_rational(&a.opt)),
                            );
                        }
                    }
                    Err(e) => rec.fail(Check::Approximation, e.to_string()),
                }
            }
            Err(e) => rec.fail(Check::Solve, e.to_string()),
        }
        out.push(rec);
    }
    out
}

/// Utility at the true speed against bids `(1+eps)^d` times the truth, `|d| <= 4`.
pub fn truthfulness_trial(seed: u64, index: u64, shape: &Shape) -> TrialRecord {
    let mut rng = rng_for(seed, index);
    let s = sample(&mut rng, shape);
    let mut rec = TrialRecord::new(index, Some(trial_seed(seed, index)), s.clone());
    let pool = match pool_of(&s) {
        Ok(p) => p,
        Err(e) => {
            rec.fail(Check::Solve, e.to_string());
            return rec;
        }
    };
    let g = Graph::new(pool.clone(), s.speeds.len().max(3));
    let base = int(1) + &s.epsilon;
    for i in 0..s.speeds.len() {
        let truth = s.speeds[i].clone();
        let top = &truth * base.pow(4);
        let curve = match work_curve(&pool, &s.speeds, i, &top, &g, DEFAULT_MAX_STEPS) {
            Ok(c) => c,
            Err(e) => {
                rec.fail(Check::Solve, format!("machine {i}: {e}"));
                continue;
            }
        };
        let utility = |bid: &Rational| -> Result<Rational, Error> {
            let w = work_at(&pool, &s.speeds, i, bid, &g)?;
            Ok(payment_on_curve(&curve, bid, &w) - w / &truth)
        };
        let u_true = match utility(&truth) {
            Ok(u) => u,
            Err(e) => {
                rec.fail(Check::Solve, format!("machine {i}: {e}"));
                continue;
            }
        };
        for d in -4i32..=4 {
            let bid = &truth * base.pow(d);
            match utility(&bid) {
                Ok(u) if u > u_true => rec.fail(
                    Check::Truthfulness,
                    format!(
                        "machine {i}: bid {} gains {} over the truth",
                        format_rational(&bid),
                        format_rational(&(u - &u_true))
                    ),
                ),
                Ok(_) => {}
                Err(e) => rec.fail(Check::Solve, format!("machine {i}, bid {}: {e}", format_rational(&bid))),
            }
        }
    }
    rec
}

/// Instance shape of the canonical-construction suite: `n <= 5`.
pub fn construction_shape() -> Shape {
    Shape {
        n_max: 5,
        ..Shape::small()
    }
}

/// Canonical construction from a rounded optimum, its path encoding, and the path optimum.
pub fn construction_trial(seed: u64, index: u64) -> TrialRecord {
    let mut rng = rng_for(seed, index);
    let s = sample(&mut rng, &construction_shape());
    let mut rec = TrialRecord::new(index, Some(trial_seed(seed, index)), s.clone());
    let (pool, inst) = match pool_of(&s).and_then(|p| Ok((p.clone(), Instance::with_pool(p, &s.speeds)?))) {
        Ok(x) => x,
        Err(e) => {
            rec.fail(Check::Solve, e.to_string());
            return rec;
        }
    };
    let p = &pool.params;
    let speeds = &inst.speeds;
    let opt = match brute_force_opt(&s.sizes, speeds) {
        Ok(o) => o.opt_makespan,
        Err(e) => {
            rec.fail(Check::Construction, e.to_string());
            return rec;
        }
    };
    let canon = match brute_force_rounded(&pool, speeds).and_then(|r| canonicalize(&r.parts, speeds, &pool)) {
        Ok(c) => c,
        Err(e) => {
            rec.fail(Check::Construction, e.to_string());
            return rec;
        }
    };
    for v in check_canonical(&canon.parts, &pool).violations {
        rec.fail(Check::Construction, v);
    }
    let sets: Vec<Vec<usize>> = canon.parts.iter().map(|q| q.jobs()).collect();
    match makespan_of(&sets, speeds, &pool) {
        Some(span) => {
            // (1 + 3 delta) OPT = (3 (1+delta) - 2) OPT
            let bound = p.power(1).scale(&int(3)).add_rational(&int(-2)).scale(&opt);
            if cmp_alg_rational(&bound, &span) == Ordering::Less {
                rec.fail(
                    Check::Construction,
                    format!("makespan {} above (1+3 delta) OPT, OPT = {}", format_rational(&span), format_rational(&opt)),
                );
            }
        }
        None => rec.fail(Check::Construction, "a speed-0 machine received jobs"),
    }
    let g = Graph::new(pool.clone(), inst.m());
    let best = match optpath(&g, speeds) {
        Ok(path) => path.makespan,
        Err(e) => {
            rec.fail(Check::Solve, e.to_string());
            Finish::Infinite
        }
    };
    match encode_path(&canon.parts, speeds, &pool) {
        Ok(e) => {
            if let Finish::Finite(v) = &e.path.makespan {
                rec.metric = Some(v.clone());
            }
            if best > e.path.makespan {
                rec.fail(Check::PathOptimum, "optimal path is worse than the encoded path");
            }
        }
        Err(e) => rec.fail(Check::Encoding, e.to_string()),
    }
    rec
}

/// Shape of the fine-rounding suite: `t = 22`, job sizes within a factor 64.
pub fn fine_shape() -> Shape {
    Shape {
        n_min: 1,
        n_max: 3,
        machines: vec![3, 4],
        degrees: vec![22],
        epsilon: int(1),
        scale: (0, 2),
    }
}

/// `M(optpath) <= (1+eps) OPT` where `30 delta < eps`.
pub fn fine_trial(seed: u64, index: u64) -> TrialRecord {
    let mut rng = rng_for(seed, index);
    let s = sample(&mut rng, &fine_shape());
    let mut rec = TrialRecord::new(index, Some(trial_seed(seed, index)), s.clone());
    let (pool, inst) = match pool_of(&s).and_then(|p| Ok((p.clone(), Instance::with_pool(p, &s.speeds)?))) {
        Ok(x) => x,
        Err(e) => {
            rec.fail(Check::Solve, e.to_string());
            return rec;
        }
    };
    let opt = match brute_force_opt(&s.sizes, &inst.speeds) {
        Ok(o) => o.opt_makespan,
        Err(e) => {
            rec.fail(Check::PathOptimum, e.to_string());
            return rec;
        }
    };
    let g = Graph::new(pool.clone(), inst.m());
    match optpath(&g, &inst.speeds) {
        Ok(path) => {
            let bound = (int(1) + &s.epsilon) * &opt;
            match path.makespan {
                Finish::Finite(v) => {
                    rec.metric = Some(&v / &opt);
                    if v > bound {
                        rec.fail(Check::PathOptimum, format!("M = {} above (1+eps) OPT", format_rational(&v)));
                    }
                }
                Finish::Infinite => rec.fail(Check::PathOptimum, "infinite path makespan"),
            }
        }
        Err(e) => rec.fail(Check::Solve, e.to_string()),
    }
    rec
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiset_counts() {
        assert_eq!(multisets(&[1, 2, 3], 0).len(), 1);
        assert_eq!(multisets(&[1, 2, 3], 2).len(), 6);
        assert_eq!(multisets(&[1, 2, 3, 4, 5, 6], 4).len(), 126);
        assert_eq!(approx_groups().len(), 2 * (1 + 6 + 21 + 56 + 126));
    }
}
