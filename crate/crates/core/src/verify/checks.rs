//! Property checks on scheme outputs.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::Zero;

use crate::canonical::{check_canonical_with, Part};
use crate::config::{extract_sets, weights};
use crate::error::Error;
use crate::graph::{Finish, Graph};
use crate::instance::{speed_exponent, speed_power, Instance, JobPool, Params};
use crate::numerics::{cmp_alg_rational, format_rational, int, AlgebraicValue, Rational};
use crate::solver::{ptas_with_graph, Schedule};

use super::oracle::brute_force_opt;

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

/// `1 - 6 delta`.
fn one_minus_six_delta(p: &Params) -> AlgebraicValue {
    p.power(1).scale(&int(-6)).add_rational(&int(7))
}

/// Canonicality of the partition with `L_i := L_{alpha_i}`; `(D2)` is not required on the last machine.
pub fn canonical_violations(sched: &Schedule, pool: &JobPool) -> Vec<String> {
    let path = &sched.path;
    if path.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut parts = Vec::with_capacity(path.configs.len());
    for (i, (alpha, q)) in path.configs.iter().zip(&sched.partition.sets).enumerate() {
        let large = extract_sets(alpha, pool).large;
        let q_sorted = sorted(q);
        if large.iter().any(|id| q_sorted.binary_search(id).is_err()) {
            out.push(format!("machine {i}: L_alpha is not inside Q_i"));
        }
        let small = q.iter().copied().filter(|id| !large.contains(id)).collect();
        parts.push(Part { large, small });
    }
    out.extend(check_canonical_with(&parts, pool, true).violations);
    out
}

/// Workload bounds against the configurations and the path makespan, and the sort step.
pub fn bound_violations(sched: &Schedule, inst: &Instance) -> Vec<String> {
    let pool = &*inst.pool;
    let p = &pool.params;
    let path = &sched.path;
    let s = &inst.speeds;
    let mut out = Vec::new();
    if path.is_empty() {
        if sched.sorted_sets.iter().any(|q| !q.is_empty()) {
            out.push("empty path with nonempty sets".into());
        }
        return out;
    }
    let Finish::Finite(big_m) = &path.makespan else {
        out.push("path makespan is infinite".into());
        return out;
    };
    let m = inst.m();
    let k = path.k;
    for (i, alpha) in path.configs.iter().enumerate() {
        let q = pool.weight_of(&sched.partition.sets[i]);
        let w = weights(alpha, pool);
        let lower = w.total() - int(6) * alpha.block_size(p);
        if lower > q {
            out.push(format!(
                "workload lower bound fails on machine {i}: |Q| = {}, |alpha| - 6 rho w = {}",
                format_rational(&q),
                format_rational(&lower)
            ));
        }
        if q > big_m * &s[i] {
            out.push(format!("workload upper bound fails on machine {i}: |Q| = {}", format_rational(&q)));
        }
        // machines before the switch take exactly their configured sets
        if i + 1 < k {
            let sets = extract_sets(alpha, pool);
            let mut tilde = sets.large.clone();
            tilde.extend_from_slice(&sets.small);
            let tilde = sorted(&tilde);
            if sets.blocks != 0 || sorted(&sched.partition.sets[i]) != tilde || sorted(&sched.sorted_sets[i]) != tilde {
                out.push(format!("sorted workload bound before the switch fails on machine {i}"));
            }
        }
    }
    if k + 3 <= m {
        let factor = one_minus_six_delta(p);
        for i in k..m {
            let work = pool.weight_of(&sched.sorted_sets[i]);
            let bound = factor.scale(&(big_m * &s[i]));
            if cmp_alg_rational(&bound, &work) == Ordering::Greater {
                out.push(format!("sorted workload bound after the switch fails on machine {i}: |P| = {}", format_rational(&work)));
            }
        }
    }
    for (i, &j) in sched.order.iter().enumerate() {
        if j != i && (s[i] != s[j] || i + 1 < k || j + 1 < k) {
            out.push(format!("sorting moved set {j} to machine {i} across speed classes or below the switch"));
        }
        let work = pool.weight_of(&sched.sorted_sets[i]);
        if work > big_m * &s[i] {
            out.push(format!("|P_{i}| / s_{i} exceeds M(Q)"));
        }
    }
    out
}

/// Makespan of per-input-machine workloads on raw speeds.
pub fn actual_makespan(workloads: &[Rational], speeds: &[Rational]) -> Option<Rational> {
    let mut best = Rational::zero();
    for (w, s) in workloads.iter().zip(speeds) {
        if w.is_zero() {
            continue;
        }
        if s.is_zero() {
            return None;
        }
        let f = w / s;
        if f > best {
            best = f;
        }
    }
    Some(best)
}

/// Ratio of the scheme's makespan to the optimum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Approx {
    pub makespan: Rational,
    pub opt: Rational,
    /// `None` when both are zero.
    pub ratio: Option<Rational>,
    pub within: bool,
}

pub fn check_approx(sched: &Schedule, sizes: &[Rational], speeds: &[Rational], epsilon: &Rational) -> Result<Approx, Error> {
    let opt = brute_force_opt(sizes, speeds)?.opt_makespan;
    let makespan = actual_makespan(&sched.workloads, speeds)
        .ok_or_else(|| Error::Precondition("a speed-0 machine received jobs".into()))?;
    let ratio = if opt.is_zero() {
        (!makespan.is_zero()).then(|| Rational::from_integer(i64::MAX.into()))
    } else {
        Some(&makespan / &opt)
    };
    let bound = int(1) + int(3) * epsilon;
    let within = ratio.as_ref().map_or(true, |r| *r <= bound);
    Ok(Approx {
        makespan,
        opt,
        ratio,
        within,
    })
}

/// Outcome of one lowered machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonicityCheck {
    pub machine: usize,
    pub before_speed: Rational,
    pub after_speed: Rational,
    pub before: Rational,
    pub after: Rational,
}

impl MonotonicityCheck {
    pub fn holds(&self) -> bool {
        self.after <= self.before
    }
}

/// The speed one rounding step below `sigma`, or `None` for speed 0.
pub fn one_step_down(sigma: &Rational, epsilon: &Rational) -> Option<Rational> {
    let j = speed_exponent(sigma, epsilon)?;
    Some(speed_power(epsilon, j - 1))
}

/// Lowers machine `i` by one rounding step; it becomes the last machine of its new speed class.
pub fn check_monotonicity(pool: &Arc<JobPool>, speeds: &[Rational], i: usize, g: &Graph) -> Result<Option<MonotonicityCheck>, Error> {
    let eps = &pool.params.epsilon;
    let Some(lower) = one_step_down(&speeds[i], eps) else {
        return Ok(None);
    };
    let before = ptas_with_graph(&Instance::with_pool(pool.clone(), speeds)?, g)?;
    let mut s = speeds.to_vec();
    s[i] = lower.clone();
    let after = ptas_with_graph(&Instance::with_pool_last(pool.clone(), &s, i)?, g)?;
    Ok(Some(MonotonicityCheck {
        machine: i,
        before_speed: speeds[i].clone(),
        after_speed: lower,
        before: before.workloads[i].clone(),
        after: after.workloads[i].clone(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::ptas;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn step_down() {
        assert_eq!(one_step_down(&int(4), &int(1)), Some(int(2)));
        assert_eq!(one_step_down(&int(3), &int(1)), Some(int(2)));
        assert_eq!(one_step_down(&int(0), &int(1)), None);
    }

    #[test]
    fn two_twos_pass_all_checks() {
        let inst = Instance::new(&ints(&[2, 2]), &ints(&[1, 2, 4]), int(1), 1).unwrap();
        let sched = ptas(&inst).unwrap();
        assert!(canonical_violations(&sched, &inst.pool).is_empty());
        assert!(bound_violations(&sched, &inst).is_empty(), "{:?}", bound_violations(&sched, &inst));
        let a = check_approx(&sched, &inst.sizes(), &inst.input_speeds(), &int(1)).unwrap();
        assert!(a.within);
    }

    #[test]
    fn padded_machine_is_unaffected() {
        let inst = Instance::new(&ints(&[2, 2]), &ints(&[1, 2]), int(1), 1).unwrap();
        let g = Graph::new(inst.pool.clone(), inst.m());
        let r = check_monotonicity(&inst.pool, &ints(&[1, 2]), 1, &g).unwrap().unwrap();
        assert!(r.holds());
    }
}
