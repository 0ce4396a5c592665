//! Exhaustive optima.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::Zero;

use crate::error::Error;
use crate::instance::JobPool;
use crate::numerics::{cmp_alg, AlgebraicValue, Rational};

/// Largest number of assignments the brute force will consider.
pub const GUARDRAIL: u128 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub opt_makespan: Rational,
    /// Machine of each job.
    pub witness: Vec<usize>,
    /// Search nodes visited.
    pub explored: u64,
}

fn check_guardrail(n: usize, m: usize) -> Result<(), Error> {
    let mut total: u128 = 1;
    for _ in 0..n {
        total = total.saturating_mul(m as u128);
        if total > GUARDRAIL {
            return Err(Error::GuardrailExceeded(total));
        }
    }
    Ok(())
}

/// Per-job machine choices into per-machine job lists.
pub fn parts_of(witness: &[usize], m: usize) -> Vec<Vec<usize>> {
    let mut parts = vec![Vec::new(); m];
    for (job, &i) in witness.iter().enumerate() {
        parts[i].push(job);
    }
    parts
}

/// Jobs descending by size, ties by id: the search order of both oracles.
fn search_order(sizes: &[Rational]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
    order
}

struct Exact<'a> {
    sizes: &'a [Rational],
    speeds: &'a [Rational],
    order: Vec<usize>,
    loads: Vec<Rational>,
    current: Vec<usize>,
    best: Option<(Rational, Vec<usize>)>,
    explored: u64,
}

impl Exact<'_> {
    fn go(&mut self, depth: usize, span: &Rational) {
        self.explored += 1;
        if let Some((b, _)) = &self.best {
            if span >= b {
                return;
            }
        }
        if depth == self.order.len() {
            self.best = Some((span.clone(), self.current.clone()));
            return;
        }
        let job = self.order[depth];
        for i in 0..self.speeds.len() {
            if self.speeds[i].is_zero() {
                continue;
            }
            // machines with equal speed and load are interchangeable
            if (0..i).any(|h| self.speeds[h] == self.speeds[i] && self.loads[h] == self.loads[i]) {
                continue;
            }
            self.loads[i] += &self.sizes[job];
            let f = &self.loads[i] / &self.speeds[i];
            let next = if &f > span { f } else { span.clone() };
            self.current[job] = i;
            self.go(depth + 1, &next);
            self.loads[i] -= &self.sizes[job];
        }
    }
}

/// Minimum makespan over all assignments of `sizes` to machines with `speeds`.
pub fn brute_force_opt(sizes: &[Rational], speeds: &[Rational]) -> Result<OracleResult, Error> {
    check_guardrail(sizes.len(), speeds.len())?;
    if sizes.is_empty() {
        return Ok(OracleResult {
            opt_makespan: Rational::zero(),
            witness: Vec::new(),
            explored: 1,
        });
    }
    if speeds.iter().all(|s| s.is_zero()) {
        return Err(Error::Precondition("every machine has speed 0".into()));
    }
    let mut s = Exact {
        sizes,
        speeds,
        order: search_order(sizes),
        loads: vec![Rational::zero(); speeds.len()],
        current: vec![0; sizes.len()],
        best: None,
        explored: 0,
    };
    s.go(0, &Rational::zero());
    let (opt_makespan, witness) = s.best.expect("some machine has positive speed");
    Ok(OracleResult {
        opt_makespan,
        witness,
        explored: s.explored,
    })
}

/// Optimum of the rounded jobs (each job of class `l` weighs `(1+delta)^l`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundedOptimum {
    pub makespan: AlgebraicValue,
    pub parts: Vec<Vec<usize>>,
}

struct Rounded<'a> {
    sizes: Vec<AlgebraicValue>,
    inv_speeds: Vec<Option<Rational>>,
    order: Vec<usize>,
    loads: Vec<AlgebraicValue>,
    current: Vec<usize>,
    best: Option<(AlgebraicValue, Vec<usize>)>,
    speeds: &'a [Rational],
}

impl Rounded<'_> {
    fn go(&mut self, depth: usize, span: &AlgebraicValue) {
        if let Some((b, _)) = &self.best {
            if cmp_alg(span, b) != Ordering::Less {
                return;
            }
        }
        if depth == self.order.len() {
            self.best = Some((span.clone(), self.current.clone()));
            return;
        }
        let job = self.order[depth];
        for i in 0..self.speeds.len() {
            let Some(inv) = self.inv_speeds[i].clone() else { continue };
            if (0..i).any(|h| self.speeds[h] == self.speeds[i] && self.loads[h] == self.loads[i]) {
                continue;
            }
            let before = self.loads[i].clone();
            self.loads[i] = before.checked_add(&self.sizes[job]).expect("same degree");
            let f = self.loads[i].scale(&inv);
            let next = if cmp_alg(&f, span) == Ordering::Greater { f } else { span.clone() };
            self.current[job] = i;
            self.go(depth + 1, &next);
            self.loads[i] = before;
        }
    }
}

/// Minimum makespan of the rounded jobs of `pool` on `speeds`.
pub fn brute_force_rounded(pool: &JobPool, speeds: &[Rational]) -> Result<RoundedOptimum, Error> {
    let n = pool.n();
    let m = speeds.len();
    check_guardrail(n, m)?;
    let t = pool.params.t;
    if n == 0 {
        return Ok(RoundedOptimum {
            makespan: AlgebraicValue::zero(t),
            parts: vec![Vec::new(); m],
        });
    }
    if speeds.iter().all(|s| s.is_zero()) {
        return Err(Error::Precondition("every machine has speed 0".into()));
    }
    let sizes: Vec<Rational> = pool.jobs.iter().map(|j| j.size.clone()).collect();
    let mut s = Rounded {
        sizes: pool.jobs.iter().map(|j| pool.params.power(j.class)).collect(),
        inv_speeds: speeds
            .iter()
            .map(|s| (!s.is_zero()).then(|| Rational::from_integer(1.into()) / s))
            .collect(),
        order: search_order(&sizes),
        loads: vec![AlgebraicValue::zero(t); m],
        current: vec![0; n],
        best: None,
        speeds,
    };
    s.go(0, &AlgebraicValue::zero(t));
    let (makespan, witness) = s.best.expect("some machine has positive speed");
    Ok(RoundedOptimum {
        makespan,
        parts: parts_of(&witness, m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::int;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn three_fours_on_three_unit_machines() {
        let r = brute_force_opt(&ints(&[4, 4, 4]), &ints(&[1, 1, 1])).unwrap();
        assert_eq!(r.opt_makespan, int(4));
    }

    #[test]
    fn two_twos_on_speeds_one_two() {
        let r = brute_force_opt(&ints(&[2, 2]), &ints(&[1, 2])).unwrap();
        assert_eq!(r.opt_makespan, int(2));
    }

    #[test]
    fn no_jobs() {
        assert_eq!(brute_force_opt(&[], &ints(&[1])).unwrap().opt_makespan, int(0));
    }

    #[test]
    fn zero_speed_takes_nothing() {
        let r = brute_force_opt(&ints(&[3]), &ints(&[0, 1, 1])).unwrap();
        assert_eq!(r.opt_makespan, int(3));
        assert_ne!(r.witness[0], 0);
    }

    #[test]
    fn guardrail() {
        let sizes = ints(&[1; 30]);
        assert!(matches!(
            brute_force_opt(&sizes, &ints(&[1, 1, 1])),
            Err(Error::GuardrailExceeded(_))
        ));
    }

    #[test]
    fn matches_plain_enumeration() {
        let sizes = ints(&[5, 3, 3, 2]);
        let speeds = ints(&[1, 2, 4]);
        let mut best: Option<Rational> = None;
        for code in 0..81usize {
            let mut loads = vec![int(0); 3];
            let mut c = code;
            for p in &sizes {
                loads[c % 3] += p;
                c /= 3;
            }
            let span = (0..3).map(|i| &loads[i] / &speeds[i]).max().unwrap();
            if best.as_ref().map_or(true, |b| span < *b) {
                best = Some(span);
            }
        }
        assert_eq!(brute_force_opt(&sizes, &speeds).unwrap().opt_makespan, best.unwrap());
    }
}
