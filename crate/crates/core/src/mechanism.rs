//! Work curves and payments for the monotone allocation rule.
//!
//! With cost `u = 1/speed` and a non-increasing work curve `W(u)`, a bid `u0`
//! is paid `u0 * W(u0) + integral_{u0}^{inf} W(u) du`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::Error;
use crate::graph::Graph;
use crate::instance::{speed_power, Instance, JobPool};
use crate::numerics::{format_rational, int, Rational};
use crate::solver::ptas_with_graph;

pub const DEFAULT_MAX_STEPS: usize = 256;

/// Work on the open bid-speed interval `(lo, hi)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub lo: Rational,
    pub hi: Rational,
    pub work: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorkCurve {
    pub machine: usize,
    pub bid: Rational,
    pub work_at_bid: Rational,
    /// Descending in speed, consecutive equal works merged.
    pub steps: Vec<Step>,
    /// Speed below which the machine gets no work.
    pub zero_point: Rational,
    pub evaluations: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaymentResult {
    pub payment: Rational,
    pub work_at_bid: Rational,
    pub truncation_steps: usize,
}

/// Graph shared by every bid on this pool.
pub fn graph_for(pool: &Arc<JobPool>, machines: usize) -> Graph {
    Graph::new(pool.clone(), machines.max(3))
}

/// Workload of input machine `i` when it bids `bid` and the others bid `speeds`.
pub fn work_at(pool: &Arc<JobPool>, speeds: &[Rational], i: usize, bid: &Rational, g: &Graph) -> Result<Rational, Error> {
    let mut s = speeds.to_vec();
    s[i] = bid.clone();
    let inst = Instance::with_pool(pool.clone(), &s)?;
    let sched = ptas_with_graph(&inst, g)?;
    Ok(sched.workloads[i].clone())
}

/// Largest breakpoint strictly below `x`: a power of `1+eps` or another machine's speed.
fn next_breakpoint(x: &Rational, speeds: &[Rational], i: usize, eps: &Rational) -> Rational {
    let j = crate::instance::speed_exponent(x, eps).expect("positive speed");
    // (1+eps)^(j-1) < x <= (1+eps)^j
    let mut best = speed_power(eps, j - 1);
    for (h, s) in speeds.iter().enumerate() {
        if h != i && s < x && *s > best {
            best = s.clone();
        }
    }
    best
}

/// Work curve of machine `i` from its bid down to the point where its work vanishes.
pub fn work_curve(
    pool: &Arc<JobPool>,
    speeds: &[Rational],
    i: usize,
    bid: &Rational,
    g: &Graph,
    max_steps: usize,
) -> Result<WorkCurve, Error> {
    let eps = &pool.params.epsilon;
    let work_at_bid = work_at(pool, speeds, i, bid, g)?;
    let mut evaluations = 1;
    let mut steps: Vec<Step> = Vec::new();
    let mut hi = bid.clone();
    let mut prev = work_at_bid.clone();
    let mut count = 0;
    while !prev.is_zero() {
        if count == max_steps {
            return Err(Error::CurveNotTruncated(max_steps));
        }
        count += 1;
        let lo = next_breakpoint(&hi, speeds, i, eps);
        let mid = (&lo + &hi) / int(2);
        let w = work_at(pool, speeds, i, &mid, g)?;
        evaluations += 1;
        if w > prev {
            return Err(Error::NonMonotoneCurve(format_rational(&(Rational::one() / &mid))));
        }
        match steps.last_mut() {
            Some(last) if last.work == w => last.lo = lo.clone(),
            _ => steps.push(Step {
                lo: lo.clone(),
                hi: hi.clone(),
                work: w.clone(),
            }),
        }
        prev = w;
        hi = lo;
    }
    let zero_point = steps
        .iter()
        .rev()
        .find(|s| !s.work.is_zero())
        .map_or_else(|| bid.clone(), |s| s.lo.clone());
    steps.retain(|s| !s.work.is_zero());
    Ok(WorkCurve {
        machine: i,
        bid: bid.clone(),
        work_at_bid,
        steps,
        zero_point,
        evaluations,
    })
}

/// `u0 * W(u0)` plus the integral of the curve over costs above the bid.
pub fn payment_from_curve(curve: &WorkCurve) -> Rational {
    if curve.bid.is_zero() {
        return Rational::zero();
    }
    let mut total = &curve.work_at_bid / &curve.bid;
    for s in &curve.steps {
        total += &s.work * (Rational::one() / &s.lo - Rational::one() / &s.hi);
    }
    total
}

/// Payment for a bid at or below `curve.bid` whose work is `work`, reusing the curve's steps.
pub fn payment_on_curve(curve: &WorkCurve, bid: &Rational, work: &Rational) -> Rational {
    if bid.is_zero() {
        return Rational::zero();
    }
    let mut total = work / bid;
    for s in curve.steps.iter().filter(|s| &s.lo < bid) {
        let hi = if &s.hi < bid { &s.hi } else { bid };
        total += &s.work * (Rational::one() / &s.lo - Rational::one() / hi);
    }
    total
}

pub fn payment(pool: &Arc<JobPool>, speeds: &[Rational], i: usize, g: &Graph, max_steps: usize) -> Result<PaymentResult, Error> {
    payment_at(pool, speeds, i, &speeds[i], g, max_steps)
}

/// Payment when machine `i` bids `bid` instead of `speeds[i]`.
pub fn payment_at(
    pool: &Arc<JobPool>,
    speeds: &[Rational],
    i: usize,
    bid: &Rational,
    g: &Graph,
    max_steps: usize,
) -> Result<PaymentResult, Error> {
    if bid.is_zero() {
        return Ok(PaymentResult {
            payment: Rational::zero(),
            work_at_bid: work_at(pool, speeds, i, bid, g)?,
            truncation_steps: 0,
        });
    }
    let curve = work_curve(pool, speeds, i, bid, g, max_steps)?;
    Ok(PaymentResult {
        payment: payment_from_curve(&curve),
        work_at_bid: curve.work_at_bid.clone(),
        truncation_steps: curve.evaluations - 1,
    })
}

/// Quasilinear utility `payment - work / true_speed` of bidding `bid`.
pub fn utility(
    pool: &Arc<JobPool>,
    speeds: &[Rational],
    i: usize,
    bid: &Rational,
    true_speed: &Rational,
    g: &Graph,
    max_steps: usize,
) -> Result<Rational, Error> {
    if true_speed.is_zero() {
        return Err(Error::Precondition(format!("true speed of machine {i} is 0")));
    }
    let r = payment_at(pool, speeds, i, bid, g, max_steps)?;
    Ok(r.payment - r.work_at_bid / true_speed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(bid: i64, steps: &[(Rational, Rational, i64)], w0: i64) -> WorkCurve {
        WorkCurve {
            machine: 0,
            bid: int(bid),
            work_at_bid: int(w0),
            steps: steps
                .iter()
                .map(|(lo, hi, w)| Step {
                    lo: lo.clone(),
                    hi: hi.clone(),
                    work: int(*w),
                })
                .collect(),
            zero_point: int(0),
            evaluations: 0,
        }
    }

    #[test]
    fn zero_curve_pays_nothing() {
        assert_eq!(payment_from_curve(&curve(2, &[], 0)), int(0));
    }

    #[test]
    fn single_step_closed_form() {
        // work W = 3 for speeds above 1/2 (costs below 2), bid speed 2 (cost 1/2)
        let c = curve(2, &[(Rational::new(1.into(), 2.into()), int(2), 3)], 3);
        // u0* W = 2 * 3
        assert_eq!(payment_from_curve(&c), int(6));
    }

    #[test]
    fn three_steps_match_direct_sum() {
        let h = |a: i64, b: i64| Rational::new(a.into(), b.into());
        let c = curve(4, &[(int(2), int(4), 5), (int(1), int(2), 3), (h(1, 2), int(1), 1)], 5);
        // direct sum in cost space: 5*(1/4) + 5*(1/2-1/4) + 3*(1-1/2) + 1*(2-1)
        let direct = h(5, 4) + h(5, 4) + h(3, 2) + int(1);
        assert_eq!(payment_from_curve(&c), direct);
    }
}
