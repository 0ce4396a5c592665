//! Jobs, job classes, parameters and speeds.

use alloc::format;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::Range;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::numerics::{approx_log2, ceil_log2, floor_f64, cmp_alg_rational, int, pow2, AlgebraicValue, Rational};

/// Divisor used by the first clause of the tiny-block scaling rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum S5Divisor {
    /// Divide newly tiny work by the new block size (dimensionally consistent with the second clause).
    #[default]
    NewBlock,
    /// Divide by the old block size, as the rule is literally written.
    OldBlock,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Params {
    pub epsilon: Rational,
    pub t: u32,
    pub delta: AlgebraicValue,
    pub rho: Rational,
    /// `rho = 2^(-rho_shift)`.
    pub rho_shift: i64,
    pub s5_divisor: S5Divisor,
}

impl Params {
    pub fn new(epsilon: Rational, t: u32) -> Result<Self, Error> {
        if !epsilon.is_positive() || epsilon > Rational::one() {
            return Err(Error::InvalidParameter {
                field: "epsilon",
                reason: format!("must lie in (0, 1], got {}", crate::numerics::format_rational(&epsilon)),
            });
        }
        if t == 0 {
            return Err(Error::InvalidParameter {
                field: "t",
                reason: "must be a positive integer".to_string(),
            });
        }
        let delta = AlgebraicValue::delta(t);
        let rho = choose_rho(&delta);
        let rho_shift = -ceil_log2(&rho);
        Ok(Params {
            epsilon,
            t,
            delta,
            rho,
            rho_shift,
            s5_divisor: S5Divisor::default(),
        })
    }

    pub fn with_s5_divisor(mut self, divisor: S5Divisor) -> Self {
        self.s5_divisor = divisor;
        self
    }

    /// `30 delta < epsilon`, the regime in which the approximation guarantee is proven.
    pub fn advisory_ok(&self) -> bool {
        cmp_alg_rational(&self.delta.scale(&int(30)), &self.epsilon) == Ordering::Less
    }

    /// `lambda` for the block magnitude exponent `zb`.
    pub fn lambda(&self, zb: i64) -> i64 {
        self.t as i64 * (zb - self.rho_shift)
    }

    pub fn big_lambda(&self, z: i64) -> i64 {
        self.t as i64 * z
    }

    /// Block size `rho * 2^zb`.
    pub fn block_size(&self, zb: i64) -> Rational {
        pow2(zb - self.rho_shift)
    }

    /// `(1 + delta)^l = 2^(l/t)`.
    pub fn power(&self, l: i64) -> AlgebraicValue {
        AlgebraicValue::from_power(l, self.t)
    }
}

/// Largest power of two not above `delta / 3`; it is also at least `delta / 6`.
pub fn choose_rho(delta: &AlgebraicValue) -> Rational {
    assert_eq!(delta.sign(), crate::numerics::Sign::Positive, "delta must be positive");
    let mut e: i64 = 0;
    // 3 * 2^e > delta  <=>  delta - 3 * 2^e < 0
    while cmp_alg_rational(delta, &(pow2(e) * int(3))) == Ordering::Less {
        e -= 1;
    }
    let rho = pow2(e);
    assert_ne!(
        cmp_alg_rational(delta, &(&rho * int(6))),
        Ordering::Greater,
        "rho below delta/6"
    );
    rho
}

/// Rounds a speed up to the nearest integral power of `1 + epsilon`.
pub fn round_speed(sigma: &Rational, epsilon: &Rational) -> Rational {
    match speed_exponent(sigma, epsilon) {
        None => Rational::zero(),
        Some(j) => speed_power(epsilon, j),
    }
}

/// `(1 + epsilon)^j`.
pub fn speed_power(epsilon: &Rational, j: i64) -> Rational {
    let base = Rational::one() + epsilon;
    base.pow(j as i32)
}

/// The `j` with `(1+eps)^(j-1) < sigma <= (1+eps)^j`, or `None` for `sigma = 0`.
pub fn speed_exponent(sigma: &Rational, epsilon: &Rational) -> Option<i64> {
    if sigma.is_zero() {
        return None;
    }
    let base = Rational::one() + epsilon;
    let guess = approx_log2(sigma) / approx_log2(&base);
    let mut j = floor_f64(guess) + 1;
    while &base.pow(j as i32) < sigma {
        j += 1;
    }
    while &base.pow((j - 1) as i32) >= sigma {
        j -= 1;
    }
    Some(j)
}

/// Exponent `z` of the magnitude `2^z` with `2^(z-1) < p <= 2^z`.
pub fn magnitude_exponent(p: &Rational) -> i64 {
    ceil_log2(p)
}

/// Valid magnitudes as exponents, ascending and deduplicated.
pub fn valid_magnitudes(sizes: &[Rational]) -> Vec<i64> {
    let mut zs: Vec<i64> = sizes.iter().map(magnitude_exponent).collect();
    zs.sort_unstable();
    zs.dedup();
    zs
}

pub fn is_tiny(p: &Rational, w: &Rational, rho: &Rational) -> bool {
    p <= &(rho * w)
}

/// Class index `l` with `2^(l-1) < p^t <= 2^l`.
pub fn class_index(p: &Rational, t: u32) -> i64 {
    ceil_log2(&p.pow(t as i32))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Job {
    pub id: usize,
    pub size: Rational,
    pub class: i64,
}

/// One nonempty job class with its jobs in the global fixed order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSlot {
    pub l: i64,
    /// Job ids, non-decreasing by size, ties by id.
    pub jobs: Vec<usize>,
    /// `prefix[a]` is the weight of the `a` smallest jobs.
    pub prefix: Vec<Rational>,
}

impl ClassSlot {
    pub fn n_max(&self) -> u32 {
        self.jobs.len() as u32
    }

    /// `|C_l(a, b)|`.
    pub fn weight(&self, a: u32, b: u32) -> Rational {
        &self.prefix[b as usize] - &self.prefix[a as usize]
    }

    /// `C_l(a, b)` as job ids.
    pub fn range(&self, a: u32, b: u32) -> &[usize] {
        &self.jobs[a as usize..b as usize]
    }
}

/// Nonempty classes in ascending order of `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassIndexing {
    pub slots: Vec<ClassSlot>,
    /// `cumulative[i]` is the total weight of `slots[..i]`.
    cumulative: Vec<Rational>,
}

impl ClassIndexing {
    pub fn new(jobs: &[Job]) -> Self {
        let mut order: Vec<usize> = (0..jobs.len()).collect();
        order.sort_by(|&a, &b| {
            jobs[a]
                .class
                .cmp(&jobs[b].class)
                .then_with(|| jobs[a].size.cmp(&jobs[b].size))
                .then_with(|| a.cmp(&b))
        });
        let mut slots: Vec<ClassSlot> = Vec::new();
        for id in order {
            let job = &jobs[id];
            match slots.last_mut() {
                Some(slot) if slot.l == job.class => {
                    let next = slot.prefix.last().unwrap() + &job.size;
                    slot.jobs.push(id);
                    slot.prefix.push(next);
                }
                _ => slots.push(ClassSlot {
                    l: job.class,
                    jobs: alloc::vec![id],
                    prefix: alloc::vec![Rational::zero(), job.size.clone()],
                }),
            }
        }
        let mut cumulative = alloc::vec![Rational::zero()];
        for slot in &slots {
            let next = cumulative.last().unwrap() + slot.prefix.last().unwrap();
            cumulative.push(next);
        }
        ClassIndexing { slots, cumulative }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slot_of(&self, l: i64) -> Option<usize> {
        self.slots.binary_search_by(|s| s.l.cmp(&l)).ok()
    }

    /// Slot indices whose class lies in `(lo, hi]`.
    pub fn slots_in(&self, lo: i64, hi: i64) -> Range<usize> {
        let a = self.slots.partition_point(|s| s.l <= lo);
        let b = self.slots.partition_point(|s| s.l <= hi);
        a..b.max(a)
    }

    /// Total weight of all classes `l <= lambda`.
    pub fn weight_up_to(&self, lambda: i64) -> Rational {
        let i = self.slots.partition_point(|s| s.l <= lambda);
        self.cumulative[i].clone()
    }

    pub fn total_weight(&self) -> Rational {
        self.cumulative.last().unwrap().clone()
    }
}

/// The speed-independent part of an instance: jobs, classes and parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobPool {
    pub params: Params,
    pub jobs: Vec<Job>,
    pub indexing: ClassIndexing,
    /// Valid magnitudes as exponents, ascending.
    pub magnitudes: Vec<i64>,
}

impl JobPool {
    pub fn new(sizes: &[Rational], params: Params) -> Result<Self, Error> {
        for (i, p) in sizes.iter().enumerate() {
            if !p.is_positive() {
                return Err(Error::InvalidInstance {
                    field: "jobs",
                    reason: format!("job {i} has non-positive size {}", crate::numerics::format_rational(p)),
                });
            }
        }
        let jobs: Vec<Job> = sizes
            .iter()
            .enumerate()
            .map(|(id, p)| Job {
                id,
                size: p.clone(),
                class: class_index(p, params.t),
            })
            .collect();
        let indexing = ClassIndexing::new(&jobs);
        let magnitudes = valid_magnitudes(sizes);
        Ok(JobPool {
            params,
            jobs,
            indexing,
            magnitudes,
        })
    }

    pub fn n(&self) -> usize {
        self.jobs.len()
    }

    pub fn z_min(&self) -> Option<i64> {
        self.magnitudes.first().copied()
    }

    pub fn z_max(&self) -> Option<i64> {
        self.magnitudes.last().copied()
    }

    pub fn size(&self, id: usize) -> &Rational {
        &self.jobs[id].size
    }

    pub fn weight_of(&self, ids: &[usize]) -> Rational {
        ids.iter().fold(Rational::zero(), |acc, &id| acc + &self.jobs[id].size)
    }

    pub fn rounded_weight_of(&self, ids: &[usize]) -> AlgebraicValue {
        let mut acc = AlgebraicValue::zero(self.params.t);
        for &id in ids {
            acc = &acc + &self.params.power(self.jobs[id].class);
        }
        acc
    }
}

/// Jobs plus machines. Machines are sorted by raw speed (stable in the input
/// index) and padded with speed-0 machines in front when fewer than three.
#[derive(Clone, Debug)]
pub struct Instance {
    pub pool: Arc<JobPool>,
    /// Raw speeds, ascending.
    pub raw_speeds: Vec<Rational>,
    /// Rounded speeds, ascending.
    pub speeds: Vec<Rational>,
    /// For each sorted position, the input machine index (`None` for padding).
    pub origin: Vec<Option<usize>>,
    /// Number of machines in the input.
    pub input_machines: usize,
}

impl Instance {
    pub fn new(sizes: &[Rational], speeds: &[Rational], epsilon: Rational, t: u32) -> Result<Self, Error> {
        let params = Params::new(epsilon, t)?;
        let pool = Arc::new(JobPool::new(sizes, params)?);
        Self::with_pool(pool, speeds)
    }

    pub fn with_pool(pool: Arc<JobPool>, speeds: &[Rational]) -> Result<Self, Error> {
        Self::ranked(pool, speeds, None)
    }

    /// As [`Instance::with_pool`], but machine `last` sorts after every machine of equal speed.
    pub fn with_pool_last(pool: Arc<JobPool>, speeds: &[Rational], last: usize) -> Result<Self, Error> {
        Self::ranked(pool, speeds, Some(last))
    }

    fn ranked(pool: Arc<JobPool>, speeds: &[Rational], last: Option<usize>) -> Result<Self, Error> {
        if speeds.is_empty() {
            return Err(Error::InvalidInstance {
                field: "speeds",
                reason: "at least one machine is required".to_string(),
            });
        }
        for (i, s) in speeds.iter().enumerate() {
            if s.is_negative() {
                return Err(Error::InvalidInstance {
                    field: "speeds",
                    reason: format!("machine {i} has negative speed {}", crate::numerics::format_rational(s)),
                });
            }
        }
        let mut order: Vec<usize> = (0..speeds.len()).collect();
        order.sort_by(|&a, &b| {
            speeds[a]
                .cmp(&speeds[b])
                .then((Some(a) == last).cmp(&(Some(b) == last)))
                .then(a.cmp(&b))
        });
        let pad = 3usize.saturating_sub(speeds.len());
        let mut origin: Vec<Option<usize>> = core::iter::repeat(None).take(pad).collect();
        origin.extend(order.iter().map(|&i| Some(i)));
        let raw_speeds: Vec<Rational> = origin
            .iter()
            .map(|o| o.map_or_else(Rational::zero, |i| speeds[i].clone()))
            .collect();
        let eps = &pool.params.epsilon;
        let rounded = raw_speeds.iter().map(|s| round_speed(s, eps)).collect();
        Ok(Instance {
            pool,
            raw_speeds,
            speeds: rounded,
            origin,
            input_machines: speeds.len(),
        })
    }

    pub fn m(&self) -> usize {
        self.speeds.len()
    }

    pub fn params(&self) -> &Params {
        &self.pool.params
    }

    /// Raw speeds in input order.
    pub fn input_speeds(&self) -> Vec<Rational> {
        let mut out = alloc::vec![Rational::zero(); self.input_machines];
        for (pos, o) in self.origin.iter().enumerate() {
            if let Some(i) = o {
                out[*i] = self.raw_speeds[pos].clone();
            }
        }
        out
    }

    pub fn sizes(&self) -> Vec<Rational> {
        self.pool.jobs.iter().map(|j| j.size.clone()).collect()
    }
}

/// `ceil(x / y)` as a non-negative machine integer (saturating).
pub fn ceil_div_u32(x: &Rational, y: &Rational) -> u32 {
    let q = (x / y).ceil().to_integer();
    if q <= BigInt::zero() {
        0
    } else {
        u32::try_from(q).unwrap_or(u32::MAX)
    }
}

pub fn floor_div_i64(x: &Rational, y: &Rational) -> i64 {
    let q = (x / y).floor().to_integer();
    i64::try_from(q).unwrap_or(i64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rat, Sign};
    use proptest::prelude::*;

    #[test]
    fn round_speed_examples() {
        assert_eq!(round_speed(&int(3), &int(1)), int(4));
        assert_eq!(round_speed(&int(1), &int(1)), int(1));
        assert_eq!(round_speed(&int(0), &int(1)), int(0));
        assert_eq!(round_speed(&rat(1, 3), &int(1)), rat(1, 2));
        assert_eq!(round_speed(&rat(7, 5), &rat(1, 2)), rat(3, 2));
    }

    #[test]
    fn magnitude_examples() {
        assert_eq!(valid_magnitudes(&[int(3), int(5)]), alloc::vec![2, 3]);
        assert_eq!(valid_magnitudes(&[int(1)]), alloc::vec![0]);
        assert_eq!(valid_magnitudes(&[rat(1, 3)]), alloc::vec![-1]);
        assert!(valid_magnitudes(&[]).is_empty());
    }

    #[test]
    fn tiny_examples() {
        assert!(is_tiny(&int(1), &int(4), &rat(1, 4)));
        assert!(!is_tiny(&int(2), &int(4), &rat(1, 4)));
        assert!(is_tiny(&rat(1, 2), &int(2), &rat(1, 4)));
    }

    /// Independent oracle: scan powers of two against both bounds.
    fn rho_oracle(t: u32) -> Rational {
        let delta = AlgebraicValue::delta(t);
        (0..64)
            .map(|k| pow2(-k))
            .find(|r| {
                let lo = delta.add_rational(&-(r * int(3))).sign() != Sign::Negative;
                let hi = delta.add_rational(&-(r * int(6))).sign() != Sign::Positive;
                lo && hi
            })
            .unwrap()
    }

    #[test]
    fn choose_rho_examples() {
        assert_eq!(choose_rho(&AlgebraicValue::delta(1)), rat(1, 4));
        assert_eq!(choose_rho(&AlgebraicValue::delta(2)), rat(1, 8));
        assert_eq!(choose_rho(&AlgebraicValue::delta(4)), rat(1, 16));
        assert_eq!(choose_rho(&AlgebraicValue::delta(22)), rat(1, 128));
        for t in 1..40 {
            assert_eq!(choose_rho(&AlgebraicValue::delta(t)), rho_oracle(t), "t = {t}");
        }
    }

    #[test]
    fn params_validation() {
        assert!(Params::new(int(0), 1).is_err());
        assert!(Params::new(int(2), 1).is_err());
        assert!(Params::new(int(1), 0).is_err());
        let p = Params::new(int(1), 22).unwrap();
        assert_eq!(p.rho_shift, 7);
        assert!(p.advisory_ok());
        assert!(!Params::new(int(1), 1).unwrap().advisory_ok());
    }

    #[test]
    fn instance_sorting_and_padding() {
        let inst = Instance::new(&[int(1)], &[int(2), int(1)], int(1), 1).unwrap();
        assert_eq!(inst.m(), 3);
        assert_eq!(inst.origin, alloc::vec![None, Some(1), Some(0)]);
        assert_eq!(inst.speeds, alloc::vec![int(0), int(1), int(2)]);
        assert_eq!(inst.input_speeds(), alloc::vec![int(2), int(1)]);
        assert!(Instance::new(&[int(-1)], &[int(1)], int(1), 1).is_err());
        assert!(Instance::new(&[int(1)], &[int(-1)], int(1), 1).is_err());
    }

    #[test]
    fn class_order_is_size_then_id() {
        let pool = JobPool::new(&[rat(11, 10), int(1), int(1)], Params::new(int(1), 1).unwrap()).unwrap();
        assert_eq!(pool.indexing.slots[0].jobs, alloc::vec![1, 2]);
        assert_eq!(pool.indexing.slots[1].jobs, alloc::vec![0]);
        let pool = JobPool::new(&[rat(19, 10), rat(3, 2), rat(3, 2)], Params::new(int(1), 1).unwrap()).unwrap();
        assert_eq!(pool.indexing.slots[0].jobs, alloc::vec![1, 2, 0]);
    }

    proptest! {
        #[test]
        fn class_bounds_hold(p in 1i64..5000, q in 1i64..500, t in 1u32..8) {
            let size = rat(p, q);
            let l = class_index(&size, t);
            let upper = AlgebraicValue::from_power(l, t);
            let lower = AlgebraicValue::from_power(l - 1, t);
            prop_assert_ne!(cmp_alg_rational(&upper, &size), Ordering::Less);
            prop_assert_eq!(cmp_alg_rational(&lower, &size), Ordering::Less);
        }

        #[test]
        fn round_speed_monotone(a in 0i64..400, b in 0i64..400, q in 1i64..20, e in 1i64..8) {
            let eps = rat(e, 8);
            let (x, y) = (rat(a.min(b), q), rat(a.max(b), q));
            let rx = round_speed(&x, &eps);
            let ry = round_speed(&y, &eps);
            prop_assert!(rx <= ry);
            prop_assert!(rx >= x);
            if x.is_positive() {
                prop_assert!(rx < &x * (Rational::one() + &eps));
            }
        }

        #[test]
        fn magnitude_covers_job(p in 1i64..100000, q in 1i64..1000) {
            let size = rat(p, q);
            let z = magnitude_exponent(&size);
            prop_assert!(pow2(z - 1) < size && size <= pow2(z));
        }
    }
}
