//! Seeded random instances.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numerics::{int, pow2, Rational};

/// A raw instance: sizes, speeds, epsilon and extension degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub sizes: Vec<Rational>,
    pub speeds: Vec<Rational>,
    pub epsilon: Rational,
    pub t: u32,
}

/// Generator parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    pub n_min: usize,
    pub n_max: usize,
    pub machines: Vec<usize>,
    pub degrees: Vec<u32>,
    pub epsilon: Rational,
    /// Job sizes are `{1..16} * 2^e` with `e` in this range.
    pub scale: (i64, i64),
}

impl Shape {
    /// Small instances: `n <= 4`, `m in {3,4,5}`, `t in {1,2}`, epsilon 1.
    pub fn small() -> Shape {
        Shape {
            n_min: 1,
            n_max: 4,
            machines: alloc::vec![3, 4, 5],
            degrees: alloc::vec![1, 2],
            epsilon: int(1),
            scale: (0, 2),
        }
    }
}

/// Seed of trial `index` in a suite seeded with `seed`.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(seed, index))
}

/// Draws an instance. Speeds are `1`, `1+eps` or `(1+eps)^2`.
pub fn sample(rng: &mut ChaCha8Rng, shape: &Shape) -> Sample {
    let n = rng.gen_range(shape.n_min..=shape.n_max);
    let m = shape.machines[rng.gen_range(0..shape.machines.len())];
    let t = shape.degrees[rng.gen_range(0..shape.degrees.len())];
    let sizes = (0..n)
        .map(|_| int(rng.gen_range(1..=16)) * pow2(rng.gen_range(shape.scale.0..=shape.scale.1)))
        .collect();
    let base = int(1) + &shape.epsilon;
    let speeds = (0..m)
        .map(|_| match rng.gen_range(0..3) {
            0 => int(1),
            1 => base.clone(),
            _ => &base * &base,
        })
        .collect();
    Sample {
        sizes,
        speeds,
        epsilon: shape.epsilon.clone(),
        t,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instance() {
        let a = sample(&mut rng_for(7, 3), &Shape::small());
        let b = sample(&mut rng_for(7, 3), &Shape::small());
        assert_eq!(a, b);
        let c = sample(&mut rng_for(7, 4), &Shape::small());
        assert!(a != c || a.sizes.is_empty());
    }

    #[test]
    fn ranges() {
        let mut rng = rng_for(1, 0);
        for _ in 0..200 {
            let s = sample(&mut rng, &Shape::small());
            assert!((1..=4).contains(&s.sizes.len()));
            assert!([3, 4, 5].contains(&s.speeds.len()));
            assert!(s.speeds.iter().all(|x| *x == int(1) || *x == int(2) || *x == int(4)));
        }
    }
}
