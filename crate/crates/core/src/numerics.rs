//! Exact arithmetic: arbitrary-precision rationals and the field `Q(2^(1/t))`.
//!
//! Every comparison the scheduler performs is decided exactly. Rationals are
//! backed by `num-rational`; elements of the degree-`t` extension are kept as
//! coefficient vectors over the basis `2^(j/t)`, `0 <= j < t`, and their sign
//! is decided by dyadic interval evaluation with doubling precision.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Exact rational number in canonical (reduced, positive denominator) form.
pub type Rational = BigRational;

/// Precision (fractional bits) of the first interval evaluation in [`AlgebraicValue::sign`].
pub const INITIAL_PRECISION_BITS: u32 = 64;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// `2^exp` for any integer exponent.
pub fn pow2(exp: i64) -> Rational {
    if exp >= 0 {
        Rational::from_integer(BigInt::one() << (exp as usize))
    } else {
        Rational::new(BigInt::one(), BigInt::one() << ((-exp) as usize))
    }
}

/// Smallest integer `l` with `r <= 2^l`. Requires `r > 0`.
pub fn ceil_log2(r: &Rational) -> i64 {
    debug_assert!(r.is_positive());
    let n = r.numer().bits() as i64;
    let d = r.denom().bits() as i64;
    // 2^(n-1) <= numer < 2^n, 2^(d-1) <= denom < 2^d, so r lies in (2^(n-d-1), 2^(n-d+1)).
    let mut l = n - d - 1;
    while r > &pow2(l) {
        l += 1;
    }
    while l > i64::MIN + 1 && r <= &pow2(l - 1) {
        l -= 1;
    }
    l
}

/// Largest integer `l` with `2^l <= r`. Requires `r > 0`.
pub fn floor_log2(r: &Rational) -> i64 {
    let c = ceil_log2(r);
    if &pow2(c) == r {
        c
    } else {
        c - 1
    }
}

pub fn ceil_int(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

pub fn floor_int(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

/// Formats as `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        alloc::format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"` or `"p"` (optional leading minus sign, decimal digits only).
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let text = text.trim();
    let bad = || Error::Parse(alloc::format!("not a rational number: {text:?}"));
    let parse_int = |s: &str| -> Result<BigInt, Error> {
        let digits = s.strip_prefix('-').unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        s.parse::<BigInt>().map_err(|_| bad())
    };
    match text.split_once('/') {
        Some((p, q)) => {
            let p = parse_int(p)?;
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(parse_int(text)?)),
    }
}

/// Floor of a finite float, saturating to the `i64` range.
pub fn floor_f64(x: f64) -> i64 {
    let t = x as i64;
    if (t as f64) > x {
        t - 1
    } else {
        t
    }
}

/// Approximate `log2(r)` for `r > 0`, accurate to about `1e-6`; callers that
/// need exactness correct the estimate with exact comparisons.
pub fn approx_log2(r: &Rational) -> f64 {
    let shift = r.numer().bits() as i64 - r.denom().bits() as i64;
    // r / 2^shift lies in (1/2, 2)
    let m = to_f64(&(r / pow2(shift)));
    let y = (m - 1.0) / (m + 1.0);
    let y2 = y * y;
    let ln = 2.0 * y * (1.0 + y2 / 3.0 + y2 * y2 / 5.0 + y2 * y2 * y2 / 7.0 + y2 * y2 * y2 * y2 / 9.0);
    shift as f64 + ln / core::f64::consts::LN_2
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn to_ordering(self) -> Ordering {
        match self {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        }
    }
}

/// Arithmetic operation selector for [`alg_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgOp {
    Add,
    Sub,
    Mul,
}

/// An element `sum_j c_j * 2^(j/t)` of `Q(2^(1/t))`.
///
/// The powers `2^(j/t)` for `0 <= j < t` are linearly independent over the
/// rationals, so the coefficient vector is a unique representation and the
/// zero test is a plain coefficient check.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AlgebraicValue {
    coeffs: Vec<Rational>,
}

impl AlgebraicValue {
    pub fn zero(t: u32) -> Self {
        assert!(t >= 1, "extension degree must be positive");
        AlgebraicValue {
            coeffs: vec![Rational::zero(); t as usize],
        }
    }

    pub fn from_rational(r: Rational, t: u32) -> Self {
        let mut v = Self::zero(t);
        v.coeffs[0] = r;
        v
    }

    pub fn one(t: u32) -> Self {
        Self::from_rational(Rational::one(), t)
    }

    /// `2^(l/t)`, i.e. `(1 + delta)^l` for `delta = 2^(1/t) - 1`.
    pub fn from_power(l: i64, t: u32) -> Self {
        let (q, j) = l.div_mod_floor(&(t as i64));
        let mut v = Self::zero(t);
        v.coeffs[j as usize] = pow2(q);
        v
    }

    /// `delta = 2^(1/t) - 1`.
    pub fn delta(t: u32) -> Self {
        let mut v = Self::from_power(1, t);
        v.coeffs[0] -= Rational::one();
        v
    }

    pub fn degree(&self) -> u32 {
        self.coeffs.len() as u32
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        AlgebraicValue {
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    pub fn add_rational(&self, r: &Rational) -> Self {
        let mut v = self.clone();
        v.coeffs[0] += r;
        v
    }

    fn check_degree(&self, other: &Self) -> Result<(), Error> {
        if self.degree() == other.degree() {
            Ok(())
        } else {
            Err(Error::DegreeMismatch(self.degree(), other.degree()))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, Error> {
        self.check_degree(other)?;
        Ok(AlgebraicValue {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, Error> {
        self.check_degree(other)?;
        Ok(AlgebraicValue {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, Error> {
        self.check_degree(other)?;
        let t = self.coeffs.len();
        let mut out = vec![Rational::zero(); t];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let k = i + j;
                let term = a * b;
                if k >= t {
                    // 2^((k)/t) = 2 * 2^((k - t)/t)
                    out[k - t] += term * int(2);
                } else {
                    out[k] += term;
                }
            }
        }
        Ok(AlgebraicValue { coeffs: out })
    }

    /// Dyadic enclosure `[lo, hi]` of the value at `bits` fractional bits.
    fn enclosure(&self, bits: u32) -> (Rational, Rational) {
        let t = self.coeffs.len() as u32;
        let scale = pow2(bits as i64);
        let mut lo = Rational::zero();
        let mut hi = Rational::zero();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // floor(2^(j/t) * 2^bits) = floor((2^(j + bits*t))^(1/t))
            let radicand = BigUint::one() << (j + (bits as usize) * (t as usize));
            let root = radicand.nth_root(t);
            let exact = root.pow(t) == radicand;
            let r_lo = Rational::from_integer(BigInt::from(root.clone())) / &scale;
            let r_hi = if exact {
                r_lo.clone()
            } else {
                Rational::from_integer(BigInt::from(root + 1u32)) / &scale
            };
            if c.is_positive() {
                lo += c * &r_lo;
                hi += c * &r_hi;
            } else {
                lo += c * &r_hi;
                hi += c * &r_lo;
            }
        }
        (lo, hi)
    }

    /// Exact sign. Zero is decided by the coefficient test; otherwise the
    /// precision doubles until the enclosure excludes zero.
    pub fn sign(&self) -> Sign {
        if self.is_zero() {
            return Sign::Zero;
        }
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            return rational_sign(&self.coeffs[0]);
        }
        let mut bits = INITIAL_PRECISION_BITS;
        loop {
            let (lo, hi) = self.enclosure(bits);
            if lo.is_positive() {
                return Sign::Positive;
            }
            if hi.is_negative() {
                return Sign::Negative;
            }
            bits *= 2;
        }
    }

    /// Rational enclosure at the given precision; used by tests and `--float` output.
    pub fn approx(&self, bits: u32) -> (Rational, Rational) {
        self.enclosure(bits)
    }

    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.enclosure(INITIAL_PRECISION_BITS);
        (to_f64(&lo) + to_f64(&hi)) / 2.0
    }
}

fn rational_sign(r: &Rational) -> Sign {
    if r.is_zero() {
        Sign::Zero
    } else if r.is_positive() {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

pub fn alg_from_power(l: i64, t: u32) -> AlgebraicValue {
    AlgebraicValue::from_power(l, t)
}

pub fn alg_arith(a: &AlgebraicValue, b: &AlgebraicValue, op: AlgOp) -> Result<AlgebraicValue, Error> {
    match op {
        AlgOp::Add => a.checked_add(b),
        AlgOp::Sub => a.checked_sub(b),
        AlgOp::Mul => a.checked_mul(b),
    }
}

pub fn alg_sign(a: &AlgebraicValue) -> Sign {
    a.sign()
}

/// Exact comparison of two extension elements of equal degree.
pub fn cmp_alg(a: &AlgebraicValue, b: &AlgebraicValue) -> Ordering {
    (a - b).sign().to_ordering()
}

/// Exact comparison of an extension element against a rational (embedded as `c_0`).
pub fn cmp_alg_rational(a: &AlgebraicValue, r: &Rational) -> Ordering {
    a.add_rational(&-r).sign().to_ordering()
}

pub fn cmp_rational(a: &Rational, b: &Rational) -> Ordering {
    a.cmp(b)
}

impl fmt::Debug for AlgebraicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.coeffs.len();
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if j == 0 {
                write!(f, "{}", format_rational(c))?;
            } else {
                write!(f, "{}*2^({}/{})", format_rational(c), j, t)?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Add for &AlgebraicValue {
    type Output = AlgebraicValue;
    fn add(self, rhs: &AlgebraicValue) -> AlgebraicValue {
        self.checked_add(rhs).expect("extension degree mismatch")
    }
}

impl Sub for &AlgebraicValue {
    type Output = AlgebraicValue;
    fn sub(self, rhs: &AlgebraicValue) -> AlgebraicValue {
        self.checked_sub(rhs).expect("extension degree mismatch")
    }
}

impl Mul for &AlgebraicValue {
    type Output = AlgebraicValue;
    fn mul(self, rhs: &AlgebraicValue) -> AlgebraicValue {
        self.checked_mul(rhs).expect("extension degree mismatch")
    }
}

impl Neg for &AlgebraicValue {
    type Output = AlgebraicValue;
    fn neg(self) -> AlgebraicValue {
        AlgebraicValue {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn alg(coeffs: &[(i64, i64)]) -> AlgebraicValue {
        let mut v = AlgebraicValue::zero(coeffs.len() as u32);
        for (j, (p, q)) in coeffs.iter().enumerate() {
            v.coeffs[j] = rat(*p, *q);
        }
        v
    }

    #[test]
    fn from_power_examples() {
        assert_eq!(alg_from_power(0, 4), AlgebraicValue::one(4));
        assert_eq!(alg_from_power(4, 4), AlgebraicValue::from_rational(int(2), 4));
        let v = alg_from_power(-1, 4);
        assert_eq!(v.coeffs()[3], rat(1, 2));
        assert!(v.coeffs()[..3].iter().all(Zero::is_zero));
    }

    #[test]
    fn arith_examples() {
        let a = alg_from_power(1, 4);
        let b = alg_from_power(3, 4);
        assert_eq!(&a * &b, AlgebraicValue::from_rational(int(2), 4));

        let x = alg(&[(3, 7), (-2, 5), (0, 1)]);
        assert!((&x + &(-&x)).is_zero());

        let r = alg(&[(-1, 1), (1, 1)]);
        let s = alg(&[(1, 1), (1, 1)]);
        assert_eq!(&r * &s, AlgebraicValue::one(2));
    }

    #[test]
    fn degree_mismatch_is_an_error() {
        let a = AlgebraicValue::one(2);
        let b = AlgebraicValue::one(3);
        assert_eq!(alg_arith(&a, &b, AlgOp::Add), Err(Error::DegreeMismatch(2, 3)));
    }

    #[test]
    fn sign_examples() {
        assert_eq!(AlgebraicValue::zero(5).sign(), Sign::Zero);
        assert_eq!(alg(&[(-3, 2), (1, 1)]).sign(), Sign::Negative);
        assert_eq!(AlgebraicValue::delta(22).sign(), Sign::Positive);
    }

    #[test]
    fn sign_needs_more_than_initial_precision() {
        // 2^(1/2) approximated by a convergent: the difference is below 2^-64.
        // p/q = 6333631924 / 4478554083 is a convergent of sqrt 2 with error ~ 1.8e-20.
        let v = alg(&[(0, 1), (1, 1)]).add_rational(&-Rational::new(
            BigInt::from(6333631924u64),
            BigInt::from(4478554083u64),
        ));
        // sqrt(2) - p/q has the sign of 2 q^2 - p^2.
        let p = BigInt::from(6333631924u64);
        let q = BigInt::from(4478554083u64);
        let expected = if BigInt::from(2) * &q * &q > &p * &p { Sign::Positive } else { Sign::Negative };
        assert_eq!(v.sign(), expected);
    }

    #[test]
    fn log2_helpers() {
        assert_eq!(ceil_log2(&int(3)), 2);
        assert_eq!(ceil_log2(&int(4)), 2);
        assert_eq!(ceil_log2(&rat(1, 3)), -1);
        assert_eq!(floor_log2(&int(3)), 1);
        assert_eq!(floor_log2(&rat(1, 4)), -2);
        for (p, q) in [(3i64, 1i64), (1, 3), (1000, 7), (5, 4), (1, 1)] {
            let exact = std::primitive::f64::log2(p as f64 / q as f64);
            assert!((approx_log2(&rat(p, q)) - exact).abs() < 1e-5);
        }
    }

    #[test]
    fn rational_text_format() {
        assert_eq!(format_rational(&rat(6, 4)), "3/2");
        assert_eq!(format_rational(&int(-5)), "-5");
        assert_eq!(parse_rational("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-4").unwrap(), int(-4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1.5").is_err());
    }

    fn arb_alg(t: u32) -> impl Strategy<Value = AlgebraicValue> {
        proptest::collection::vec((-50i64..50, 1i64..20), t as usize).prop_map(move |cs| {
            let mut v = AlgebraicValue::zero(t);
            for (j, (p, q)) in cs.into_iter().enumerate() {
                v.coeffs[j] = rat(p, q);
            }
            v
        })
    }

    proptest! {
        #[test]
        fn power_law(l in -1000i64..1000, l2 in -1000i64..1000, t in 1u32..12) {
            let lhs = &alg_from_power(l, t) * &alg_from_power(l2, t);
            prop_assert_eq!(lhs, alg_from_power(l + l2, t));
        }

        #[test]
        fn self_difference_is_exact_zero(a in arb_alg(5)) {
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn sign_agrees_with_float(a in arb_alg(3), b in arb_alg(3)) {
            let d = &a - &b;
            let (lo, hi) = d.approx(200);
            let s = d.sign();
            if lo.is_positive() { prop_assert_eq!(s, Sign::Positive); }
            if hi.is_negative() { prop_assert_eq!(s, Sign::Negative); }
            // independent float check when clearly separated from zero
            let f: f64 = d.coeffs().iter().enumerate()
                .map(|(j, c)| to_f64(c) * libm_pow2(j as f64 / 3.0)).sum();
            if f > 1e-9 { prop_assert_eq!(s, Sign::Positive); }
            if f < -1e-9 { prop_assert_eq!(s, Sign::Negative); }
        }
    }

    fn libm_pow2(x: f64) -> f64 {
        std::primitive::f64::powf(2.0, x)
    }
}
