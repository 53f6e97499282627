//! Arbitrary-precision integer and exact rational primitives.
//!
//! Everything here is exact. Square roots never appear as values; comparisons
//! against `(1 + sqrt(m)) / 2` are carried out on squared integers.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Non-negative arbitrary-precision integer.
pub type Nat = BigUint;
/// Signed arbitrary-precision integer.
pub type Int = BigInt;

/// Largest sieve bound accepted by [`primes_upto`].
pub const PRIME_LIMIT_CEILING: u64 = 10_000_000;

pub fn gcd(a: &Nat, b: &Nat) -> Result<Nat> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::GcdOfZeros);
    }
    Ok(a.gcd(b))
}

/// Exponent of the largest power of two dividing `a`.
pub fn v2(a: &Nat) -> Result<u64> {
    a.trailing_zeros().ok_or(Error::ValuationOfZero)
}

/// Odd part `a / 2^v2(a)`.
pub fn odd_part(a: &Nat) -> Result<Nat> {
    Ok(a >> v2(a)?)
}

pub fn factorial(n: u64) -> Nat {
    (2..=n).fold(Nat::one(), |acc, k| acc * k)
}

/// `(2s-1)!! = (2s-1)(2s-3)...3*1`, with the empty product at `s = 0`.
pub fn odd_semifactorial(s: u64) -> Nat {
    (1..=s).fold(Nat::one(), |acc, j| acc * (2 * j - 1))
}

/// `n choose k`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> Nat {
    if k > n {
        return Nat::zero();
    }
    let k = k.min(n - k);
    let mut acc = Nat::one();
    for i in 0..k {
        // acc = C(n, i) here, and C(n, i) * (n - i) is divisible by i + 1.
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Ordering of `x` against `(1 + sqrt(m)) / 2`, decided by comparing
/// `(2x - 1)^2` with `m`. Requires `x >= 1/2`.
pub fn cmp_shifted_sqrt(x: &ExactRational, m: &Nat) -> Result<Ordering> {
    // x = p/q, 2x - 1 = (2p - q)/q, so compare (2p - q)^2 with m q^2.
    let p = x.numer();
    let q = x.denom();
    let shifted = BigInt::from(2u8) * p - q;
    if shifted.is_negative() {
        return Err(Error::BelowHalf(x.to_string()));
    }
    let lhs = shifted.magnitude().pow(2);
    let rhs = m * q.magnitude().pow(2);
    Ok(lhs.cmp(&rhs))
}

/// All primes `<= limit`, ascending, by the sieve of Eratosthenes.
pub fn primes_upto(limit: u64) -> Result<Vec<u64>> {
    if limit > PRIME_LIMIT_CEILING {
        return Err(Error::LimitTooLarge {
            max: PRIME_LIMIT_CEILING,
            got: limit,
        });
    }
    if limit < 2 {
        return Ok(Vec::new());
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut i = 2;
    while i * i <= limit {
        if !composite[i] {
            for j in (i * i..=limit).step_by(i) {
                composite[j] = true;
            }
        }
        i += 1;
    }
    Ok((2..=limit)
        .filter(|&k| !composite[k])
        .map(|k| k as u64)
        .collect())
}

/// A fraction kept in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(num: Int, den: Int) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self(BigRational::new(num, den)))
    }

    pub fn from_nat_ratio(num: &Nat, den: &Nat) -> Result<Self> {
        Self::new(
            BigInt::from_biguint(Sign::Plus, num.clone()),
            BigInt::from_biguint(Sign::Plus, den.clone()),
        )
    }

    /// Builds a fraction the caller already knows to be reduced with `den > 0`.
    /// Coprimality is not re-checked here, even in debug builds: that would
    /// be a full gcd per call.
    pub(crate) fn from_reduced(num: Int, den: Int) -> Self {
        debug_assert!(den.is_positive());
        Self(BigRational::new_raw(num, den))
    }

    pub fn from_integer(n: impl Into<Int>) -> Self {
        Self(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn numer(&self) -> &Int {
        self.0.numer()
    }

    /// Always positive.
    pub fn denom(&self) -> &Int {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self(self.0.recip()))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self(&self.0 / &rhs.0))
    }

    pub fn pow(&self, exp: i32) -> Self {
        Self(num_traits::Pow::pow(&self.0, exp))
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

macro_rules! forward_binop {
    ($Op:ident, $op:ident) => {
        impl<'a> $Op<&'a ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $op(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational((&self.0).$op(&rhs.0))
            }
        }
        impl $Op for ExactRational {
            type Output = ExactRational;
            fn $op(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0.$op(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

/// Panics on a zero divisor, like integer division; see [`ExactRational::checked_div`].
impl<'a> Div<&'a ExactRational> for &'a ExactRational {
    type Output = ExactRational;
    fn div(self, rhs: &'a ExactRational) -> ExactRational {
        ExactRational(&self.0 / &rhs.0)
    }
}

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl From<u64> for ExactRational {
    fn from(n: u64) -> Self {
        Self::from_integer(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nat(n: u64) -> Nat {
        Nat::from(n)
    }

    fn rat(p: i64, q: i64) -> ExactRational {
        ExactRational::new(p.into(), q.into()).unwrap()
    }

    fn trial_gcd(a: u64, b: u64) -> u64 {
        (1..=a.min(b)).rev().find(|d| a % d == 0 && b % d == 0).unwrap()
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(trial_gcd(764, 232), 4);
        assert_eq!(gcd(&nat(764), &nat(232)).unwrap(), nat(4));
        assert_eq!(gcd(&nat(1), &nat(1)).unwrap(), nat(1));
        assert_eq!(trial_gcd(2620, 764), 4);
        assert_eq!(gcd(&nat(2620), &nat(764)).unwrap(), nat(4));
        assert_eq!(gcd(&nat(7), &nat(0)).unwrap(), nat(7));
        assert_eq!(gcd(&nat(0), &nat(0)), Err(Error::GcdOfZeros));
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(v2(&nat(232)).unwrap(), 3);
        assert_eq!(odd_part(&nat(232)).unwrap(), nat(29));
        assert_eq!(v2(&nat(1)).unwrap(), 0);
        assert_eq!(v2(&nat(76)).unwrap(), 2);
        assert_eq!(odd_part(&nat(76)).unwrap(), nat(19));
        assert_eq!(v2(&nat(0)), Err(Error::ValuationOfZero));
    }

    #[test]
    fn factorial_examples() {
        assert_eq!(factorial(0), nat(1));
        assert_eq!(factorial(4), nat(24));
        let by_hand: u64 = (1..=10).product();
        assert_eq!(by_hand, 3_628_800);
        assert_eq!(factorial(10), nat(by_hand));
    }

    #[test]
    fn semifactorial_examples() {
        assert_eq!(odd_semifactorial(0), nat(1));
        assert_eq!(odd_semifactorial(1), nat(1));
        assert_eq!(odd_semifactorial(3), nat(15));
        // (2s)! = 2^s s! (2s-1)!!
        for s in 0..30 {
            assert_eq!(
                factorial(2 * s),
                (nat(1) << s) * factorial(s) * odd_semifactorial(s)
            );
        }
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(4, 2), nat(6));
        for n in 0..20 {
            assert_eq!(binomial(n, 0), nat(1));
        }
        assert_eq!(binomial(3, 5), nat(0));

        let mut pascal = vec![vec![1u64]];
        for n in 1..=6 {
            let prev = &pascal[n - 1];
            let mut row = vec![1u64; n + 1];
            for k in 1..n {
                row[k] = prev[k - 1] + prev[k];
            }
            pascal.push(row);
        }
        assert_eq!(pascal[6][4], 15);
        assert_eq!(binomial(6, 4), nat(15));
    }

    #[test]
    fn pascal_rule_up_to_64() {
        for n in 1..=64u64 {
            for k in 1..=n {
                assert_eq!(
                    binomial(n, k),
                    binomial(n - 1, k - 1) + binomial(n - 1, k),
                    "C({n},{k})"
                );
            }
        }
    }

    #[test]
    fn shifted_sqrt_examples() {
        assert_eq!(cmp_shifted_sqrt(&rat(5, 2), &nat(13)).unwrap(), Ordering::Greater);
        assert_eq!(cmp_shifted_sqrt(&rat(5, 2), &nat(17)).unwrap(), Ordering::Less);
        assert_eq!(cmp_shifted_sqrt(&rat(2, 1), &nat(9)).unwrap(), Ordering::Equal);
        assert_eq!(cmp_shifted_sqrt(&rat(1, 1), &nat(1)).unwrap(), Ordering::Equal);
        assert_eq!(cmp_shifted_sqrt(&rat(1, 2), &nat(0)).unwrap(), Ordering::Equal);
        assert!(matches!(
            cmp_shifted_sqrt(&rat(1, 3), &nat(1)),
            Err(Error::BelowHalf(_))
        ));
    }

    #[test]
    fn primes_examples() {
        assert_eq!(primes_upto(10).unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(primes_upto(1).unwrap(), Vec::<u64>::new());
        let trial: Vec<u64> = (2..=30u64)
            .filter(|&n| (2..n).all(|d| n % d != 0))
            .collect();
        assert_eq!(trial, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(primes_upto(30).unwrap(), trial);
        assert!(primes_upto(PRIME_LIMIT_CEILING + 1).is_err());
    }

    #[test]
    fn rationals_are_reduced() {
        let x = rat(10, -4);
        assert_eq!(x.numer(), &Int::from(-5));
        assert_eq!(x.denom(), &Int::from(2));
        assert_eq!(x.to_string(), "-5/2");
        assert_eq!(rat(6, 3).to_string(), "2");
        assert_eq!(
            ExactRational::new(1.into(), 0.into()),
            Err(Error::ZeroDenominator)
        );
        assert!(ExactRational::zero().recip().is_err());
    }

    proptest! {
        #[test]
        fn arithmetic_stays_reduced(
            a in -10_000i64..10_000, b in 1i64..10_000,
            c in -10_000i64..10_000, d in 1i64..10_000,
        ) {
            let x = rat(a, b);
            let y = rat(c, d);
            let mut results = vec![&x + &y, &x - &y, &x * &y];
            if !y.is_zero() {
                results.push(x.checked_div(&y).unwrap());
            }
            for r in results {
                prop_assert!(r.denom().is_positive());
                prop_assert!(r.numer().gcd(r.denom()).is_one());
            }
        }

        #[test]
        fn gcd_divides_and_follows_euclid(a in 1u64..1_000_000_000, b in 1u64..1_000_000_000) {
            let g = gcd(&nat(a), &nat(b)).unwrap();
            prop_assert!((nat(a) % &g).is_zero());
            prop_assert!((nat(b) % &g).is_zero());
            prop_assert_eq!(&g, &gcd(&nat(b), &nat(a % b)).unwrap());
        }

        #[test]
        fn odd_part_is_odd(a in 1u64..u64::MAX) {
            let t = v2(&nat(a)).unwrap();
            prop_assert!((nat(a) >> t).is_odd());
            prop_assert_eq!(nat(a) % (nat(1) << t), nat(0));
        }
    }

    #[test]
    fn shifted_sqrt_agrees_with_squares() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        for _ in 0..1000 {
            let q: i64 = rng.gen_range(1..10_000);
            // p/q >= 1/2
            let p: i64 = rng.gen_range((q + 1) / 2..=2_000 * q);
            let m: u64 = rng.gen_range(0..=1_000_000);
            let x = rat(p, q);
            let two_x_minus_one = &(&x * &rat(2, 1)) - &rat(1, 1);
            let square = &two_x_minus_one * &two_x_minus_one;
            let expected = square.cmp(&ExactRational::from(m));
            assert_eq!(cmp_shifted_sqrt(&x, &nat(m)).unwrap(), expected);
        }
    }
}
