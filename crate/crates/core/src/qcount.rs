//! Exact q-combinatorial counts over arbitrary-precision integers.
//!
//! Every function here is a polynomial identity in `q`, so `q` is only
//! required to be an integer `>= 2`; prime-power validation happens when a
//! ring spec is parsed. Divisions are always exact and checked.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Mul, MulAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{inconsistent, invalid, Result};

/// A nonnegative cardinality of unbounded size.
///
/// Serialized as a decimal string so JSON consumers never truncate it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Count(BigUint);

impl Count {
    pub fn zero() -> Self {
        Count(BigUint::zero())
    }

    pub fn one() -> Self {
        Count(BigUint::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn into_biguint(self) -> BigUint {
        self.0
    }

    pub fn to_bigint(&self) -> BigInt {
        BigInt::from_biguint(Sign::Plus, self.0.clone())
    }

    /// Converts a signed intermediate back into a count, failing if it went negative.
    pub fn from_bigint(value: BigInt, what: &str) -> Result<Self> {
        value
            .to_biguint()
            .map(Count)
            .ok_or_else(|| inconsistent(format!("{what} evaluated to a negative value {value}")))
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn checked_sub(&self, other: &Count) -> Option<Count> {
        if self.0 >= other.0 {
            Some(Count(&self.0 - &other.0))
        } else {
            None
        }
    }

    pub fn pow(base: u64, exp: u64) -> Count {
        Count(BigUint::from(base).pow(exp_u32(exp)))
    }
}

fn exp_u32(exp: u64) -> u32 {
    u32::try_from(exp).expect("exponent exceeds u32")
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl FromStr for Count {
    type Err = num_bigint::ParseBigIntError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        s.parse().map(Count)
    }
}

impl From<u64> for Count {
    fn from(v: u64) -> Self {
        Count(BigUint::from(v))
    }
}

impl From<usize> for Count {
    fn from(v: usize) -> Self {
        Count(BigUint::from(v))
    }
}

impl From<u32> for Count {
    fn from(v: u32) -> Self {
        Count(BigUint::from(v))
    }
}

impl From<BigUint> for Count {
    fn from(v: BigUint) -> Self {
        Count(v)
    }
}

impl PartialEq<u64> for Count {
    fn eq(&self, other: &u64) -> bool {
        self.0 == BigUint::from(*other)
    }
}

impl Add for Count {
    type Output = Count;
    fn add(self, rhs: Count) -> Count {
        Count(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Count> for &'a Count {
    type Output = Count;
    fn add(self, rhs: &Count) -> Count {
        Count(&self.0 + &rhs.0)
    }
}

impl AddAssign for Count {
    fn add_assign(&mut self, rhs: Count) {
        self.0 += rhs.0;
    }
}

impl Mul for Count {
    type Output = Count;
    fn mul(self, rhs: Count) -> Count {
        Count(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a Count> for &'a Count {
    type Output = Count;
    fn mul(self, rhs: &Count) -> Count {
        Count(&self.0 * &rhs.0)
    }
}

impl MulAssign for Count {
    fn mul_assign(&mut self, rhs: Count) {
        self.0 *= rhs.0;
    }
}

impl Sum for Count {
    fn sum<I: Iterator<Item = Count>>(iter: I) -> Count {
        iter.fold(Count::zero(), |a, b| a + b)
    }
}

impl Product for Count {
    fn product<I: Iterator<Item = Count>>(iter: I) -> Count {
        iter.fold(Count::one(), |a, b| a * b)
    }
}

impl Serialize for Count {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Count {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Matrix size, field order and rank as they appear in the counting formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QParams {
    pub n: u32,
    pub q: u64,
    pub k: u32,
}

impl QParams {
    pub fn new(n: u32, q: u64, k: u32) -> Result<Self> {
        check_nqk(n, q, k)?;
        Ok(QParams { n, q, k })
    }
}

fn check_q(q: u64) -> Result<()> {
    if q < 2 {
        return Err(invalid(format!("field order q={q} must be at least 2")));
    }
    Ok(())
}

fn check_nqk(n: u32, q: u64, k: u32) -> Result<()> {
    check_q(q)?;
    if n == 0 {
        return Err(invalid("matrix size n must be at least 1"));
    }
    if k > n {
        return Err(invalid(format!("rank k={k} exceeds size n={n}")));
    }
    Ok(())
}

pub(crate) fn big_pow(q: u64, e: u64) -> BigUint {
    BigUint::from(q).pow(exp_u32(e))
}

/// `num / den`, insisting that the division is exact.
pub(crate) fn exact_div(num: &BigUint, den: &BigUint, what: &str) -> Result<BigUint> {
    if den.is_zero() {
        return Err(inconsistent(format!("{what}: zero denominator")));
    }
    let (quot, rem) = num.div_rem(den);
    if !rem.is_zero() {
        return Err(inconsistent(format!("{what}: {num} is not divisible by {den}")));
    }
    Ok(quot)
}

/// `∏_{j=lo}^{hi-1} (q^a - q^j)`; every factor must be nonnegative (`j <= a`).
fn falling_q_product(q: u64, a: u64, lo: u64, hi: u64) -> BigUint {
    let qa = big_pow(q, a);
    (lo..hi)
        .map(|j| {
            debug_assert!(j <= a);
            &qa - big_pow(q, j)
        })
        .product()
}

/// Number of `k`-dimensional subspaces of `GF(q)^n`.
pub fn gaussian_binomial(n: u32, k: u32, q: u64) -> Result<Count> {
    check_q(q)?;
    if k > n {
        return Err(invalid(format!("rank k={k} exceeds size n={n}")));
    }
    let (n, k) = (u64::from(n), u64::from(k));
    let num = falling_q_product(q, n, 0, k);
    let den = falling_q_product(q, k, 0, k);
    exact_div(&num, &den, "gaussian binomial").map(Count)
}

/// Number of rank-`k` matrices in `M_n(GF(q))`: `∏_{j<k} (q^n - q^j)^2 / (q^k - q^j)`.
pub fn rank_count(n: u32, q: u64, k: u32) -> Result<Count> {
    check_nqk(n, q, k)?;
    let (n, k) = (u64::from(n), u64::from(k));
    let ordered = falling_q_product(q, n, 0, k);
    let num = &ordered * &ordered;
    let den = falling_q_product(q, k, 0, k);
    exact_div(&num, &den, "rank count").map(Count)
}

/// `|GL_n(GF(q))| = q^{n(n-1)/2} ∏_{j=1}^{n} (q^j - 1)`.
pub fn gl_order(n: u32, q: u64) -> Result<Count> {
    check_nqk(n, q, 0)?;
    let n = u64::from(n);
    let mut acc = big_pow(q, n * (n - 1) / 2);
    for j in 1..=n {
        acc *= big_pow(q, j) - 1u32;
    }
    Ok(Count(acc))
}

/// `|Z(M_n(GF(q)))|`, the zero matrix included.
pub fn zero_divisor_count(n: u32, q: u64) -> Result<Count> {
    let units = gl_order(n, q)?;
    let n = u64::from(n);
    let all = big_pow(q, n * n);
    Ok(Count(all - units.0))
}

/// Number of rank-`k` matrices `A` in `M_n(GF(q))` with `A^2 = 0`.
///
/// Zero whenever `2k > n` (the image would not fit in the kernel).
pub fn squarezero_rank_count(n: u32, q: u64, k: u32) -> Result<Count> {
    check_nqk(n, q, k)?;
    if 2 * k > n {
        return Ok(Count::zero());
    }
    let (n, k) = (u64::from(n), u64::from(k));
    let num = falling_q_product(q, n, 0, 2 * k);
    let den = big_pow(q, k * k) * falling_q_product(q, k, 0, k);
    exact_div(&num, &den, "square-zero rank count").map(Count)
}
