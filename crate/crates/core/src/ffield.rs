//! Finite fields `GF(p^m)` with elements stored as integer codes.
//!
//! A code `c` in `[0, q)` is read base `p`, low digit first, as the
//! coefficient vector of a polynomial residue modulo the field's modulus.
//! Code 0 is zero and code 1 is one.

use std::fmt;
use std::sync::Arc;

use crate::error::{inconsistent, invalid, Error, Result};

/// Largest field order this crate will construct.
pub const MAX_FIELD_ORDER: u64 = 1 << 24;

/// Orders up to this get precomputed addition and multiplication tables.
pub const TABLE_THRESHOLD: u32 = 256;

/// A field element code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[repr(transparent)]
pub struct FieldElem(pub u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Clone)]
struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
}

/// A constructed finite field of order `q = p^m`.
#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    m: u32,
    q: u32,
    /// Monic irreducible modulus, `m + 1` coefficients low degree first; `None` when `m == 1`.
    modulus: Option<Vec<u32>>,
    tables: Option<Arc<Tables>>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .finish()
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Splits `q` as `p^m` with `p` prime, if possible.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            break;
        }
        p += 1;
    }
    if p * p > q {
        return Some((q, 1));
    }
    let (mut rest, mut m) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

fn digits(mut code: u32, p: u32, m: u32) -> Vec<u32> {
    (0..m)
        .map(|_| {
            let d = code % p;
            code /= p;
            d
        })
        .collect()
}

fn undigits(ds: &[u32], p: u32) -> u32 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Remainder of `a` modulo monic `b` over `GF(p)`; both low degree first.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&c| u64::from(c)).collect();
    let db = b.len() - 1;
    let p64 = u64::from(p);
    while r.len() > db {
        let lead = r.pop().unwrap() % p64;
        if lead != 0 {
            let shift = r.len() - db;
            for (i, &bc) in b[..db].iter().enumerate() {
                let sub = lead * u64::from(bc) % p64;
                r[shift + i] = (r[shift + i] + p64 - sub) % p64;
            }
        }
    }
    r.into_iter().map(|c| c as u32).collect()
}

fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let m = poly.len() as u32 - 1;
    // any factorisation has a monic factor of degree <= m/2
    for d in 1..=m / 2 {
        let count = (p as u64).pow(d);
        for low in 0..count {
            let mut divisor = digits(low as u32, p, d);
            divisor.push(1);
            if poly_rem(poly, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest monic irreducible of degree `m`, comparing
/// coefficients from the constant term upwards.
fn smallest_irreducible(p: u32, m: u32) -> Option<Vec<u32>> {
    let total = (p as u64).pow(m);
    (0..total).find_map(|t| {
        // constant coefficient is the most significant digit of t
        let mut coeffs: Vec<u32> = (0..m)
            .map(|i| ((t / (p as u64).pow(m - 1 - i)) % p as u64) as u32)
            .collect();
        coeffs.push(1);
        is_irreducible(&coeffs, p).then_some(coeffs)
    })
}

/// Builds `GF(p^m)`. Deterministic: the same `(p, m)` always yields the same modulus.
pub fn field_build(p: u64, m: u32) -> Result<FieldSpec> {
    if !is_prime(p) {
        return Err(invalid(format!("{p} is not prime")));
    }
    if m == 0 {
        return Err(invalid("extension degree must be at least 1"));
    }
    let q = p
        .checked_pow(m)
        .filter(|&q| q <= MAX_FIELD_ORDER)
        .ok_or_else(|| Error::ResourceLimit {
            what: "field order",
            requested: format!("{p}^{m}"),
            limit: MAX_FIELD_ORDER.to_string(),
        })?;
    let p = p as u32;
    let modulus = if m > 1 {
        Some(
            smallest_irreducible(p, m)
                .ok_or_else(|| inconsistent(format!("no irreducible of degree {m} over GF({p})")))?,
        )
    } else {
        None
    };
    let mut field = FieldSpec {
        p,
        m,
        q: q as u32,
        modulus,
        tables: None,
    };
    if field.q <= TABLE_THRESHOLD {
        let n = field.q as usize;
        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        for a in 0..field.q {
            for b in 0..field.q {
                add[a as usize * n + b as usize] = field.add_slow(a, b);
                mul[a as usize * n + b as usize] = field.mul_slow(a, b);
            }
        }
        field.tables = Some(Arc::new(Tables { add, mul }));
    }
    Ok(field)
}

/// Builds the field of order `q`, which must be a prime power.
pub fn field_of_order(q: u64) -> Result<FieldSpec> {
    let (p, m) = prime_power(q).ok_or_else(|| invalid(format!("{q} is not a prime power")))?;
    field_build(p, m)
}

impl FieldSpec {
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> Option<&[u32]> {
        self.modulus.as_deref()
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q).map(FieldElem)
    }

    fn check(&self, a: FieldElem) -> Result<()> {
        if a.0 >= self.q {
            return Err(invalid(format!("element code {} out of range for GF({})", a.0, self.q)));
        }
        Ok(())
    }

    fn add_slow(&self, a: u32, b: u32) -> u32 {
        if self.m == 1 {
            return ((u64::from(a) + u64::from(b)) % u64::from(self.p)) as u32;
        }
        let (da, db) = (digits(a, self.p, self.m), digits(b, self.p, self.m));
        let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        undigits(&sum, self.p)
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        match &self.modulus {
            None => ((u64::from(a) * u64::from(b)) % u64::from(self.p)) as u32,
            Some(modulus) => {
                let (da, db) = (digits(a, self.p, self.m), digits(b, self.p, self.m));
                let mut prod = vec![0u32; 2 * self.m as usize - 1];
                for (i, &x) in da.iter().enumerate() {
                    for (j, &y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y % self.p) % self.p;
                    }
                }
                undigits(&poly_rem(&prod, modulus, self.p), self.p)
            }
        }
    }

    /// Unchecked addition on codes already known to be in range.
    #[inline]
    pub fn add_raw(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            Some(t) => t.add[(a * self.q + b) as usize],
            None => self.add_slow(a, b),
        }
    }

    /// Unchecked multiplication on codes already known to be in range.
    #[inline]
    pub fn mul_raw(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            Some(t) => t.mul[(a * self.q + b) as usize],
            None => self.mul_slow(a, b),
        }
    }

    pub fn neg_raw(&self, a: u32) -> u32 {
        if self.m == 1 {
            return (self.p - a % self.p) % self.p;
        }
        let d: Vec<u32> = digits(a, self.p, self.m)
            .into_iter()
            .map(|x| (self.p - x) % self.p)
            .collect();
        undigits(&d, self.p)
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(FieldElem(self.add_raw(a.0, b.0)))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(FieldElem(self.mul_raw(a.0, b.0)))
    }

    pub fn neg(&self, a: FieldElem) -> Result<FieldElem> {
        self.check(a)?;
        Ok(FieldElem(self.neg_raw(a.0)))
    }

    pub fn pow(&self, a: FieldElem, mut e: u64) -> Result<FieldElem> {
        self.check(a)?;
        let (mut base, mut acc) = (a.0, 1u32);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            e >>= 1;
        }
        Ok(FieldElem(acc))
    }

    /// Multiplicative inverse, `a^(q-2)`.
    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        self.check(a)?;
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        self.pow(a, u64::from(self.q) - 2)
    }

    pub(crate) fn inv_raw(&self, a: u32) -> u32 {
        self.inv(FieldElem(a)).expect("nonzero in-range element").0
    }
}

// Free-function forms of the field operations.

pub fn field_add(a: FieldElem, b: FieldElem, f: &FieldSpec) -> Result<FieldElem> {
    f.add(a, b)
}

pub fn field_mul(a: FieldElem, b: FieldElem, f: &FieldSpec) -> Result<FieldElem> {
    f.mul(a, b)
}

pub fn field_inv(a: FieldElem, f: &FieldSpec) -> Result<FieldElem> {
    f.inv(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    const X: FieldElem = FieldElem(2);
    const X1: FieldElem = FieldElem(3);

    #[test]
    fn builds_expected_moduli() {
        let gf2 = field_build(2, 1).unwrap();
        assert_eq!(gf2.order(), 2);
        assert!(gf2.modulus().is_none());
        let gf4 = field_build(2, 2).unwrap();
        assert_eq!(gf4.modulus(), Some(&[1, 1, 1][..]));
        assert!(matches!(field_build(4, 1), Err(Error::InvalidParameter(_))));
        // constant-term-first ordering prefers x^3 + x^2 + 1 over x^3 + x + 1
        assert_eq!(field_build(2, 3).unwrap().modulus(), Some(&[1, 0, 1, 1][..]));
        // x^2 + 1 is irreducible over GF(3) and is the smallest candidate
        assert_eq!(field_build(3, 2).unwrap().modulus(), Some(&[1, 0, 1][..]));
    }

    #[test]
    fn arithmetic_fixtures() {
        let gf2 = field_build(2, 1).unwrap();
        let gf4 = field_build(2, 2).unwrap();
        let gf5 = field_build(5, 1).unwrap();
        assert_eq!(gf2.add(FieldElem(1), FieldElem(1)).unwrap(), FieldElem(0));
        assert_eq!(gf4.add(X, X1).unwrap(), FieldElem::ONE);
        assert_eq!(gf5.add(FieldElem(3), FieldElem(4)).unwrap(), FieldElem(2));
        assert_eq!(gf4.mul(X, X1).unwrap(), FieldElem::ONE);
        assert_eq!(gf5.mul(FieldElem(2), FieldElem(3)).unwrap(), FieldElem(1));
        assert_eq!(gf5.inv(FieldElem(2)).unwrap(), FieldElem(3));
        assert_eq!(gf4.inv(X).unwrap(), X1);
        for f in [&gf2, &gf4, &gf5] {
            assert_eq!(f.inv(FieldElem::ONE).unwrap(), FieldElem::ONE);
            for a in f.elements() {
                assert_eq!(f.mul(FieldElem::ZERO, a).unwrap(), FieldElem::ZERO);
            }
        }
    }

    #[test]
    fn error_paths() {
        let gf5 = field_build(5, 1).unwrap();
        assert_eq!(gf5.inv(FieldElem::ZERO), Err(Error::DivisionByZero));
        assert!(matches!(gf5.add(FieldElem(5), FieldElem(0)), Err(Error::InvalidParameter(_))));
        assert!(matches!(gf5.mul(FieldElem(0), FieldElem(9)), Err(Error::InvalidParameter(_))));
        assert!(field_build(2, 0).is_err());
        assert!(matches!(field_build(2, 30), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(1 << 20), Some((2, 20)));
    }

    #[test]
    fn build_is_deterministic() {
        for (p, m) in [(2, 4), (3, 3), (5, 2), (7, 1)] {
            assert_eq!(field_build(p, m).unwrap(), field_build(p, m).unwrap());
        }
    }

    #[test]
    fn untabled_path_agrees_with_tables() {
        let f = field_build(2, 8).unwrap();
        for a in (0..256).step_by(7) {
            for b in (0..256).step_by(5) {
                assert_eq!(f.mul_raw(a, b), f.mul_slow(a, b));
                assert_eq!(f.add_raw(a, b), f.add_slow(a, b));
            }
        }
    }

    /// Exhaustive field-axiom check for every field of order <= 64.
    #[test]
    fn field_axioms_exhaustive() {
        for q in 2..=64u64 {
            let Some((p, m)) = prime_power(q) else { continue };
            let f = field_build(p, m).unwrap();
            let els: Vec<u32> = (0..f.order()).collect();
            for &a in &els {
                assert_eq!(f.add_raw(a, 0), a);
                assert_eq!(f.mul_raw(a, 1), a);
                assert_eq!(f.add_raw(a, f.neg_raw(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul_raw(a, f.inv_raw(a)), 1, "q={q} a={a}");
                }
                assert_eq!(f.pow(FieldElem(a), q).unwrap(), FieldElem(a), "Frobenius q={q}");
                for &b in &els {
                    assert_eq!(f.add_raw(a, b), f.add_raw(b, a));
                    assert_eq!(f.mul_raw(a, b), f.mul_raw(b, a));
                    if a != 0 && b != 0 {
                        assert_ne!(f.mul_raw(a, b), 0, "zero divisor in GF({q})");
                    }
                }
            }
            for &a in &els {
                for &b in &els {
                    for &c in &els {
                        assert_eq!(f.add_raw(f.add_raw(a, b), c), f.add_raw(a, f.add_raw(b, c)));
                        assert_eq!(f.mul_raw(f.mul_raw(a, b), c), f.mul_raw(a, f.mul_raw(b, c)));
                        assert_eq!(
                            f.mul_raw(a, f.add_raw(b, c)),
                            f.add_raw(f.mul_raw(a, b), f.mul_raw(a, c))
                        );
                    }
                }
            }
        }
    }
}
