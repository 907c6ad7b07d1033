//! Exact polynomial reconstruction of `q ↦ W(Γ(M_n(GF(q))))`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{inconsistent, invalid, Result};
use crate::formulas::wiener_simple;
use crate::qcount::Count;

/// A polynomial with exact rational coefficients, highest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoly {
    pub coeffs: Vec<BigRational>,
    /// Degree bound used when the polynomial was fitted.
    pub degree_bound: usize,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<BigRational>, degree_bound: usize) -> Self {
        let lead = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(coeffs.len());
        coeffs.drain(..lead);
        RationalPoly { coeffs, degree_bound }
    }

    /// Degree of the polynomial; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().fold(BigRational::zero(), |acc, c| acc * x + c)
    }
}

impl fmt::Display for RationalPoly {
    /// Plain coefficient list, e.g. `[1, 1, -3/2, -3, -1/2, 2, 1]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

impl Serialize for RationalPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        strings.serialize(s)
    }
}

/// Newton interpolation through `(x_i, y_i)` with distinct `x_i`.
pub fn interpolate(points: &[(BigInt, BigInt)]) -> Result<RationalPoly> {
    let xs: Vec<BigRational> = points.iter().map(|(x, _)| BigRational::from_integer(x.clone())).collect();
    let mut dd: Vec<BigRational> = points.iter().map(|(_, y)| BigRational::from_integer(y.clone())).collect();
    let m = dd.len();
    for level in 1..m {
        for i in (level..m).rev() {
            let span = &xs[i] - &xs[i - level];
            if span.is_zero() {
                return Err(invalid("interpolation nodes must be distinct"));
            }
            dd[i] = (&dd[i] - &dd[i - 1]) / span;
        }
    }
    // Horner over the Newton basis; ascending coefficients
    let mut acc: Vec<BigRational> = Vec::new();
    for i in (0..m).rev() {
        // acc = acc * (x - xs[i]) + dd[i]
        let mut next = vec![BigRational::zero(); acc.len() + 1];
        for (j, a) in acc.iter().enumerate() {
            next[j + 1] += a;
            next[j] -= a * &xs[i];
        }
        next[0] += &dd[i];
        acc = next;
    }
    acc.reverse();
    Ok(RationalPoly::new(acc, m.saturating_sub(1)))
}

/// Interpolates `wiener_simple(n, ·)` through `q = 2, ..., 2n^2 + 2`.
pub fn wiener_simple_polynomial(n: u32) -> Result<RationalPoly> {
    if n < 2 {
        return Err(invalid(format!("n={n}: need n >= 2")));
    }
    let bound = 2 * u64::from(n) * u64::from(n);
    let points = (2..=bound + 2)
        .map(|q| Ok((BigInt::from(q), wiener_simple(n, q)?.to_bigint())))
        .collect::<Result<Vec<_>>>()?;
    let poly = interpolate(&points)?;
    if poly.degree().is_some_and(|d| d as u64 > bound) {
        return Err(inconsistent("interpolant exceeds the degree bound"));
    }
    Ok(RationalPoly { degree_bound: bound as usize, ..poly })
}

/// Evaluates `p` at integer `q`; the value must be a nonnegative integer.
pub fn evaluate_polynomial(p: &RationalPoly, q: u64) -> Result<Count> {
    let v = p.eval(&BigRational::from_integer(BigInt::from(q)));
    if !v.denom().is_one() {
        return Err(inconsistent(format!("polynomial value {v} at q={q} is not an integer")));
    }
    Count::from_bigint(v.to_integer(), "polynomial value")
}
