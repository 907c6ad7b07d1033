//! Closed-form counts for zero-divisor graphs of semisimple rings.
//!
//! Wiener indices are assembled as `2W` in signed big integers and halved only
//! after an evenness check, so a transcription error surfaces as
//! [`Error::InternalConsistency`] rather than a silently rounded value.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{inconsistent, invalid, Error, Result};
use crate::matring::{AnnCensus, RingSpec, VertexClass};
use crate::qcount::{
    big_pow, gaussian_binomial, gl_order, rank_count, squarezero_rank_count, zero_divisor_count, Count,
};

/// Formula-side Wiener index of a product ring with its constituent counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WienerResult {
    pub wiener: Count,
    pub zero_divisor_count: Count,
    /// Ordered vertex pairs at distance 1, i.e. twice the edge count.
    pub d1: Count,
    /// Ordered vertex pairs at distance 3.
    pub d3: Count,
    pub n2: Count,
    pub t_value: Count,
}

fn pow_i(q: u64, e: u64) -> BigInt {
    BigInt::from(big_pow(q, e))
}

fn nq(r: &RingSpec) -> impl Iterator<Item = (u32, u64)> + '_ {
    r.factors().iter().map(|f| (f.n as u32, f.q()))
}

fn check_simple(n: u32, q: u64) -> Result<()> {
    if n < 2 {
        return Err(invalid(format!("n={n}: the zero-divisor graph of a field is empty; need n >= 2")));
    }
    if q < 2 {
        return Err(invalid(format!("field order q={q} must be at least 2")));
    }
    Ok(())
}

fn halve(doubled: BigInt, what: &str) -> Result<Count> {
    let (half, rem) = doubled.div_rem(&BigInt::from(2));
    if !rem.is_zero() {
        return Err(inconsistent(format!("{what}: doubled value {doubled} is odd")));
    }
    Count::from_bigint(half, what)
}

/// `|Ann(A)| = 2q^{n(n-k)} - q^{(n-k)^2}` for a rank-`k` matrix, `k >= 1`.
pub fn ann_size_simple(n: u32, q: u64, k: u32) -> Result<Count> {
    if k == 0 {
        return Err(invalid("rank must be at least 1"));
    }
    let c = annihilator_sizes(n, q, k)?;
    let union = BigInt::from(2) * c.left.to_bigint() - c.twosided.to_bigint();
    Count::from_bigint(union, "annihilator size")
}

/// Left, right and two-sided annihilator sizes of any rank-`k` matrix in `M_n(GF(q))`.
pub fn annihilator_sizes(n: u32, q: u64, k: u32) -> Result<AnnCensus> {
    crate::qcount::QParams::new(n, q, k)?;
    let (n, k) = (u64::from(n), u64::from(k));
    let one_side = Count::pow(q, n * (n - k));
    Ok(AnnCensus {
        left: one_side.clone(),
        right: one_side,
        twosided: Count::pow(q, (n - k) * (n - k)),
    })
}

/// Degree of any vertex of class `c` in `Γ(r)`; 0 for the unit class.
pub fn degree_formula(r: &RingSpec, c: &VertexClass) -> Result<Count> {
    c.validate(r)?;
    if c.is_zero_class() {
        return Err(invalid("the zero class has no vertices"));
    }
    let unit = c.ks.iter().zip(r.factors()).all(|(&k, f)| k as usize == f.n);
    if unit {
        return Ok(Count::zero());
    }
    let mut both = BigInt::one();
    let mut cross = BigInt::one();
    for ((n, q), &k) in nq(r).zip(&c.ks) {
        let (n, k) = (u64::from(n), u64::from(k));
        both *= pow_i(q, (n - k) * (n - k));
        cross *= pow_i(q, k * (n - k));
    }
    let eps = if c.squarezero { 2 } else { 1 };
    Count::from_bigint(both * (BigInt::from(2) * cross - 1) - eps, "degree")
}

/// Wiener index of `Γ(M_n(GF(q)))`, `n >= 2`.
///
/// Any integer `q >= 2` is accepted so the function can be sampled for
/// interpolation; only prime powers correspond to rings.
pub fn wiener_simple(n: u32, q: u64) -> Result<Count> {
    check_simple(n, q)?;
    let z = zero_divisor_count(n, q)?.to_bigint();
    let mut doubled = BigInt::from(2) * &z * &z - BigInt::from(5) * &z + 3;
    let nn = u64::from(n);
    for k in 1..nn {
        let gauss = gaussian_binomial(n, k as u32, q)?.to_bigint();
        let qnk = pow_i(q, nn - k);
        let qn = pow_i(q, nn);
        // square-zero part: zero once j reaches n-k, i.e. whenever 2k > n
        let sq: BigInt = (0..k).map(|j| &qnk - pow_i(q, j)).product();
        let ordered: BigInt = (0..k).map(|j| &qn - pow_i(q, j)).product();
        let ann = BigInt::from(2) * pow_i(q, nn * (nn - k)) - pow_i(q, (nn - k) * (nn - k));
        doubled += gauss * (sq - ann * ordered);
    }
    halve(doubled, "wiener_simple")
}

/// Wiener complexity of `Γ(M_n(F))` as the closed form `2(n-1)`.
pub fn wiener_complexity_simple(n: u32) -> Result<Count> {
    if n < 2 {
        return Err(invalid(format!("n={n}: need n >= 2")));
    }
    Ok(Count::from(2 * (u64::from(n) - 1)))
}

/// Transmission `2(|Z| - 2) - deg` of a rank-`k` vertex of `Γ(M_n(GF(q)))`.
pub fn transmission_simple(n: u32, q: u64, k: u32, squarezero: bool) -> Result<Count> {
    check_simple(n, q)?;
    if k == 0 || k >= n {
        return Err(invalid(format!("rank k={k} must lie in 1..={}", n - 1)));
    }
    let z = zero_divisor_count(n, q)?.to_bigint();
    let eps = if squarezero { 2 } else { 1 };
    let deg = ann_size_simple(n, q, k)?.to_bigint() - eps;
    Count::from_bigint(BigInt::from(2) * (z - 2) - deg, "transmission")
}

/// Distinct transmissions over the vertex classes that actually occur in
/// `Γ(M_n(GF(q)))`: square-zero rank-`k` matrices exist only for `2k <= n`.
pub fn transmission_values_simple(n: u32, q: u64) -> Result<BTreeSet<Count>> {
    check_simple(n, q)?;
    let mut out = BTreeSet::new();
    for k in 1..n {
        out.insert(transmission_simple(n, q, k, false)?);
        if 2 * k <= n {
            out.insert(transmission_simple(n, q, k, true)?);
        }
    }
    Ok(out)
}

fn factor_counts(r: &RingSpec) -> Result<Vec<(Count, Count)>> {
    nq(r)
        .map(|(n, q)| Ok((zero_divisor_count(n, q)?, gl_order(n, q)?)))
        .collect()
}

/// `Σ_{|Λ|>=2} (2^{|Λ|} - 2) ∏_{i∈Λ} |Z(R_i)| ∏_{i∉Λ} |R_i^*|`; 0 for one factor.
pub fn t_value(r: &RingSpec) -> Result<Count> {
    let counts = factor_counts(r)?;
    let l = counts.len();
    if l >= 64 {
        return Err(invalid("too many factors"));
    }
    let mut total = Count::zero();
    for mask in 0u64..(1 << l) {
        let size = mask.count_ones();
        if size < 2 {
            continue;
        }
        let mut term = Count::pow(2, u64::from(size)).checked_sub(&Count::from(2u64)).expect("size >= 2");
        for (i, (z, u)) in counts.iter().enumerate() {
            term *= if mask >> i & 1 == 1 { z.clone() } else { u.clone() };
        }
        total += term;
    }
    Ok(total)
}

/// Ordered vertex pairs at distance 3: `(T(R) - 2^l + 2) ∏ |R_i^*|`.
pub fn d3_pair_count(r: &RingSpec) -> Result<Count> {
    let t = t_value(r)?.to_bigint();
    let units: BigInt = factor_counts(r)?.into_iter().map(|(_, u)| u.to_bigint()).product();
    let l = r.len() as u32;
    Count::from_bigint((t - BigInt::from(2).pow(l) + 2) * units, "d3 pair count")
}

/// Nonzero square-zero elements: `∏_i Σ_{k<n_i} sq(n_i, q_i, k) - 1`.
pub fn n2_count(r: &RingSpec) -> Result<Count> {
    let mut prod = Count::one();
    for (n, q) in nq(r) {
        let mut s = Count::zero();
        for k in 0..n {
            s += squarezero_rank_count(n, q, k)?;
        }
        prod *= s;
    }
    Ok(prod.checked_sub(&Count::one()).expect("zero is square-zero"))
}

/// `∏(n_i + 1) - ∏ n_i`, the number of rank tuples with some full-rank entry.
pub fn s_value(r: &RingSpec) -> Count {
    let succ: Count = r.factors().iter().map(|f| Count::from(f.n as u64 + 1)).product();
    let base: Count = r.factors().iter().map(|f| Count::from(f.n as u64)).product();
    succ.checked_sub(&base).expect("product of n+1 dominates product of n")
}

/// Every rank tuple `(k_1, ..., k_l)` with `0 <= k_i <= n_i`, lexicographic.
pub fn rank_tuples(r: &RingSpec) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for f in r.factors() {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..=f.n as u32).map(move |k| {
                    let mut t = t.clone();
                    t.push(k);
                    t
                })
            })
            .collect();
    }
    out
}

/// Wiener index of `Γ(R)` for `R = ∏ M_{n_i}(GF(q_i))`.
///
/// Uses `2W = 2|Z|^2 - 5|Z| + 3 + D_3 - Σ + ∏q_i^{n_i^2} + ∏|R_i^*| + |N_2|`,
/// where `Σ` runs over all rank tuples of the annihilator-size expression
/// weighted by the number of elements with that rank profile.
pub fn wiener_semisimple(r: &RingSpec) -> Result<WienerResult> {
    if r.is_empty() {
        return Err(invalid("ring has no factors"));
    }
    let z = r.zero_divisor_count().to_bigint();
    let t = t_value(r)?;
    let d3 = d3_pair_count(r)?;
    let n2 = n2_count(r)?;
    let units: BigInt = r.unit_count().to_bigint();
    let order = r.order().to_bigint();

    let mut sigma = BigInt::zero();
    for ks in rank_tuples(r) {
        let mut weight = BigInt::one();
        let mut both = BigInt::one();
        let mut cross = BigInt::one();
        for ((n, q), &k) in nq(r).zip(&ks) {
            weight *= rank_count(n, q, k)?.to_bigint();
            let (n, k) = (u64::from(n), u64::from(k));
            both *= pow_i(q, (n - k) * (n - k));
            cross *= pow_i(q, k * (n - k));
        }
        sigma += weight * both * (BigInt::from(2) * cross - 1);
    }

    let d1 = &sigma - &order - &units - (&z - 1) - n2.to_bigint();
    let vertices = &z - 1;
    let doubled_base = BigInt::from(2) * &vertices * (&vertices - 1);
    let doubled = doubled_base - &d1 + d3.to_bigint();
    let check = BigInt::from(2) * &z * &z - BigInt::from(5) * &z + 3 + d3.to_bigint() - &sigma
        + &order
        + &units
        + n2.to_bigint();
    if doubled != check {
        return Err(inconsistent("Wiener assembly disagrees with its pair-count form"));
    }
    Ok(WienerResult {
        wiener: halve(doubled, "wiener_semisimple")?,
        zero_divisor_count: Count::from_bigint(z, "zero-divisor count")?,
        d1: Count::from_bigint(d1, "d1 pair count")?,
        d3,
        n2,
        t_value: t,
    })
}

/// Upper bound `∏ n_i + ∏(n_i + 1) - 3` on the Wiener complexity.
pub fn complexity_upper_bound(r: &RingSpec) -> Result<Count> {
    let base: BigInt = r.factors().iter().map(|f| BigInt::from(f.n)).product();
    let succ: BigInt = r.factors().iter().map(|f| BigInt::from(f.n + 1)).product();
    Count::from_bigint(base + succ - 3, "complexity bound")
        .map_err(|_| Error::InvalidParameter("bound is negative for an empty graph".into()))
}

/// Vertex classes that are realised by at least one element of `r`.
///
/// A class with square-zero flag needs a square-zero matrix of each rank,
/// which exists iff `2k_i <= n_i` in every factor; the plain flag needs some
/// nonzero component.
pub fn vertex_classes(r: &RingSpec) -> Vec<VertexClass> {
    let mut out = Vec::new();
    for ks in rank_tuples(r) {
        let zero = ks.iter().all(|&k| k == 0);
        let unit = ks.iter().zip(r.factors()).all(|(&k, f)| k as usize == f.n);
        if zero || unit {
            continue;
        }
        let sq_possible = ks.iter().zip(r.factors()).all(|(&k, f)| 2 * k as usize <= f.n);
        let has_plain = ks.iter().any(|&k| k > 0);
        if has_plain {
            out.push(VertexClass::new(ks.clone(), false));
        }
        if sq_possible {
            out.push(VertexClass::new(ks, true));
        }
    }
    out.sort();
    out
}
