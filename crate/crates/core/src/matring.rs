//! Matrices over `GF(q)`, elements of finite products of matrix rings, and
//! the ring-spec text format.
//!
//! Elements are numbered by a fixed mixed-radix codec: factor-major, then
//! row-major entries, each entry one base-`q_i` digit, the first entry of the
//! first factor being the least significant digit. Index 0 is the zero
//! element. Vertex numbering and every export depend on this order.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::ffield::{field_build, is_prime, prime_power, FieldElem, FieldSpec, MAX_FIELD_ORDER};
use crate::qcount::{gl_order, Count};

/// Enumeration budgets guarding the brute-force paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_ring_order: u64,
    pub max_vertices: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_ring_order: 1 << 24,
            max_vertices: 200_000,
        }
    }
}

/// One factor `M_n(GF(q))` of a ring spec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub n: usize,
    pub field: FieldSpec,
}

impl Factor {
    pub fn new(n: usize, q: u64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("matrix size must be at least 1"));
        }
        let (p, m) = prime_power(q).ok_or_else(|| invalid(format!("{q} is not a prime power")))?;
        Ok(Factor {
            n,
            field: field_build(p, m)?,
        })
    }

    pub fn q(&self) -> u64 {
        u64::from(self.field.order())
    }

    pub fn entries(&self) -> usize {
        self.n * self.n
    }

    pub fn order(&self) -> Count {
        Count::pow(self.q(), (self.n * self.n) as u64)
    }

    pub fn unit_count(&self) -> Count {
        gl_order(self.n as u32, self.q()).expect("factor parameters are validated")
    }

    pub fn zero_divisor_count(&self) -> Count {
        self.order()
            .checked_sub(&self.unit_count())
            .expect("units never outnumber elements")
    }

    fn key(&self) -> (usize, u64) {
        (self.n, self.q())
    }
}

/// `R = M_{n_1}(GF(q_1)) x ... x M_{n_l}(GF(q_l))`, factors in user order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingSpec {
    factors: Vec<Factor>,
}

impl RingSpec {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(invalid("a ring needs at least one factor"));
        }
        Ok(RingSpec { factors })
    }

    /// Convenience constructor from `(n, q)` pairs.
    pub fn from_pairs(pairs: &[(usize, u64)]) -> Result<Self> {
        let factors = pairs
            .iter()
            .map(|&(n, q)| Factor::new(n, q))
            .collect::<Result<Vec<_>>>()?;
        RingSpec::new(factors)
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn order(&self) -> Count {
        self.factors.iter().map(Factor::order).product()
    }

    pub fn unit_count(&self) -> Count {
        self.factors.iter().map(Factor::unit_count).product()
    }

    /// `|Z(R)| = |R| - |R*|`, zero included.
    pub fn zero_divisor_count(&self) -> Count {
        self.order().checked_sub(&self.unit_count()).expect("units never outnumber elements")
    }

    /// Number of vertices of the zero-divisor graph, `|Z(R)| - 1`.
    pub fn vertex_count(&self) -> Count {
        self.zero_divisor_count()
            .checked_sub(&Count::one())
            .expect("zero is always a zero-divisor")
    }

    /// Ring order as a machine integer, when the codec can address it.
    pub fn order_u64(&self) -> Option<u64> {
        self.factors.iter().try_fold(1u64, |acc, f| {
            let fo = f.q().checked_pow(f.entries() as u32)?;
            acc.checked_mul(fo)
        })
    }

    pub(crate) fn check_order(&self, limits: &Limits) -> Result<u64> {
        match self.order_u64() {
            Some(o) if o <= limits.max_ring_order => Ok(o),
            _ => Err(Error::ResourceLimit {
                what: "ring order",
                requested: self.order().to_string(),
                limit: limits.max_ring_order.to_string(),
            }),
        }
    }

    /// The same ring with factors sorted by `(n, q)`; used as a report key only.
    pub fn canonical(&self) -> RingSpec {
        let mut factors = self.factors.clone();
        factors.sort_by_key(Factor::key);
        RingSpec { factors }
    }

    fn check_elem(&self, x: &RingElem) -> Result<()> {
        if x.parts.len() != self.factors.len() {
            return Err(invalid(format!(
                "element has {} parts, ring has {} factors",
                x.parts.len(),
                self.factors.len()
            )));
        }
        for (i, (m, f)) in x.parts.iter().zip(&self.factors).enumerate() {
            if m.n != f.n {
                return Err(invalid(format!("part {i} has size {}, expected {}", m.n, f.n)));
            }
            if let Some(bad) = m.entries.iter().find(|e| e.0 >= f.field.order()) {
                return Err(invalid(format!("part {i} has entry code {} outside GF({})", bad.0, f.q())));
            }
        }
        Ok(())
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str("x")?;
            }
            write!(f, "M{}({})", factor.n, factor.q())?;
        }
        Ok(())
    }
}

impl FromStr for RingSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_ring_spec(s)
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn fail(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        match self.bytes.get(self.pos) {
            Some(&b) if b == c => {
                self.pos += 1;
                Ok(())
            }
            Some(&b) => Err(self.fail(format!("expected '{}', found '{}'", c as char, b as char))),
            None => Err(self.fail(format!("expected '{}', found end of input", c as char))),
        }
    }

    fn int(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.fail("expected an integer"));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        text.parse().map_err(|_| Error::Parse {
            position: start,
            message: format!("integer {text} is too large"),
        })
    }
}

/// Parses `ring = factor ("x" factor)*`, `factor = "M" SIZE "(" ORDER ")"`,
/// `ORDER = INT | INT "^" INT`. No whitespace is allowed.
pub fn parse_ring_spec(text: &str) -> Result<RingSpec> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let mut raw = Vec::new();
    loop {
        let start = p.pos;
        p.expect(b'M')?;
        let n = p.int()?;
        p.expect(b'(')?;
        let base = p.int()?;
        let q = if p.bytes.get(p.pos) == Some(&b'^') {
            p.pos += 1;
            let exp = p.int()?;
            if !is_prime(base) {
                return Err(invalid(format!(
                    "factor {} ({}): base {base} of {base}^{exp} is not prime",
                    raw.len() + 1,
                    &text[start..p.pos]
                )));
            }
            u32::try_from(exp)
                .ok()
                .and_then(|e| base.checked_pow(e))
                .filter(|&q| q <= MAX_FIELD_ORDER)
                .ok_or_else(|| Error::ResourceLimit {
                    what: "field order",
                    requested: format!("{base}^{exp}"),
                    limit: MAX_FIELD_ORDER.to_string(),
                })?
        } else {
            base
        };
        p.expect(b')')?;
        raw.push((n, q, start, p.pos));
        match p.bytes.get(p.pos) {
            None => break,
            Some(b'x') => p.pos += 1,
            Some(&b) => return Err(p.fail(format!("expected 'x' or end of input, found '{}'", b as char))),
        }
    }
    let factors = raw
        .into_iter()
        .enumerate()
        .map(|(i, (n, q, start, end))| {
            let label = &text[start..end];
            if n == 0 {
                return Err(invalid(format!("factor {} ({label}): matrix size must be at least 1", i + 1)));
            }
            if n > 64 {
                return Err(invalid(format!("factor {} ({label}): matrix size {n} is unsupported", i + 1)));
            }
            if prime_power(q).is_none() {
                return Err(invalid(format!("factor {} ({label}): {q} is not a prime power", i + 1)));
            }
            Factor::new(n as usize, q).map_err(|e| match e {
                Error::InvalidParameter(m) => invalid(format!("factor {} ({label}): {m}", i + 1)),
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    RingSpec::new(factors)
}

/// A square matrix over one factor field, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    pub n: usize,
    pub entries: Vec<FieldElem>,
}

impl Matrix {
    pub fn zero(n: usize) -> Self {
        Matrix {
            n,
            entries: vec![FieldElem::ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = FieldElem::ONE;
        }
        m
    }

    /// The matrix unit `E_ij` (zero-based indices).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Matrix::zero(n);
        m.entries[i * n + j] = FieldElem::ONE;
        m
    }

    pub fn from_codes(n: usize, codes: &[u32]) -> Result<Self> {
        if codes.len() != n * n {
            return Err(invalid(format!("expected {} entries, got {}", n * n, codes.len())));
        }
        Ok(Matrix {
            n,
            entries: codes.iter().map(|&c| FieldElem(c)).collect(),
        })
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.entries[i * self.n + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    fn codes(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.iter().map(|e| e.0)
    }
}

/// `a · b` over `f`.
pub fn mat_mul(a: &Matrix, b: &Matrix, f: &FieldSpec) -> Result<Matrix> {
    if a.n != b.n {
        return Err(invalid(format!("size mismatch: {} vs {}", a.n, b.n)));
    }
    if let Some(bad) = a.entries.iter().chain(&b.entries).find(|e| e.0 >= f.order()) {
        return Err(invalid(format!("entry code {} outside GF({})", bad.0, f.order())));
    }
    let n = a.n;
    let mut out = vec![0u32; n * n];
    let (ac, bc): (Vec<u32>, Vec<u32>) = (a.codes().collect(), b.codes().collect());
    mul_codes(&ac, &bc, &mut out, n, f);
    Ok(Matrix {
        n,
        entries: out.into_iter().map(FieldElem).collect(),
    })
}

pub(crate) fn mul_codes(a: &[u32], b: &[u32], out: &mut [u32], n: usize, f: &FieldSpec) {
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0;
            for t in 0..n {
                acc = f.add_raw(acc, f.mul_raw(a[i * n + t], b[t * n + j]));
            }
            out[i * n + j] = acc;
        }
    }
}

/// True iff `a · b = 0`; stops at the first nonzero entry.
#[inline]
pub(crate) fn product_is_zero(a: &[u32], b: &[u32], n: usize, f: &FieldSpec) -> bool {
    for i in 0..n {
        let row = &a[i * n..(i + 1) * n];
        if row.iter().all(|&c| c == 0) {
            continue;
        }
        for j in 0..n {
            let mut acc = 0;
            for t in 0..n {
                acc = f.add_raw(acc, f.mul_raw(row[t], b[t * n + j]));
            }
            if acc != 0 {
                return false;
            }
        }
    }
    true
}

/// Rank by Gaussian elimination over `f`; destroys `m`.
pub(crate) fn rank_codes(m: &mut [u32], n: usize, f: &FieldSpec) -> usize {
    let mut rank = 0;
    for col in 0..n {
        let Some(pivot) = (rank..n).find(|&r| m[r * n + col] != 0) else {
            continue;
        };
        if pivot != rank {
            for c in 0..n {
                m.swap(pivot * n + c, rank * n + c);
            }
        }
        if rank + 1 == n {
            return n;
        }
        let inv = f.inv_raw(m[rank * n + col]);
        for r in rank + 1..n {
            let lead = m[r * n + col];
            if lead == 0 {
                continue;
            }
            let factor = f.neg_raw(f.mul_raw(lead, inv));
            for c in col..n {
                let v = f.mul_raw(factor, m[rank * n + c]);
                m[r * n + c] = f.add_raw(m[r * n + c], v);
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of `a` over `f`.
pub fn mat_rank(a: &Matrix, f: &FieldSpec) -> usize {
    let mut codes: Vec<u32> = a.codes().collect();
    rank_codes(&mut codes, a.n, f)
}

/// An element `(A_1, ..., A_l)` of a ring spec.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingElem {
    pub parts: Vec<Matrix>,
}

impl RingElem {
    pub fn new(parts: Vec<Matrix>) -> Self {
        RingElem { parts }
    }

    pub fn zero(r: &RingSpec) -> Self {
        RingElem {
            parts: r.factors.iter().map(|f| Matrix::zero(f.n)).collect(),
        }
    }

    pub fn one(r: &RingSpec) -> Self {
        RingElem {
            parts: r.factors.iter().map(|f| Matrix::identity(f.n)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(Matrix::is_zero)
    }
}

/// Componentwise product.
pub fn ring_mul(x: &RingElem, y: &RingElem, r: &RingSpec) -> Result<RingElem> {
    r.check_elem(x)?;
    r.check_elem(y)?;
    let parts = x
        .parts
        .iter()
        .zip(&y.parts)
        .zip(&r.factors)
        .map(|((a, b), f)| mat_mul(a, b, &f.field))
        .collect::<Result<Vec<_>>>()?;
    Ok(RingElem { parts })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Zero,
    Unit,
    ZeroDivisor,
}

/// Zero, unit (every part of full rank), or nonzero zero-divisor.
pub fn classify_element(x: &RingElem, r: &RingSpec) -> Result<ElementKind> {
    r.check_elem(x)?;
    if x.is_zero() {
        return Ok(ElementKind::Zero);
    }
    let full = x
        .parts
        .iter()
        .zip(&r.factors)
        .all(|(m, f)| mat_rank(m, &f.field) == f.n);
    Ok(if full { ElementKind::Unit } else { ElementKind::ZeroDivisor })
}

/// The rank profile of an element plus whether it squares to zero.
///
/// Degree and transmission in the zero-divisor graph depend only on this.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexClass {
    pub ks: Vec<u32>,
    pub squarezero: bool,
}

impl VertexClass {
    pub fn new(ks: Vec<u32>, squarezero: bool) -> Self {
        VertexClass { ks, squarezero }
    }

    pub fn is_zero_class(&self) -> bool {
        self.ks.iter().all(|&k| k == 0)
    }

    /// Checks the class against a ring: one rank per factor, each in range,
    /// and `2k_i <= n_i` whenever the class is square-zero.
    pub fn validate(&self, r: &RingSpec) -> Result<()> {
        if self.ks.len() != r.len() {
            return Err(invalid(format!(
                "class has {} ranks, ring has {} factors",
                self.ks.len(),
                r.len()
            )));
        }
        for (&k, f) in self.ks.iter().zip(r.factors()) {
            if k as usize > f.n {
                return Err(invalid(format!("rank {k} exceeds size {}", f.n)));
            }
            if self.squarezero && 2 * k as usize > f.n {
                return Err(invalid(format!("a square-zero {}x{} matrix cannot have rank {k}", f.n, f.n)));
            }
        }
        Ok(())
    }
}

impl fmt::Display for VertexClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, k) in self.ks.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, "|{}", u8::from(self.squarezero))
    }
}

pub fn rank_profile(x: &RingElem, r: &RingSpec) -> Result<VertexClass> {
    r.check_elem(x)?;
    let ks = x
        .parts
        .iter()
        .zip(&r.factors)
        .map(|(m, f)| mat_rank(m, &f.field) as u32)
        .collect();
    let squarezero = ring_mul(x, x, r)?.is_zero();
    Ok(VertexClass { ks, squarezero })
}

/// Decodes a codec index into an element.
pub fn element_from_index(i: u64, r: &RingSpec) -> Result<RingElem> {
    let order = r.order_u64().ok_or_else(|| invalid("ring too large for the element codec"))?;
    if i >= order {
        return Err(invalid(format!("index {i} out of range for ring of order {order}")));
    }
    let mut rest = i;
    let parts = r
        .factors
        .iter()
        .map(|f| {
            let q = f.q();
            let entries = (0..f.entries())
                .map(|_| {
                    let d = rest % q;
                    rest /= q;
                    FieldElem(d as u32)
                })
                .collect();
            Matrix { n: f.n, entries }
        })
        .collect();
    Ok(RingElem { parts })
}

/// Encodes an element as its codec index.
pub fn element_index(x: &RingElem, r: &RingSpec) -> Result<u64> {
    r.check_elem(x)?;
    r.order_u64().ok_or_else(|| invalid("ring too large for the element codec"))?;
    let mut index = 0u64;
    let mut place = 1u64;
    for (m, f) in x.parts.iter().zip(&r.factors) {
        for e in &m.entries {
            index += u64::from(e.0) * place;
            place = place.wrapping_mul(f.q());
        }
    }
    Ok(index)
}

/// Flat, allocation-free view of a ring used by the enumeration loops.
#[derive(Debug, Clone)]
pub(crate) struct FlatRing<'a> {
    pub ring: &'a RingSpec,
    /// Offset of each factor's entries inside a flat code vector.
    pub offsets: Vec<usize>,
    pub width: usize,
}

impl<'a> FlatRing<'a> {
    pub fn new(ring: &'a RingSpec) -> Self {
        let mut offsets = Vec::with_capacity(ring.len());
        let mut width = 0;
        for f in ring.factors() {
            offsets.push(width);
            width += f.entries();
        }
        FlatRing { ring, offsets, width }
    }

    pub fn decode(&self, mut i: u64, out: &mut [u32]) {
        for (f, &off) in self.ring.factors().iter().zip(&self.offsets) {
            let q = f.q();
            for slot in &mut out[off..off + f.entries()] {
                *slot = (i % q) as u32;
                i /= q;
            }
        }
    }

    pub fn part<'b>(&self, codes: &'b [u32], i: usize) -> &'b [u32] {
        let f = &self.ring.factors()[i];
        &codes[self.offsets[i]..self.offsets[i] + f.entries()]
    }

    /// `x · y == 0` in every factor.
    #[inline]
    pub fn product_is_zero(&self, x: &[u32], y: &[u32]) -> bool {
        self.ring
            .factors()
            .iter()
            .enumerate()
            .all(|(i, f)| product_is_zero(self.part(x, i), self.part(y, i), f.n, &f.field))
    }

    pub fn profile(&self, x: &[u32], scratch: &mut Vec<u32>) -> VertexClass {
        let ks = self
            .ring
            .factors()
            .iter()
            .enumerate()
            .map(|(i, f)| {
                scratch.clear();
                scratch.extend_from_slice(self.part(x, i));
                rank_codes(scratch, f.n, &f.field) as u32
            })
            .collect();
        VertexClass {
            ks,
            squarezero: self.product_is_zero(x, x),
        }
    }
}

/// Sizes of the left, right and two-sided annihilators of an element.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct AnnCensus {
    pub left: Count,
    pub right: Count,
    pub twosided: Count,
}

/// Counts `{y : yx = 0}`, `{y : xy = 0}` and their intersection by walking the whole ring.
pub fn annihilator_census(x: &RingElem, r: &RingSpec, limits: &Limits) -> Result<AnnCensus> {
    r.check_elem(x)?;
    let order = r.check_order(limits)?;
    let flat = FlatRing::new(r);
    let xc: Vec<u32> = x.parts.iter().flat_map(|m| m.codes()).collect();
    let mut y = vec![0u32; flat.width];
    let (mut left, mut right, mut both) = (0u64, 0u64, 0u64);
    for i in 0..order {
        flat.decode(i, &mut y);
        let l = flat.product_is_zero(&y, &xc);
        let rt = flat.product_is_zero(&xc, &y);
        left += u64::from(l);
        right += u64::from(rt);
        both += u64::from(l && rt);
    }
    Ok(AnnCensus {
        left: left.into(),
        right: right.into(),
        twosided: both.into(),
    })
}

/// Null vectors of `x` on one side, found by trying every vector of `GF(q)^n`.
fn null_vectors(xc: &[u32], n: usize, f: &FieldSpec, left: bool) -> Vec<Vec<u32>> {
    let q = u64::from(f.order());
    let total = q.pow(n as u32);
    let mut v = vec![0u32; n];
    let mut out = Vec::new();
    for i in 0..total {
        let mut rest = i;
        for slot in v.iter_mut() {
            *slot = (rest % q) as u32;
            rest /= q;
        }
        let null = (0..n).all(|j| {
            let mut acc = 0;
            for t in 0..n {
                let prod = if left {
                    f.mul_raw(v[t], xc[t * n + j])
                } else {
                    f.mul_raw(xc[j * n + t], v[t])
                };
                acc = f.add_raw(acc, prod);
            }
            acc == 0
        });
        if null {
            out.push(v.clone());
        }
    }
    out
}

/// Annihilator census of a single matrix without walking the whole ring.
///
/// `yx = 0` exactly when every row of `y` is a left null vector of `x`, and
/// `xy = 0` exactly when every column of `y` is a right null vector, so the
/// one-sided counts are powers of the null-vector counts. The two-sided set
/// is enumerated explicitly over all `y` with left-null rows.
pub fn matrix_annihilator_census(x: &Matrix, f: &FieldSpec, limits: &Limits) -> Result<AnnCensus> {
    let n = x.n;
    if let Some(bad) = x.entries.iter().find(|e| e.0 >= f.order()) {
        return Err(invalid(format!("entry code {} outside GF({})", bad.0, f.order())));
    }
    let vectors = u64::from(f.order()).checked_pow(n as u32);
    if vectors.is_none_or(|v| v > limits.max_ring_order) {
        return Err(Error::ResourceLimit {
            what: "vector space size",
            requested: format!("{}^{n}", f.order()),
            limit: limits.max_ring_order.to_string(),
        });
    }
    let xc: Vec<u32> = x.codes().collect();
    let lnull = null_vectors(&xc, n, f, true);
    let rnull = null_vectors(&xc, n, f, false);
    let candidates = (lnull.len() as u64).checked_pow(n as u32);
    if candidates.is_none_or(|c| c > limits.max_ring_order) {
        return Err(Error::ResourceLimit {
            what: "left annihilator size",
            requested: format!("{}^{n}", lnull.len()),
            limit: limits.max_ring_order.to_string(),
        });
    }
    let candidates = candidates.unwrap();
    let base = lnull.len() as u64;
    let mut y = vec![0u32; n * n];
    let mut both = 0u64;
    for i in 0..candidates {
        let mut rest = i;
        for row in 0..n {
            y[row * n..(row + 1) * n].copy_from_slice(&lnull[(rest % base) as usize]);
            rest /= base;
        }
        debug_assert!(product_is_zero(&y, &xc, n, f));
        both += u64::from(product_is_zero(&xc, &y, n, f));
    }
    Ok(AnnCensus {
        left: Count::from(candidates),
        right: Count::pow(rnull.len() as u64, n as u64),
        twosided: both.into(),
    })
}

/// Matrix counts of `M_n(f)` by rank, found by enumerating every matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankCensus {
    /// Entry `k` counts matrices of rank `k`.
    pub by_rank: Vec<Count>,
    /// Entry `k` counts rank-`k` matrices `A` with `A^2 = 0`.
    pub squarezero_by_rank: Vec<Count>,
}

impl RankCensus {
    pub fn units(&self) -> Count {
        self.by_rank.last().cloned().unwrap_or_default()
    }

    pub fn zero_divisors(&self) -> Count {
        let rest = &self.by_rank[..self.by_rank.len() - 1];
        rest.iter().cloned().sum()
    }
}

pub fn rank_census(n: usize, f: &FieldSpec, limits: &Limits) -> Result<RankCensus> {
    use rayon::prelude::*;

    let r = RingSpec::new(vec![Factor { n, field: f.clone() }])?;
    let order = r.check_order(limits)?;
    const CHUNK: u64 = 1 << 14;
    let zeros = || (vec![0u64; n + 1], vec![0u64; n + 1]);
    let (ranks, squares) = (0..order.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let (mut ranks, mut squares) = zeros();
            let q = u64::from(f.order());
            let mut codes = vec![0u32; n * n];
            let mut scratch = vec![0u32; n * n];
            for i in c * CHUNK..((c + 1) * CHUNK).min(order) {
                let mut rest = i;
                for slot in codes.iter_mut() {
                    *slot = (rest % q) as u32;
                    rest /= q;
                }
                scratch.copy_from_slice(&codes);
                let k = rank_codes(&mut scratch, n, f);
                ranks[k] += 1;
                if product_is_zero(&codes, &codes, n, f) {
                    squares[k] += 1;
                }
            }
            (ranks, squares)
        })
        .reduce(zeros, |(mut a, mut b), (c, d)| {
            a.iter_mut().zip(c).for_each(|(x, y)| *x += y);
            b.iter_mut().zip(d).for_each(|(x, y)| *x += y);
            (a, b)
        });
    Ok(RankCensus {
        by_rank: ranks.into_iter().map(Count::from).collect(),
        squarezero_by_rank: squares.into_iter().map(Count::from).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(s: &str) -> RingSpec {
        parse_ring_spec(s).unwrap()
    }

    fn m2(codes: [u32; 4]) -> Matrix {
        Matrix::from_codes(2, &codes).unwrap()
    }

    #[test]
    fn parses_grammar() {
        let r = ring("M2(2)");
        assert_eq!(r.len(), 1);
        assert_eq!((r.factors()[0].n, r.factors()[0].q()), (2, 2));
        let r = ring("M2(2)xM1(3)");
        let pairs: Vec<_> = r.factors().iter().map(|f| (f.n, f.q())).collect();
        assert_eq!(pairs, vec![(2, 2), (1, 3)]);
        assert_eq!(ring("M2(2^3)").factors()[0].q(), 8);
        assert_eq!(ring("M3(9)").factors()[0].field.degree(), 2);
    }

    #[test]
    fn rejects_bad_specs() {
        let e = parse_ring_spec("M2(6)").unwrap_err();
        assert!(matches!(&e, Error::InvalidParameter(m) if m.contains("6 is not a prime power")), "{e}");
        let e = parse_ring_spec("M2(2)xM2(12)").unwrap_err();
        assert!(matches!(&e, Error::InvalidParameter(m) if m.contains("factor 2")), "{e}");
        for (text, pos) in [("", 0), ("M2(2", 4), ("M2 (2)", 2), ("M2(2)x", 6), ("m2(2)", 0), ("M2(2)X", 5), ("M(2)", 1)] {
            match parse_ring_spec(text) {
                Err(Error::Parse { position, .. }) => assert_eq!(position, pos, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(matches!(parse_ring_spec("M0(2)"), Err(Error::InvalidParameter(_))));
        assert!(matches!(parse_ring_spec("M2(4^2)"), Err(Error::InvalidParameter(_))));
        assert!(parse_ring_spec("M2(99999999999999999999999)").is_err());
    }

    #[test]
    fn canonical_text_round_trips() {
        for s in ["M2(2)", "M2(2)xM1(3)", "M1(2)xM1(2)xM1(2)", "M2(4)xM3(2)"] {
            let r = ring(s);
            assert_eq!(r.to_string(), s);
            assert_eq!(ring(&r.to_string()), r);
        }
        assert_eq!(ring("M2(2^2)").to_string(), "M2(4)");
        assert_eq!(ring("M2(3)xM1(2)xM2(2)").canonical().to_string(), "M1(2)xM2(2)xM2(3)");
    }

    #[test]
    fn matrix_products() {
        let f = field_build(2, 1).unwrap();
        let a = m2([1, 1, 0, 1]);
        assert_eq!(mat_mul(&Matrix::identity(2), &a, &f).unwrap(), a);
        assert_eq!(mat_mul(&Matrix::unit(2, 0, 0), &Matrix::unit(2, 0, 1), &f).unwrap(), Matrix::unit(2, 0, 1));
        assert_eq!(mat_mul(&Matrix::zero(2), &a, &f).unwrap(), Matrix::zero(2));
        assert!(mat_mul(&Matrix::zero(2), &Matrix::zero(3), &f).is_err());
    }

    #[test]
    fn ranks() {
        let f = field_build(2, 1).unwrap();
        assert_eq!(mat_rank(&Matrix::zero(3), &f), 0);
        for n in 1..5 {
            assert_eq!(mat_rank(&Matrix::identity(n), &f), n);
        }
        assert_eq!(mat_rank(&m2([1, 1, 1, 1]), &f), 1);
        let f3 = field_build(3, 1).unwrap();
        assert_eq!(mat_rank(&m2([1, 2, 2, 1]), &f3), 1);
        assert_eq!(mat_rank(&m2([1, 1, 2, 1]), &f3), 2);
    }

    #[test]
    fn ring_products() {
        let r = ring("M2(2)xM2(2)");
        let a = m2([1, 0, 1, 1]);
        let b = m2([0, 1, 1, 1]);
        let x = RingElem::one(&r);
        let y = RingElem::new(vec![a.clone(), b.clone()]);
        assert_eq!(ring_mul(&x, &y, &r).unwrap(), y);
        let x = RingElem::new(vec![Matrix::unit(2, 0, 0), Matrix::identity(2)]);
        let y = RingElem::new(vec![Matrix::unit(2, 0, 1), Matrix::zero(2)]);
        assert_eq!(ring_mul(&x, &y, &r).unwrap(), y);

        let r3 = ring("M1(2)xM1(2)xM1(2)");
        let e = |c: [u32; 3]| RingElem::new(c.iter().map(|&v| m2_1(v)).collect());
        assert_eq!(ring_mul(&e([1, 1, 0]), &e([0, 0, 1]), &r3).unwrap(), e([0, 0, 0]));
        assert!(ring_mul(&e([1, 1, 0]), &RingElem::zero(&r), &r3).is_err());
    }

    fn m2_1(v: u32) -> Matrix {
        Matrix::from_codes(1, &[v]).unwrap()
    }

    #[test]
    fn classification_and_profiles() {
        let r = ring("M2(2)xM2(2)");
        assert_eq!(classify_element(&RingElem::one(&r), &r).unwrap(), ElementKind::Unit);
        assert_eq!(classify_element(&RingElem::zero(&r), &r).unwrap(), ElementKind::Zero);
        let x = RingElem::new(vec![Matrix::unit(2, 0, 0), Matrix::identity(2)]);
        assert_eq!(classify_element(&x, &r).unwrap(), ElementKind::ZeroDivisor);

        let zero = rank_profile(&RingElem::zero(&r), &r).unwrap();
        assert_eq!(zero, VertexClass::new(vec![0, 0], true));
        let x = RingElem::new(vec![Matrix::unit(2, 0, 1), Matrix::identity(2)]);
        assert_eq!(rank_profile(&x, &r).unwrap(), VertexClass::new(vec![1, 2], false));
        let r1 = ring("M2(2)");
        let x = RingElem::new(vec![Matrix::unit(2, 0, 1)]);
        assert_eq!(rank_profile(&x, &r1).unwrap(), VertexClass::new(vec![1], true));
        assert_eq!(VertexClass::new(vec![1, 2], false).to_string(), "1,2|0");
    }

    #[test]
    fn class_validation() {
        let r = ring("M2(2)xM3(2)");
        assert!(VertexClass::new(vec![1, 1], true).validate(&r).is_ok());
        assert!(VertexClass::new(vec![1, 2], true).validate(&r).is_err());
        assert!(VertexClass::new(vec![3, 0], false).validate(&r).is_err());
        assert!(VertexClass::new(vec![1], false).validate(&r).is_err());
    }

    #[test]
    fn codec_order() {
        let r = ring("M1(2)xM1(2)");
        let got: Vec<Vec<u32>> = (0..4)
            .map(|i| {
                element_from_index(i, &r)
                    .unwrap()
                    .parts
                    .iter()
                    .map(|m| m.entries[0].0)
                    .collect()
            })
            .collect();
        assert_eq!(got, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert!(element_from_index(0, &ring("M2(3)xM1(5)")).unwrap().is_zero());
        assert!(element_from_index(4, &r).is_err());
        // first entry is the least significant digit
        let r = ring("M2(3)");
        assert_eq!(element_from_index(1, &r).unwrap().parts[0], Matrix::unit(2, 0, 0));
        assert_eq!(element_from_index(3, &r).unwrap().parts[0], Matrix::unit(2, 0, 1));
    }

    #[test]
    fn codec_round_trips() {
        for s in ["M2(2)", "M1(3)xM2(2)", "M2(4)", "M1(5)xM1(2)xM1(3)"] {
            let r = ring(s);
            let order = r.order_u64().unwrap();
            for i in 0..order {
                let x = element_from_index(i, &r).unwrap();
                assert_eq!(element_index(&x, &r).unwrap(), i);
            }
        }
    }

    #[test]
    fn census_fixtures() {
        let r = ring("M2(2)");
        let limits = Limits::default();
        let e11 = RingElem::new(vec![Matrix::unit(2, 0, 0)]);
        let c = annihilator_census(&e11, &r, &limits).unwrap();
        assert_eq!((c.left, c.right, c.twosided), (4u64.into(), 4u64.into(), 2u64.into()));
        let c = annihilator_census(&RingElem::one(&r), &r, &limits).unwrap();
        assert_eq!((c.left, c.right, c.twosided), (1u64.into(), 1u64.into(), 1u64.into()));
        let r = ring("M1(3)xM2(2)");
        let c = annihilator_census(&RingElem::zero(&r), &r, &limits).unwrap();
        assert_eq!(c.left, 48u64);
        assert_eq!(c.twosided, 48u64);
        let tight = Limits {
            max_ring_order: 47,
            ..limits
        };
        assert!(matches!(
            annihilator_census(&RingElem::zero(&r), &r, &tight),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn classification_partitions_ring() {
        for s in ["M2(2)", "M1(2)xM2(2)", "M2(3)", "M1(2)xM1(3)xM1(2)"] {
            let r = ring(s);
            let (mut zero, mut unit, mut zd) = (0u64, 0u64, 0u64);
            for i in 0..r.order_u64().unwrap() {
                match classify_element(&element_from_index(i, &r).unwrap(), &r).unwrap() {
                    ElementKind::Zero => zero += 1,
                    ElementKind::Unit => unit += 1,
                    ElementKind::ZeroDivisor => zd += 1,
                }
            }
            assert_eq!(zero, 1);
            assert_eq!(Count::from(unit), r.unit_count(), "{s}");
            assert_eq!(Count::from(zero + unit + zd), r.order());
        }
    }

    #[test]
    fn single_matrix_census_agrees_with_ring_walk() {
        let limits = Limits::default();
        for s in ["M2(2)", "M2(3)", "M3(2)"] {
            let r = ring(s);
            let f = &r.factors()[0].field;
            for i in 0..r.order_u64().unwrap() {
                let x = element_from_index(i, &r).unwrap();
                let walk = annihilator_census(&x, &r, &limits).unwrap();
                assert_eq!(matrix_annihilator_census(&x.parts[0], f, &limits).unwrap(), walk, "{s} #{i}");
            }
        }
    }

    #[test]
    fn rank_census_small_cases() {
        let f = field_build(2, 1).unwrap();
        let c = rank_census(2, &f, &Limits::default()).unwrap();
        let by_rank: Vec<u64> = c.by_rank.iter().map(|v| v.to_u64().unwrap()).collect();
        assert_eq!(by_rank, [1, 9, 6]);
        let sq: Vec<u64> = c.squarezero_by_rank.iter().map(|v| v.to_u64().unwrap()).collect();
        assert_eq!(sq, [1, 3, 0]);
        assert_eq!(c.units(), 6u64);
        assert_eq!(c.zero_divisors(), 10u64);
        assert!(rank_census(5, &f, &Limits::default()).is_err());
    }
}
