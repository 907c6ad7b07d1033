//! Command implementations behind the `zdgraph` binary.
//!
//! Every command returns a serializable report; `main.rs` only parses
//! arguments, prints, and maps errors to exit codes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use num_bigint::BigInt;
use serde::Serialize;
use zdgraph_algo::formulas::transmission_values_simple;
use zdgraph_algo::zdgraph::GraphStats;
use zdgraph_algo::*;

pub mod export;

pub use export::{run_export, ExportFormat};

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const MISMATCH: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const RESOURCE: i32 = 3;
}

/// Error surfaced to the user together with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::InvalidParameter(_) | Error::DivisionByZero => exit::USAGE,
            Error::ResourceLimit { .. } => exit::RESOURCE,
            Error::InternalConsistency(_) => exit::MISMATCH,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: exit::USAGE,
            message: message.into(),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub max_vertices: u64,
    pub max_ring_order: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        let limits = Limits::default();
        RunOptions {
            max_vertices: limits.max_vertices,
            max_ring_order: limits.max_ring_order,
        }
    }
}

impl RunOptions {
    pub(crate) fn graph_options(&self) -> GraphOptions {
        GraphOptions {
            limits: Limits {
                max_vertices: self.max_vertices,
                max_ring_order: self.max_ring_order,
            },
            ..GraphOptions::default()
        }
    }
}

/// One formula-versus-oracle comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Quantity {
    pub name: String,
    pub formula: String,
    pub oracle: String,
    #[serde(rename = "match")]
    pub matched: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Wall-clock time per phase, in milliseconds.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub formula_ms: u128,
    pub build_ms: u128,
    pub analyze_ms: u128,
    pub total_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    /// Canonical ring spec (factors sorted by `(n, q)`).
    pub ring: String,
    pub vertices: Count,
    pub quantities: Vec<Quantity>,
    pub verdict: Verdict,
    /// Names of the quantities whose formula and oracle values differ.
    pub formula_mismatch: Vec<String>,
    pub timings: Timings,
}

impl VerifyReport {
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Pass => exit::PASS,
            Verdict::Fail => exit::MISMATCH,
        }
    }

    pub fn quantity(&self, name: &str) -> Option<&Quantity> {
        self.quantities.iter().find(|q| q.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "ring      {}", self.ring);
        let _ = writeln!(out, "vertices  {}", self.vertices);
        for q in &self.quantities {
            let flag = if q.matched { "ok  " } else { "FAIL" };
            let _ = writeln!(out, "{flag} {:<28} formula={} oracle={}", q.name, q.formula, q.oracle);
        }
        let _ = writeln!(out, "verdict   {:?}", self.verdict);
        out
    }
}

struct Checks(Vec<Quantity>);

impl Checks {
    fn eq(&mut self, name: impl Into<String>, formula: impl ToString, oracle: impl ToString) {
        let (formula, oracle) = (formula.to_string(), oracle.to_string());
        self.0.push(Quantity {
            name: name.into(),
            matched: formula == oracle,
            formula,
            oracle,
        });
    }

    fn holds(&mut self, name: impl Into<String>, formula: impl ToString, oracle: impl ToString, ok: bool) {
        self.0.push(Quantity {
            name: name.into(),
            formula: formula.to_string(),
            oracle: oracle.to_string(),
            matched: ok,
        });
    }
}

fn ms(t: Instant) -> u128 {
    t.elapsed().as_millis()
}

/// Parses a ring spec and sorts its factors by `(n, q)`, so that class labels
/// and element indices in every report follow the canonical factor order.
pub fn parse_ring(text: &str) -> CliResult<RingSpec> {
    Ok(parse_ring_spec(text)?.canonical())
}

/// Per-class oracle values: vertex count, degree, transmission (if uniform), distance-3 count.
struct ClassSummary {
    count: usize,
    degree: BTreeMap<usize, usize>,
    transmission: BTreeMap<u64, usize>,
    far: BTreeMap<u64, usize>,
}

fn class_summaries<'g>(g: &'g ZDGraph, stats: &GraphStats) -> BTreeMap<&'g VertexClass, ClassSummary> {
    let mut out: BTreeMap<&VertexClass, ClassSummary> = BTreeMap::new();
    for v in 0..g.vertex_count() {
        let e = out.entry(g.class_of(v)).or_insert_with(|| ClassSummary {
            count: 0,
            degree: BTreeMap::new(),
            transmission: BTreeMap::new(),
            far: BTreeMap::new(),
        });
        e.count += 1;
        *e.degree.entry(g.degree(v)).or_default() += 1;
        *e.transmission.entry(stats.transmissions.per_vertex[v]).or_default() += 1;
        *e.far.entry(stats.far_counts[v]).or_default() += 1;
    }
    out
}

/// Renders a per-class value set: the value when uniform, otherwise every value.
fn uniform<K: ToString + Copy>(m: &BTreeMap<K, usize>) -> (String, Option<K>) {
    let keys: Vec<K> = m.keys().copied().collect();
    match keys.as_slice() {
        [one] => (one.to_string(), Some(*one)),
        many => (
            format!("non-uniform:{}", many.iter().map(|k| k.to_string()).collect::<Vec<_>>().join("/")),
            None,
        ),
    }
}

/// Builds the graph, evaluates every closed form, and compares them.
pub fn run_verify(ring: &str, options: &RunOptions) -> CliResult<VerifyReport> {
    let start = Instant::now();
    let r = parse_ring(ring)?;
    Ok(verify_spec(&r, options, start)?.report)
}

struct Verified {
    report: VerifyReport,
    stats: GraphStats,
    squarezero: usize,
}

fn verify_spec(r: &RingSpec, options: &RunOptions, start: Instant) -> CliResult<Verified> {

    let t = Instant::now();
    let w = wiener_semisimple(r)?;
    let formula_ms = ms(t);

    let t = Instant::now();
    let g = build_graph(r, &options.graph_options())?;
    let build_ms = ms(t);

    let t = Instant::now();
    let stats = analyze(&g)?;
    let analyze_ms = ms(t);

    let mut c = Checks(Vec::new());
    let t = Instant::now();
    c.eq("vertices", r.vertex_count(), g.vertex_count());
    c.eq("wiener", &w.wiener, stats.wiener()?);
    let single = (r.len() == 1).then(|| &r.factors()[0]);
    if let Some(f) = single.filter(|f| f.n >= 2) {
        c.eq("wiener_simple", wiener_simple(f.n as u32, f.q())?, stats.wiener()?);
    }
    let h = &stats.histogram;
    let v = r.vertex_count();
    let pairs = &v * &v.checked_sub(&Count::one()).unwrap_or_default();
    let d2 = Count::from_bigint(pairs.to_bigint() - w.d1.to_bigint() - w.d3.to_bigint(), "d2")?;
    c.eq("d1", &w.d1, &h.d1);
    c.eq("d2", d2, &h.d2);
    c.eq("d3", &w.d3, &h.d3);
    c.eq("unreachable", 0, &h.unreachable);
    c.eq("n2", &w.n2, g.squarezero_count());

    let z = r.zero_divisor_count().to_bigint();
    for (class, s) in class_summaries(&g, &stats) {
        let (deg_oracle, _) = uniform(&s.degree);
        c.eq(format!("degree[{class}]"), degree_formula(r, class)?, deg_oracle);
        let (tr_oracle, _) = uniform(&s.transmission);
        let tr_formula = match single {
            Some(f) => transmission_simple(f.n as u32, f.q(), class.ks[0], class.squarezero)?.to_string(),
            None => match uniform(&s.far).1 {
                // distance-3 counts per class are taken from the graph
                Some(far) => {
                    let deg = degree_formula(r, class)?.to_bigint();
                    (BigInt::from(2) * (&z - 2i32) - deg + BigInt::from(far)).to_string()
                }
                None => "undefined".to_string(),
            },
        };
        c.eq(format!("transmission[{class}]"), tr_formula, tr_oracle);
    }

    let measured = stats.complexity();
    match single {
        Some(f) if f.n >= 2 => c.eq("complexity", wiener_complexity_simple(f.n as u32)?, measured),
        _ => {
            let bound = complexity_upper_bound(r)?;
            let ok = Count::from(measured) <= bound;
            c.holds("complexity_upper_bound", bound, measured, ok);
        }
    }
    let formula_ms = formula_ms + ms(t);

    let quantities = c.0;
    let formula_mismatch: Vec<String> = quantities.iter().filter(|q| !q.matched).map(|q| q.name.clone()).collect();
    let report = VerifyReport {
        ring: r.canonical().to_string(),
        vertices: Count::from(g.vertex_count()),
        verdict: if formula_mismatch.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        quantities,
        formula_mismatch,
        timings: Timings {
            formula_ms,
            build_ms,
            analyze_ms,
            total_ms: ms(start),
        },
    };
    Ok(Verified {
        report,
        stats,
        squarezero: g.squarezero_count(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassRecord {
    pub class: String,
    pub vertices: usize,
    pub degree: String,
    pub transmission: String,
    pub distance3: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValueCount {
    pub value: u64,
    pub vertices: usize,
}

/// Graph-side quantities only.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub ring: String,
    pub vertices: usize,
    pub edges: usize,
    pub wiener: Count,
    pub complexity: u64,
    pub histogram: DistanceSummary,
    pub squarezero: usize,
    pub transmissions: Vec<ValueCount>,
    pub classes: Vec<ClassRecord>,
}

pub fn run_oracle(ring: &str, options: &RunOptions) -> CliResult<OracleReport> {
    let r = parse_ring(ring)?;
    let g = build_graph(&r, &options.graph_options())?;
    let stats = analyze(&g)?;
    let classes = class_summaries(&g, &stats)
        .into_iter()
        .map(|(class, s)| ClassRecord {
            class: class.to_string(),
            vertices: s.count,
            degree: uniform(&s.degree).0,
            transmission: uniform(&s.transmission).0,
            distance3: uniform(&s.far).0,
        })
        .collect();
    Ok(OracleReport {
        ring: r.canonical().to_string(),
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        wiener: stats.wiener()?,
        complexity: stats.complexity(),
        squarezero: g.squarezero_count(),
        transmissions: stats
            .transmissions
            .values
            .iter()
            .map(|(&value, &vertices)| ValueCount { value, vertices })
            .collect(),
        histogram: stats.histogram,
        classes,
    })
}

/// Arguments accepted by `formula`.
#[derive(Debug, Clone, Default)]
pub struct FormulaArgs {
    pub ring: Option<String>,
    pub n: Option<u32>,
    pub q: Option<u64>,
    pub k: Option<u32>,
    pub squarezero: bool,
    pub class: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FormulaReport {
    pub name: String,
    pub args: BTreeMap<String, String>,
    pub value: serde_json::Value,
}

pub const FORMULA_NAMES: &[&str] = &[
    "gaussian_binomial",
    "rank_count",
    "gl_order",
    "zero_divisor_count",
    "squarezero_rank_count",
    "ann_size",
    "annihilator_sizes",
    "degree",
    "wiener_simple",
    "complexity_simple",
    "transmission_simple",
    "transmission_values_simple",
    "t_value",
    "d3",
    "n2",
    "s_value",
    "wiener",
    "complexity_bound",
    "vertex_classes",
    "vertex_count",
];

fn need<T: Copy>(v: Option<T>, flag: &str, name: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::usage(format!("formula {name} needs --{flag}")))
}

/// Parses a class written as `k1,k2,...|s` with `s` in `{0,1}`.
pub fn parse_class(text: &str) -> CliResult<VertexClass> {
    let bad = || CliError::usage(format!("class '{text}' is not of the form k1,...,kl|0 or |1"));
    let (ks, sq) = text.split_once('|').ok_or_else(bad)?;
    let squarezero = match sq {
        "0" => false,
        "1" => true,
        _ => return Err(bad()),
    };
    let ks = ks
        .split(',')
        .map(|k| k.parse::<u32>().map_err(|_| bad()))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(VertexClass::new(ks, squarezero))
}

fn json<T: Serialize>(v: T) -> serde_json::Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// Evaluates a named closed form.
pub fn run_formula(name: &str, a: &FormulaArgs) -> CliResult<FormulaReport> {
    let mut args = BTreeMap::new();
    let ring = |args: &mut BTreeMap<String, String>| -> CliResult<RingSpec> {
        let text = a.ring.as_deref().ok_or_else(|| CliError::usage(format!("formula {name} needs --ring")))?;
        let r = parse_ring(text)?;
        args.insert("ring".into(), r.to_string());
        Ok(r)
    };
    let nqk = |args: &mut BTreeMap<String, String>, with_q: bool, with_k: bool| -> CliResult<(u32, u64, u32)> {
        let n = need(a.n, "n", name)?;
        args.insert("n".into(), n.to_string());
        let q = if with_q { need(a.q, "q", name)? } else { 0 };
        if with_q {
            args.insert("q".into(), q.to_string());
        }
        let k = if with_k { need(a.k, "k", name)? } else { 0 };
        if with_k {
            args.insert("k".into(), k.to_string());
        }
        Ok((n, q, k))
    };
    let value = match name {
        "gaussian_binomial" => {
            let (n, q, k) = nqk(&mut args, true, true)?;
            json(gaussian_binomial(n, k, q)?)
        }
        "rank_count" => {
            let (n, q, k) = nqk(&mut args, true, true)?;
            json(rank_count(n, q, k)?)
        }
        "squarezero_rank_count" => {
            let (n, q, k) = nqk(&mut args, true, true)?;
            json(squarezero_rank_count(n, q, k)?)
        }
        "gl_order" => {
            let (n, q, _) = nqk(&mut args, true, false)?;
            json(gl_order(n, q)?)
        }
        "zero_divisor_count" => {
            let (n, q, _) = nqk(&mut args, true, false)?;
            json(zero_divisor_count(n, q)?)
        }
        "ann_size" => {
            let (n, q, k) = nqk(&mut args, true, true)?;
            json(ann_size_simple(n, q, k)?)
        }
        "annihilator_sizes" => {
            let (n, q, k) = nqk(&mut args, true, true)?;
            json(annihilator_sizes(n, q, k)?)
        }
        "wiener_simple" => {
            let (n, q, _) = nqk(&mut args, true, false)?;
            json(wiener_simple(n, q)?)
        }
        "complexity_simple" => {
            let (n, _, _) = nqk(&mut args, false, false)?;
            json(wiener_complexity_simple(n)?)
        }
        "transmission_simple" => {
            let (n, q, k) = nqk(&mut args, true, true)?;
            args.insert("squarezero".into(), a.squarezero.to_string());
            json(transmission_simple(n, q, k, a.squarezero)?)
        }
        "transmission_values_simple" => {
            let (n, q, _) = nqk(&mut args, true, false)?;
            json(transmission_values_simple(n, q)?)
        }
        "degree" => {
            let r = ring(&mut args)?;
            let text = a.class.as_deref().ok_or_else(|| CliError::usage("formula degree needs --class"))?;
            let class = parse_class(text)?;
            args.insert("class".into(), class.to_string());
            json(degree_formula(&r, &class)?)
        }
        "t_value" => json(t_value(&ring(&mut args)?)?),
        "d3" => json(d3_pair_count(&ring(&mut args)?)?),
        "n2" => json(n2_count(&ring(&mut args)?)?),
        "s_value" => json(s_value(&ring(&mut args)?)),
        "wiener" => json(wiener_semisimple(&ring(&mut args)?)?),
        "complexity_bound" => json(complexity_upper_bound(&ring(&mut args)?)?),
        "vertex_count" => json(ring(&mut args)?.vertex_count()),
        "vertex_classes" => {
            let r = ring(&mut args)?;
            json(vertex_classes(&r).iter().map(|c| c.to_string()).collect::<Vec<_>>())
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown formula '{other}'; known: {}",
                FORMULA_NAMES.join(", ")
            )))
        }
    };
    Ok(FormulaReport {
        name: name.to_string(),
        args,
        value,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PolyReport {
    pub n: u32,
    pub degree: Option<usize>,
    pub degree_bound: usize,
    /// Exact rational coefficients, highest degree first.
    pub coefficients: RationalPoly,
}

pub fn run_poly(n: u32) -> CliResult<PolyReport> {
    let p = wiener_simple_polynomial(n)?;
    Ok(PolyReport {
        n,
        degree: p.degree(),
        degree_bound: p.degree_bound,
        coefficients: p,
    })
}

/// One row of a sweep table.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub ring: String,
    pub vertices: Count,
    pub wiener_formula: Count,
    pub wiener_oracle: Count,
    pub complexity_oracle: u64,
    pub complexity_bound: Count,
    pub d3: Count,
    pub n2: Count,
    pub verdict: Verdict,
    pub ms: u128,
}

/// Every ring (as a sorted factor list) whose graph has between 1 and `max_vertices` vertices.
///
/// Adding a factor never shrinks the zero-divisor count, and a factor
/// `M_n(GF(q))` with `n >= 2` has at least `q^{n(n-1)}` zero-divisors, so the
/// search below is finite.
pub fn sweep_rings(max_vertices: u64) -> CliResult<Vec<RingSpec>> {
    if max_vertices == 0 {
        return Err(CliError::usage("max_vertices must be at least 1"));
    }
    let cap = Count::from(max_vertices);
    let mut candidates = Vec::new();
    for n in 1u32.. {
        if 2u64.checked_pow(n * (n - 1)).is_none_or(|z| z > max_vertices + 1) {
            break;
        }
        for q in 2..=max_vertices + 1 {
            // any factor's own order is bounded by the zero-divisor count of a product,
            // and a lone factor with n >= 2 has at least q^{n(n-1)} zero-divisors
            let bound = if n == 1 { q } else { q.saturating_pow(n * (n - 1)) };
            if bound > max_vertices + 1 {
                break;
            }
            if zdgraph_algo::ffield::prime_power(q).is_some() {
                candidates.push(Factor::new(n as usize, q)?);
            }
        }
    }
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<Factor>, usize)> = vec![(Vec::new(), 0)];
    while let Some((factors, from)) = stack.pop() {
        for (i, c) in candidates.iter().enumerate().skip(from) {
            let mut next = factors.clone();
            next.push(c.clone());
            let r = RingSpec::new(next.clone())?;
            let v = r.vertex_count();
            if v > cap {
                // extending only grows the zero-divisor count
                continue;
            }
            if !v.is_zero() {
                out.push(r);
            }
            stack.push((next, i));
        }
    }
    out.sort_by_key(|r| (r.vertex_count(), r.factors().iter().map(|f| (f.n, f.q())).collect::<Vec<_>>()));
    Ok(out)
}

pub fn run_sweep(max_vertices: u64, options: &RunOptions) -> CliResult<Vec<SweepRow>> {
    let options = RunOptions {
        max_vertices: options.max_vertices.max(max_vertices),
        ..*options
    };
    sweep_rings(max_vertices)?
        .iter()
        .map(|r| {
            let start = Instant::now();
            let Verified {
                report,
                stats,
                squarezero,
            } = verify_spec(r, &options, start)?;
            Ok(SweepRow {
                ring: report.ring,
                vertices: report.vertices,
                wiener_formula: wiener_semisimple(r)?.wiener,
                wiener_oracle: stats.wiener()?,
                complexity_oracle: stats.complexity(),
                complexity_bound: complexity_upper_bound(r)?,
                d3: stats.histogram.d3,
                n2: Count::from(squarezero),
                verdict: report.verdict,
                ms: ms(start),
            })
        })
        .collect()
}

pub const SWEEP_COLUMNS: &[&str] = &[
    "ring",
    "vertices",
    "wiener_formula",
    "wiener_oracle",
    "complexity_oracle",
    "complexity_bound",
    "d3",
    "n2",
    "verdict",
    "ms",
];

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = SWEEP_COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let verdict = match r.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.ring,
            r.vertices,
            r.wiener_formula,
            r.wiener_oracle,
            r.complexity_oracle,
            r.complexity_bound,
            r.d3,
            r.n2,
            verdict,
            r.ms
        );
    }
    out
}
