//! Brute-force zero-divisor graph oracle.
//!
//! Builds `Γ(R)` by enumerating the ring and testing products directly, then
//! computes exact distances by breadth-first search. Nothing in this module
//! consults a closed-form Wiener or degree formula.
//!
//! Per-source work is spread over the current rayon pool and merged in
//! source order, so results do not depend on the number of workers.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{inconsistent, invalid, Error, Result};
use crate::matring::{mat_rank, ring_mul, FlatRing, Limits, RingElem, RingSpec, VertexClass};
use crate::qcount::Count;

/// Graphs up to this many vertices keep a dense adjacency bit matrix.
pub const DENSE_VERTEX_LIMIT: usize = 65_536;

/// Sentinel distance for vertices not reached from the source.
pub const UNREACHABLE: u8 = u8::MAX;

#[derive(Debug, Clone, Copy)]
pub struct GraphOptions {
    pub limits: Limits,
    /// Largest vertex count stored as a dense bit matrix; above it, neighbour lists.
    pub dense_threshold: usize,
}

impl Default for GraphOptions {
    fn default() -> Self {
        GraphOptions {
            limits: Limits::default(),
            dense_threshold: DENSE_VERTEX_LIMIT,
        }
    }
}

#[derive(Debug, Clone)]
struct BitMatrix {
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }
}

#[derive(Debug, Clone)]
enum Adjacency {
    Dense(BitMatrix),
    Lists(Vec<Vec<u32>>),
}

/// The zero-divisor graph of a ring, vertices numbered in ascending codec order.
#[derive(Debug, Clone)]
pub struct ZDGraph {
    ring: RingSpec,
    vertices: Vec<u64>,
    class_ids: Vec<u32>,
    classes: Vec<VertexClass>,
    adjacency: Adjacency,
}

fn set_bit(row: &mut [u64], j: usize) {
    row[j / 64] |= 1 << (j % 64);
}

/// Enumerates `R`, keeps the nonzero zero-divisors, and tests every pair.
pub fn build_graph(r: &RingSpec, options: &GraphOptions) -> Result<ZDGraph> {
    let order = r.check_order(&options.limits)?;
    let flat = FlatRing::new(r);
    let width = flat.width;

    // classify every element; chunked so the scan parallelises
    const CHUNK: u64 = 1 << 14;
    let chunks: Vec<(Vec<u64>, Vec<VertexClass>)> = (0..order.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut codes = vec![0u32; width];
            let mut scratch = Vec::new();
            let mut idx = Vec::new();
            let mut cls = Vec::new();
            for i in c * CHUNK..((c + 1) * CHUNK).min(order) {
                if i == 0 {
                    continue;
                }
                flat.decode(i, &mut codes);
                let class = flat.profile(&codes, &mut scratch);
                let unit = class.ks.iter().zip(r.factors()).all(|(&k, f)| k as usize == f.n);
                if !unit {
                    idx.push(i);
                    cls.push(class);
                }
            }
            (idx, cls)
        })
        .collect();

    let count: usize = chunks.iter().map(|c| c.0.len()).sum();
    if count as u64 > options.limits.max_vertices {
        return Err(Error::ResourceLimit {
            what: "vertex count",
            requested: count.to_string(),
            limit: options.limits.max_vertices.to_string(),
        });
    }
    let mut vertices = Vec::with_capacity(count);
    let mut class_list = Vec::with_capacity(count);
    for (idx, cls) in chunks {
        vertices.extend(idx);
        class_list.extend(cls);
    }

    let mut classes: Vec<VertexClass> = class_list.clone();
    classes.sort();
    classes.dedup();
    let class_ids = class_list
        .iter()
        .map(|c| classes.binary_search(c).expect("class present") as u32)
        .collect();

    let mut codes = vec![0u32; count * width];
    for (v, &i) in vertices.iter().enumerate() {
        flat.decode(i, &mut codes[v * width..(v + 1) * width]);
    }
    let code = |v: usize| &codes[v * width..(v + 1) * width];
    let adjacent = |u: usize, v: usize| {
        u != v && (flat.product_is_zero(code(u), code(v)) || flat.product_is_zero(code(v), code(u)))
    };

    let adjacency = if count <= options.dense_threshold {
        let words = count.div_ceil(64);
        let mut bits = vec![0u64; count * words];
        if words > 0 {
            bits.par_chunks_mut(words).enumerate().for_each(|(u, row)| {
                for v in 0..count {
                    if adjacent(u, v) {
                        set_bit(row, v);
                    }
                }
            });
        }
        Adjacency::Dense(BitMatrix { words, bits })
    } else {
        let lists = (0..count)
            .into_par_iter()
            .map(|u| (0..count).filter(|&v| adjacent(u, v)).map(|v| v as u32).collect())
            .collect();
        Adjacency::Lists(lists)
    };

    Ok(ZDGraph {
        ring: r.clone(),
        vertices,
        class_ids,
        classes,
        adjacency,
    })
}

impl ZDGraph {
    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Codec index of vertex `v`.
    pub fn element_index(&self, v: usize) -> u64 {
        self.vertices[v]
    }

    pub fn vertex_of_index(&self, index: u64) -> Option<usize> {
        self.vertices.binary_search(&index).ok()
    }

    pub fn class_of(&self, v: usize) -> &VertexClass {
        &self.classes[self.class_ids[v] as usize]
    }

    /// Distinct vertex classes present, sorted.
    pub fn classes(&self) -> &[VertexClass] {
        &self.classes
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.adjacency, Adjacency::Dense(_))
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        match &self.adjacency {
            Adjacency::Dense(m) => m.get(u, v),
            Adjacency::Lists(l) => l[u].binary_search(&(v as u32)).is_ok(),
        }
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        match &self.adjacency {
            Adjacency::Dense(m) => m
                .row(v)
                .iter()
                .enumerate()
                .flat_map(|(w, &word)| {
                    let mut word = word;
                    std::iter::from_fn(move || {
                        (word != 0).then(|| {
                            let b = word.trailing_zeros() as usize;
                            word &= word - 1;
                            w * 64 + b
                        })
                    })
                })
                .collect(),
            Adjacency::Lists(l) => l[v].iter().map(|&u| u as usize).collect(),
        }
    }

    pub fn degree(&self, v: usize) -> usize {
        match &self.adjacency {
            Adjacency::Dense(m) => m.row(v).iter().map(|w| w.count_ones() as usize).sum(),
            Adjacency::Lists(l) => l[v].len(),
        }
    }

    pub fn edge_count(&self) -> usize {
        (0..self.vertex_count()).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.vertex_count())
            .flat_map(|u| {
                self.neighbors(u)
                    .into_iter()
                    .filter(move |&v| v > u)
                    .map(move |v| (u, v))
            })
            .collect()
    }

    /// Number of vertices squaring to zero, `|N_2(R)|`.
    pub fn squarezero_count(&self) -> usize {
        self.class_ids
            .iter()
            .filter(|&&c| self.classes[c as usize].squarezero)
            .count()
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.vertex_count() {
            return Err(invalid(format!("vertex {v} out of range ({} vertices)", self.vertex_count())));
        }
        Ok(())
    }

    fn levels(&self, source: usize) -> Vec<u8> {
        match &self.adjacency {
            Adjacency::Dense(m) => dense_levels(m, self.vertex_count(), source),
            Adjacency::Lists(_) => self.bfs_levels(source),
        }
    }

    fn bfs_levels(&self, source: usize) -> Vec<u8> {
        let mut dist = vec![UNREACHABLE; self.vertex_count()];
        let mut queue = std::collections::VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let next = dist[u].saturating_add(1).min(UNREACHABLE - 1);
            for w in self.neighbors(u) {
                if dist[w] == UNREACHABLE {
                    dist[w] = next;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

/// Level-synchronous BFS on bit rows: an unvisited vertex joins the next level
/// iff its row meets the current frontier.
fn dense_levels(m: &BitMatrix, count: usize, source: usize) -> Vec<u8> {
    let mut dist = vec![UNREACHABLE; count];
    dist[source] = 0;
    // the first level is just the source row
    let frontier_row = m.row(source);
    let mut any = false;
    for (v, d) in dist.iter_mut().enumerate() {
        if v != source && frontier_row[v / 64] >> (v % 64) & 1 == 1 {
            *d = 1;
            any = true;
        }
    }
    if !any {
        return dist;
    }
    let mut frontier = frontier_row.to_vec();
    let mut level = 1u8;
    loop {
        level += 1;
        let mut next = vec![0u64; m.words];
        let mut grew = false;
        for (v, d) in dist.iter_mut().enumerate() {
            if *d != UNREACHABLE {
                continue;
            }
            if m.row(v).iter().zip(&frontier).any(|(a, b)| a & b != 0) {
                *d = level;
                set_bit(&mut next, v);
                grew = true;
            }
        }
        if !grew || level == UNREACHABLE - 1 {
            return dist;
        }
        frontier = next;
    }
}

/// Exact distances from `v` to every vertex.
///
/// The diameter of these graphs is at most 3, so a larger or missing distance
/// is reported as an internal-consistency failure.
pub fn distances_from(g: &ZDGraph, v: usize) -> Result<Vec<u8>> {
    g.check_vertex(v)?;
    let dist = g.levels(v);
    check_small_diameter(&dist, v)?;
    Ok(dist)
}

/// Plain queue-based BFS on neighbour lists; the reference path for tests.
pub fn distances_from_bfs(g: &ZDGraph, v: usize) -> Result<Vec<u8>> {
    g.check_vertex(v)?;
    Ok(g.bfs_levels(v))
}

fn check_small_diameter(dist: &[u8], source: usize) -> Result<()> {
    if let Some((w, &d)) = dist.iter().enumerate().find(|(_, &d)| d > 3) {
        let what = if d == UNREACHABLE {
            "unreachable".to_string()
        } else {
            format!("at distance {d}")
        };
        return Err(inconsistent(format!(
            "vertex {w} is {what} from vertex {source}; diameter must be at most 3"
        )));
    }
    Ok(())
}

/// Ordered vertex pairs by distance.
#[derive(Debug, Clone, PartialEq, Eq, Default, serde::Serialize)]
pub struct DistanceSummary {
    pub d1: Count,
    pub d2: Count,
    pub d3: Count,
    pub unreachable: Count,
}

/// Per-vertex transmissions and the multiset of their values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransmissionTable {
    pub per_vertex: Vec<u64>,
    /// Distinct transmission value -> number of vertices having it.
    pub values: BTreeMap<u64, usize>,
}

/// Everything the oracle derives from one all-pairs distance pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphStats {
    pub transmissions: TransmissionTable,
    pub histogram: DistanceSummary,
    /// Per vertex, how many vertices lie at distance 3.
    pub far_counts: Vec<u64>,
}

impl GraphStats {
    /// `W = (Σ Tr) / 2`, with the doubled sum checked for evenness.
    pub fn wiener(&self) -> Result<Count> {
        if !self.histogram.unreachable.is_zero() {
            return Err(inconsistent("graph is disconnected; Wiener index undefined"));
        }
        let doubled: u128 = self.transmissions.per_vertex.iter().map(|&t| u128::from(t)).sum();
        if !doubled.is_multiple_of(2) {
            return Err(inconsistent(format!("sum of transmissions {doubled} is odd")));
        }
        Ok(Count::from(num_bigint::BigUint::from(doubled / 2)))
    }

    pub fn complexity(&self) -> u64 {
        self.transmissions.values.len() as u64
    }
}

/// One all-pairs pass: transmissions, distance histogram, distance-3 counts.
pub fn analyze(g: &ZDGraph) -> Result<GraphStats> {
    let n = g.vertex_count();
    let rows: Vec<(u64, [u64; 4], u64)> = (0..n)
        .into_par_iter()
        .map(|s| {
            let dist = g.levels(s);
            let mut hist = [0u64; 4];
            let mut tr = 0u64;
            let mut unreachable = 0u64;
            for &d in &dist {
                match d {
                    0 => {}
                    1..=3 => {
                        hist[d as usize] += 1;
                        tr += u64::from(d);
                    }
                    UNREACHABLE => unreachable += 1,
                    _ => {
                        return Err(inconsistent(format!(
                            "distance {d} from vertex {s}; diameter must be at most 3"
                        )))
                    }
                }
            }
            Ok((tr, hist, unreachable))
        })
        .collect::<Result<_>>()?;

    let mut hist = [0u64; 4];
    let mut unreachable = 0u64;
    let mut per_vertex = Vec::with_capacity(n);
    let mut far_counts = Vec::with_capacity(n);
    let mut values = BTreeMap::new();
    for (tr, h, u) in rows {
        for d in 1..4 {
            hist[d] += h[d];
        }
        unreachable += u;
        per_vertex.push(tr);
        far_counts.push(h[3]);
        *values.entry(tr).or_insert(0) += 1;
    }
    let pairs = (n as u64) * (n as u64).saturating_sub(1);
    if hist[1] + hist[2] + hist[3] + unreachable != pairs {
        return Err(inconsistent("distance histogram does not cover all ordered pairs"));
    }
    Ok(GraphStats {
        transmissions: TransmissionTable { per_vertex, values },
        histogram: DistanceSummary {
            d1: hist[1].into(),
            d2: hist[2].into(),
            d3: hist[3].into(),
            unreachable: unreachable.into(),
        },
        far_counts,
    })
}

/// Wiener index by exhaustive distance computation.
pub fn wiener_oracle(g: &ZDGraph) -> Result<Count> {
    analyze(g)?.wiener()
}

pub fn transmission_table(g: &ZDGraph) -> Result<TransmissionTable> {
    Ok(analyze(g)?.transmissions)
}

/// Number of distinct transmissions; 0 for the empty graph.
pub fn wiener_complexity_oracle(g: &ZDGraph) -> Result<u64> {
    Ok(analyze(g)?.complexity())
}

pub fn distance_histogram(g: &ZDGraph) -> Result<DistanceSummary> {
    Ok(analyze(g)?.histogram)
}

fn is_unit_part(m: &crate::matring::Matrix, f: &crate::matring::Factor) -> bool {
    mat_rank(m, &f.field) == f.n
}

/// Distance between two distinct vertices decided structurally, without search:
/// 1 if they annihilate each other on either side; 3 if in every factor one of
/// them is a unit while some factor has both nonzero; 2 otherwise.
pub fn classify_distance(r: &RingSpec, a: &RingElem, b: &RingElem) -> Result<u8> {
    for (name, x) in [("first", a), ("second", b)] {
        if x.is_zero() {
            return Err(invalid(format!("{name} element is zero, not a vertex")));
        }
        let all_units = x.parts.iter().zip(r.factors()).all(|(m, f)| is_unit_part(m, f));
        if all_units {
            return Err(invalid(format!("{name} element is a unit, not a vertex")));
        }
    }
    if a == b {
        return Err(invalid("elements must be distinct"));
    }
    if ring_mul(a, b, r)?.is_zero() || ring_mul(b, a, r)?.is_zero() {
        return Ok(1);
    }
    let covered = a
        .parts
        .iter()
        .zip(&b.parts)
        .zip(r.factors())
        .all(|((x, y), f)| is_unit_part(x, f) || is_unit_part(y, f));
    let overlap = a
        .parts
        .iter()
        .zip(&b.parts)
        .any(|(x, y)| !x.is_zero() && !y.is_zero());
    Ok(if covered && overlap { 3 } else { 2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matring::{element_from_index, parse_ring_spec, Matrix};

    fn graph(s: &str) -> ZDGraph {
        build_graph(&parse_ring_spec(s).unwrap(), &GraphOptions::default()).unwrap()
    }

    fn field_elem(r: &RingSpec, bits: [u32; 3]) -> RingElem {
        let _ = r;
        RingElem::new(bits.iter().map(|&b| Matrix::from_codes(1, &[b]).unwrap()).collect())
    }

    #[test]
    fn vertex_counts() {
        assert_eq!(graph("M2(2)").vertex_count(), 9);
        let g = graph("M1(2)xM1(2)");
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(graph("M2(2)xM2(2)").vertex_count(), 219);
        assert_eq!(graph("M1(7)").vertex_count(), 0);
    }

    #[test]
    fn budget_errors_report_vertex_count() {
        let options = GraphOptions {
            limits: Limits {
                max_vertices: 100,
                ..Limits::default()
            },
            ..GraphOptions::default()
        };
        match build_graph(&parse_ring_spec("M2(2)xM2(2)").unwrap(), &options) {
            Err(Error::ResourceLimit { requested, .. }) => assert_eq!(requested, "219"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            build_graph(&parse_ring_spec("M5(2)").unwrap(), &GraphOptions::default()),
            Err(Error::ResourceLimit { what: "ring order", .. })
        ));
    }

    #[test]
    fn three_fields_fixture() {
        let r = parse_ring_spec("M1(2)xM1(2)xM1(2)").unwrap();
        let g = build_graph(&r, &GraphOptions::default()).unwrap();
        assert_eq!(g.vertex_count(), 6);
        // (1,1,0) has index 3, (0,1,1) has index 6
        let a = g.vertex_of_index(3).unwrap();
        let b = g.vertex_of_index(6).unwrap();
        let d = distances_from(&g, a).unwrap();
        assert_eq!(d[a], 0);
        assert_eq!(d[b], 3);
        let stats = analyze(&g).unwrap();
        assert_eq!(stats.wiener().unwrap(), 27u64);
        assert_eq!(
            (stats.histogram.d1.clone(), stats.histogram.d2.clone(), stats.histogram.d3.clone()),
            (12u64.into(), 12u64.into(), 6u64.into())
        );
        let expected: BTreeMap<u64, usize> = [(7, 3), (11, 3)].into_iter().collect();
        assert_eq!(stats.transmissions.values, expected);
        assert_eq!(classify_distance(&r, &field_elem(&r, [1, 1, 0]), &field_elem(&r, [0, 1, 1])).unwrap(), 3);
        assert_eq!(classify_distance(&r, &field_elem(&r, [1, 0, 0]), &field_elem(&r, [0, 1, 0])).unwrap(), 1);
    }

    #[test]
    fn two_by_two_fixture() {
        let g = graph("M2(2)");
        let stats = analyze(&g).unwrap();
        assert_eq!(stats.wiener().unwrap(), 51u64);
        assert!(stats.histogram.d3.is_zero());
        let expected: BTreeMap<u64, usize> = [(11, 6), (12, 3)].into_iter().collect();
        assert_eq!(stats.transmissions.values, expected);
        assert_eq!(stats.complexity(), 2);
        assert_eq!(g.edge_count(), 21);
        assert_eq!(g.squarezero_count(), 3);
        for v in 0..g.vertex_count() {
            let d = distances_from(&g, v).unwrap();
            for w in 0..g.vertex_count() {
                if w != v && !g.adjacent(v, w) {
                    assert_eq!(d[w], 2);
                }
            }
        }
        let r = g.ring();
        let e11 = RingElem::new(vec![Matrix::unit(2, 0, 0)]);
        let e11_e12 = RingElem::new(vec![Matrix::from_codes(2, &[1, 1, 0, 0]).unwrap()]);
        assert_eq!(classify_distance(r, &e11, &e11_e12).unwrap(), 2);
    }

    #[test]
    fn single_edge_fixture() {
        let g = graph("M1(2)xM1(2)");
        let stats = analyze(&g).unwrap();
        assert_eq!(stats.wiener().unwrap(), 1u64);
        assert_eq!(stats.transmissions.values, [(1, 2)].into_iter().collect());
        assert_eq!(stats.complexity(), 1);
    }

    #[test]
    fn empty_graph_conventions() {
        let g = graph("M1(5)");
        let stats = analyze(&g).unwrap();
        assert_eq!(stats.wiener().unwrap(), 0u64);
        assert_eq!(stats.complexity(), 0);
        assert!(distances_from(&g, 0).is_err());
    }

    #[test]
    fn classify_distance_rejects_non_vertices() {
        let r = parse_ring_spec("M1(2)xM1(2)xM1(2)").unwrap();
        let zero = field_elem(&r, [0, 0, 0]);
        let one = field_elem(&r, [1, 1, 1]);
        let v = field_elem(&r, [1, 0, 0]);
        assert!(classify_distance(&r, &zero, &v).is_err());
        assert!(classify_distance(&r, &v, &one).is_err());
        assert!(classify_distance(&r, &v, &v).is_err());
    }

    #[test]
    fn list_path_matches_dense_path() {
        let r = parse_ring_spec("M1(3)xM2(2)").unwrap();
        let dense = build_graph(&r, &GraphOptions::default()).unwrap();
        let lists = build_graph(
            &r,
            &GraphOptions {
                dense_threshold: 0,
                ..GraphOptions::default()
            },
        )
        .unwrap();
        assert!(dense.is_dense() && !lists.is_dense());
        assert_eq!(dense.edges(), lists.edges());
        assert_eq!(analyze(&dense).unwrap(), analyze(&lists).unwrap());
        for v in 0..dense.vertex_count() {
            assert_eq!(distances_from(&dense, v).unwrap(), distances_from_bfs(&dense, v).unwrap());
        }
    }

    #[test]
    fn vertices_are_sorted_codec_indices() {
        let g = graph("M1(3)xM2(2)");
        let r = g.ring().clone();
        assert!(g.vertices.windows(2).all(|w| w[0] < w[1]));
        for v in 0..g.vertex_count() {
            let x = element_from_index(g.element_index(v), &r).unwrap();
            assert_eq!(&crate::matring::rank_profile(&x, &r).unwrap(), g.class_of(v));
        }
    }
}
