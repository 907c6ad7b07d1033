//! Closed-form counts against exhaustive enumeration of small matrix rings.

use zdgraph_algo::ffield::prime_power;
use zdgraph_algo::matring::{matrix_annihilator_census, rank_census};
use zdgraph_algo::*;

fn small_rings() -> Vec<(u32, u64)> {
    let mut out = Vec::new();
    for n in 1u32..=4 {
        for q in 2u64..=16 {
            if prime_power(q).is_some() && q.checked_pow(n * n).is_some_and(|o| o <= 1 << 16) {
                out.push((n, q));
            }
        }
    }
    out
}

#[test]
fn rank_and_unit_counts_match_enumeration() {
    for (n, q) in small_rings() {
        let f = field_of_order(q).unwrap();
        let census = rank_census(n as usize, &f, &Limits::default()).unwrap();
        for k in 0..=n {
            assert_eq!(census.by_rank[k as usize], rank_count(n, q, k).unwrap(), "n={n} q={q} k={k}");
            assert_eq!(
                census.squarezero_by_rank[k as usize],
                squarezero_rank_count(n, q, k).unwrap(),
                "n={n} q={q} k={k}"
            );
        }
        assert_eq!(census.units(), gl_order(n, q).unwrap());
        assert_eq!(census.zero_divisors(), zero_divisor_count(n, q).unwrap());
    }
}

#[test]
fn annihilator_sizes_match_census_on_every_matrix() {
    let limits = Limits::default();
    for (n, q) in small_rings().into_iter().filter(|&(n, q)| q.checked_pow(n * n).is_some_and(|o| o <= 1 << 12)) {
        let r = RingSpec::from_pairs(&[(n as usize, q)]).unwrap();
        let f = &r.factors()[0].field;
        for i in 0..r.order_u64().unwrap() {
            let x = element_from_index(i, &r).unwrap();
            let k = mat_rank(&x.parts[0], f) as u32;
            let census = matrix_annihilator_census(&x.parts[0], f, &limits).unwrap();
            assert_eq!(census, annihilator_sizes(n, q, k).unwrap(), "n={n} q={q} #{i}");
            if k >= 1 {
                let union = census.left.clone() + census.right.clone();
                let union = union.checked_sub(&census.twosided).unwrap();
                assert_eq!(union, ann_size_simple(n, q, k).unwrap());
            }
        }
    }
}

#[test]
fn product_ring_census_factorises() {
    let limits = Limits::default();
    let r = parse_ring_spec("M2(2)xM1(3)").unwrap();
    for i in 0..r.order_u64().unwrap() {
        let x = element_from_index(i, &r).unwrap();
        let whole = annihilator_census(&x, &r, &limits).unwrap();
        let parts: Vec<AnnCensus> = x
            .parts
            .iter()
            .zip(r.factors())
            .map(|(m, f)| matrix_annihilator_census(m, &f.field, &limits).unwrap())
            .collect();
        let prod = |g: fn(&AnnCensus) -> &Count| parts.iter().map(|c| g(c).clone()).product::<Count>();
        assert_eq!(whole.left, prod(|c| &c.left));
        assert_eq!(whole.right, prod(|c| &c.right));
        assert_eq!(whole.twosided, prod(|c| &c.twosided));
    }
}
