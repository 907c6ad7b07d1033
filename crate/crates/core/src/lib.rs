//! Zero-divisor graphs of finite semisimple rings `M_{n_1}(GF(q_1)) × ... × M_{n_l}(GF(q_l))`.
//!
//! Two independent sides:
//!
//! * [`formulas`] and [`qcount`] evaluate closed forms for vertex counts,
//!   degrees, distance-pair counts and the Wiener index;
//! * [`zdgraph`] builds the graph by brute force and measures the same
//!   quantities by breadth-first search.
//!
//! All counts are exact ([`Count`] wraps an arbitrary-precision integer).

pub mod error;
pub mod ffield;
pub mod formulas;
pub mod matring;
pub mod polyrec;
pub mod qcount;
pub mod zdgraph;

pub use error::{Error, Result};
pub use ffield::{field_add, field_build, field_inv, field_mul, field_of_order, FieldElem, FieldSpec};
pub use formulas::{
    ann_size_simple, annihilator_sizes, complexity_upper_bound, d3_pair_count, degree_formula, n2_count,
    s_value, t_value, transmission_simple, vertex_classes, wiener_complexity_simple, wiener_semisimple,
    wiener_simple, WienerResult,
};
pub use matring::{
    annihilator_census, classify_element, element_from_index, element_index, mat_mul, mat_rank, parse_ring_spec,
    rank_profile, ring_mul, AnnCensus, ElementKind, Factor, Limits, Matrix, RingElem, RingSpec, VertexClass,
};
pub use polyrec::{evaluate_polynomial, wiener_simple_polynomial, RationalPoly};
pub use qcount::{gaussian_binomial, gl_order, rank_count, squarezero_rank_count, zero_divisor_count, Count, QParams};
pub use zdgraph::{
    analyze, build_graph, classify_distance, distance_histogram, distances_from, transmission_table,
    wiener_complexity_oracle, wiener_oracle, DistanceSummary, GraphOptions, GraphStats, TransmissionTable, ZDGraph,
};
