//! Clique-difference structure of nested graph chains.
//!
//! For a strictly nested chain `G_1 ⊊ G_2 ⊊ ... ⊊ G_r` of graphs on `{1..n}`,
//! the *derived graph* on `{1..r}` joins `i < j` whenever `G_j \ G_i` is a
//! clique. This crate builds derived graphs, checks their structural lemmas,
//! extracts certified independent sets of size at least `ceil(floor(r/3)/2)`
//! (and `(r-2)/18` by a simpler greedy), computes exact independence numbers,
//! and searches for chains with small independence ratio.
//!
//! ```
//! use chaincliq::{build_difference_graph, random_chain, alon_witness, StepDistribution};
//!
//! let chain = random_chain(5, 10, StepDistribution::Single, 7).unwrap();
//! let dg = build_difference_graph(&chain);
//! let w = alon_witness(&dg).unwrap();
//! assert!(w.len() >= 2);
//! ```

pub mod chain;
pub mod derived;
pub mod error;
pub mod graph;
mod json;
pub mod oracle;
pub mod search;
pub mod witness;

pub use chain::{
    enumerate_chains, enumerate_chains_from, random_chain, read_chain, relabel_chain,
    reverse_chain, shard_first_graphs, validate_chain, write_chain, GraphChain, StepDistribution,
};
pub use derived::{
    build_difference_graph, find_triangle, neighbor_counts, read_dgraph, verify_lemma_123,
    verify_lemma_abcd, write_dgraph, DifferenceGraph, LemmaKind, LemmaViolation,
};
pub use error::{Error, Result};
pub use graph::{
    edge_difference, is_clique, is_subgraph, make_graph, Edge, EdgeSet, Graph, VertexSet,
};
pub use oracle::{
    family_has_clique_pair, max_cliquepair_free_family, max_independent_set,
    naive_max_independent_set, verify_theorem_exhaustive, FamilyReport, OracleReport,
    TheoremReport,
};
pub use search::{
    append_record, load_records, local_search_min_ratio, read_record, write_record, SearchConfig,
    SearchRecord,
};
pub use witness::{
    alon_witness, best_witness, check_independent, greedy_good_witness, read_witness,
    write_witness, Method, WitnessSet,
};

/// Exact rational used for guarantees and ratios.
pub type Rational = num_rational::Ratio<u64>;
