//! Labeling graphs with distinct positive integers so that the labels of
//! every edge's endpoints sum to a prime.
//!
//! Such a labeling exists exactly when the graph is bipartite. One
//! direction is an exercise in parity: distinct positive labels on an odd
//! cycle force two adjacent labels of equal parity, whose sum is an even
//! number greater than 2. The other direction is constructive and runs
//! through complete bipartite graphs: any bipartite graph on sides of size
//! m and n is a subgraph of K_{m,n}, and K_{m,n} can be labeled from a
//! sufficiently long arithmetic progression of primes so that every edge
//! sum lands on a term of the progression ([`construct_labeling`]).
//!
//! The pieces:
//!
//! - [`primes`]: deterministic Miller-Rabin for u64, bit-packed sieve,
//!   segmented sieve for scanning windows far from the origin.
//! - [`ap`]: search for arithmetic progressions of primes with a given
//!   length, lexicographically minimal in (d, p), with an explicit budget
//!   box and an on-disk cache.
//! - [`graph`]: small dense graph type, generators (complete bipartite,
//!   hypercube, cycles, cliques), BFS bipartition that produces either a
//!   2-coloring or an odd-cycle certificate, the parity embedding of Q_n
//!   into K_{2^(n-1),2^(n-1)}, and edge-list I/O.
//! - [`labeling`]: construction plans, the strict and windowed K_{m,n}
//!   constructions, the independent verifier, and JSON (de)serialization.
//! - [`oracle`]: exhaustive backtracking labeler (ground truth for small
//!   graphs) and Hamiltonian path enumeration.

pub mod ap;
pub mod error;
pub mod graph;
pub mod labeling;
pub mod oracle;
pub mod primes;

pub use ap::{
    find_ap, find_ap_from, find_ap_with_options, find_ap_with_p_gt_d, validate_ap, ApCache,
    ApSearchOutcome, ApValidation, PrimeAP, SearchBudget, SearchOptions, MAX_AP_LEN,
};
pub use error::{Error, Result};
pub use graph::{
    bipartition, check_coloring, check_odd_cycle, complete_bipartite, complete_graph, cycle_graph,
    embed_hypercube, hypercube, parse_edge_list, serialize_edge_list, BipartitionResult, Graph,
    HypercubeEmbedding, Side, MAX_HYPERCUBE_DIM,
};
pub use labeling::{
    construct_labeling, plan_construction, restrict_to_subgraph, verify_labeling,
    ConstructionPlan, Labeling, Mode, Provenance, VerifyReport, Violation,
};
pub use oracle::{
    brute_force_label, brute_force_label_with, check_paths_prime, enumerate_hamiltonian_paths,
    for_each_hamiltonian_path, OracleBudget, OracleOutcome, PathEnumeration, PathReport,
    PathViolation, MAX_ORACLE_LABEL,
};
pub use primes::{is_prime, primorial, primorial_up_to, sieve, PrimeTable, SegmentSieve};
