//! Exact and simulated laws of random spanning trees under random edge weights, and of the
//! induced laws on orderings (word maps, draw matrices, dimension bounds).

pub mod error;
pub mod graph;
pub mod linalg;
pub mod locus;
pub mod mst_exact;
pub mod poly;
pub mod rational;
pub mod rotations;
pub mod sampler;
pub mod shift_exact;
pub mod word_maps;

pub use error::{Error, Result};
pub use graph::{EdgeSet, Graph};
pub use mst_exact::TreeDistribution;
pub use rational::Rational;

/// Budgets for the exhaustive enumerations. Every default can be raised per call.
#[derive(Clone, Debug)]
pub struct Limits {
    /// Orders of tree edges summed by the internal formula.
    pub max_internal_terms: u128,
    /// Orders of non-edges summed by the external formula.
    pub max_external_terms: u128,
    /// Edge permutations walked by the brute-force oracle.
    pub max_brute_perms: u128,
    /// Spanning trees materialised by distribution-valued operations.
    pub max_trees: usize,
    /// Folded permutations walked by the path-rotation algorithm.
    pub max_folded: u128,
    /// Edges (variables) accepted by the exact product-measure engine.
    pub max_exact_edges: usize,
}

impl Default for Limits {
    fn default() -> Self {
        let f10 = 3_628_800;
        Limits {
            max_internal_terms: f10,
            max_external_terms: f10,
            max_brute_perms: f10,
            max_trees: 20_000,
            max_folded: 2_000_000,
            max_exact_edges: 8,
        }
    }
}

pub(crate) fn factorial_u128(n: usize) -> u128 {
    (1..=n as u128)
        .try_fold(1u128, |acc, k| acc.checked_mul(k))
        .unwrap_or(u128::MAX)
}
