//! Minimum quartet tree cost clustering.
//!
//! Builds an unrooted ternary tree over `n` labeled objects that minimizes
//! the summed cost of its embedded quartet topologies. The search is a
//! randomized hill climber over k-mutations, optionally with a Metropolis
//! walk per trial, and uses an `O(n^3)` scorer when the quartet costs come
//! from a distance matrix.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, compressors,
//! threading and the command line live in the `qtree` crate.

#![no_std]

extern crate alloc;

pub mod bench;
pub mod cost;
mod error;
pub mod exact;
pub mod fast_cost;
pub mod mutation;
pub mod ncd;
pub mod quartet;
pub mod search;
pub mod tree;

pub use cost::{CostFunction, DistanceMatrix, ExplicitCosts, ScoreBounds};
pub use error::{Error, Result};
pub use mutation::{MutationKind, MutationRecord};
pub use quartet::{Quartet, QuartetTopology};
pub use search::{SearchConfig, SearchResult};
pub use tree::{Label, NodeId, Tree};

/// `n choose k` for small arguments.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::binomial;

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 4), 1);
        assert_eq!(binomial(5, 4), 5);
        assert_eq!(binomial(10, 4), 210);
        assert_eq!(binomial(32, 4), 35960);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(7, 2), 21);
    }
}
