//! `O(n^3)` tree cost for distance-backed quartet costs.
//!
//! Root the tree at an internal node `p` with incident edges `e1, e2, e3`
//! whose subtrees hold `n1, n2, n3` leaves. Every leaf pair `(u, v)` split
//! across two of those subtrees pairs with each of the `C(n_i, 2)` leaf pairs
//! of the third subtree into an embedded topology `uv|wx`, contributing
//! `d(u, v)` once. Summing
//!
//! ```text
//! C(p) = sum_i C(n_i, 2) * sum_{u in T_j, v in T_k} d(u, v)
//! ```
//!
//! over all internal nodes counts each half of each embedded topology
//! exactly once, so `C_T = sum_p C(p)`.
//!
//! The per-pair multiplicities are integers; they are accumulated first and
//! the weighted distance sum is then formed exactly, which makes the result
//! bit-identical to the naive scorer.

use alloc::vec;
use alloc::vec::Vec;

use crate::cost::DistanceMatrix;
use crate::exact::ExactSum;
use crate::tree::{Label, NodeId, Tree};
use crate::{Error, Result};

fn pairs(k: usize) -> u64 {
    (k as u64) * (k as u64).saturating_sub(1) / 2
}

/// Leaf sets of the three subtrees around internal node `p`, in the order
/// of `p`'s neighbor list.
pub fn subtree_leaf_sets(tree: &Tree, p: NodeId) -> Result<[Vec<Label>; 3]> {
    if p >= tree.node_count() || tree.is_leaf(p) {
        return Err(Error::InvalidNode(p));
    }
    let nb = tree.neighbors(p);
    Ok([
        tree.subtree_leaves(nb[0], p),
        tree.subtree_leaves(nb[1], p),
        tree.subtree_leaves(nb[2], p),
    ])
}

/// `(n1, n2, n3)` for internal node `p`.
pub fn subtree_leaf_counts(tree: &Tree, p: NodeId) -> Result<[usize; 3]> {
    let sets = subtree_leaf_sets(tree, p)?;
    Ok([sets[0].len(), sets[1].len(), sets[2].len()])
}

/// Multiplicity of `d(u, v)` in `C_T` for every pair, row-major with only
/// `u < v` filled in.
pub fn pair_weights(tree: &Tree) -> Vec<u64> {
    let n = tree.leaf_count();
    let mut weights = vec![0u64; n * n];
    for p in tree.internal_nodes() {
        let sets = subtree_leaf_sets(tree, p).expect("internal node");
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let w = pairs(sets[i].len());
            if w == 0 {
                continue;
            }
            for &u in &sets[j] {
                for &v in &sets[k] {
                    let (a, b) = if u < v { (u, v) } else { (v, u) };
                    weights[a * n + b] += w;
                }
            }
        }
    }
    weights
}

/// `C(p)` for one internal node, correctly rounded.
pub fn node_cost(tree: &Tree, dm: &DistanceMatrix, p: NodeId) -> Result<f64> {
    check_dims(tree, dm)?;
    let sets = subtree_leaf_sets(tree, p)?;
    let mut acc = ExactSum::new();
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let w = pairs(sets[i].len()) as f64;
        for &u in &sets[j] {
            for &v in &sets[k] {
                acc.add_product(w, dm.get(u, v));
            }
        }
    }
    Ok(acc.value())
}

fn check_dims(tree: &Tree, dm: &DistanceMatrix) -> Result<()> {
    if tree.leaf_count() != dm.size() {
        return Err(Error::InvalidInput(alloc::format!(
            "tree has {} leaves but the matrix is {}x{}",
            tree.leaf_count(),
            dm.size(),
            dm.size()
        )));
    }
    Ok(())
}

/// `C_T` via the internal-node decomposition.
pub fn tree_cost_fast(tree: &Tree, dm: &DistanceMatrix) -> Result<f64> {
    check_dims(tree, dm)?;
    let n = tree.leaf_count();
    let weights = pair_weights(tree);
    let mut acc = ExactSum::new();
    for u in 0..n {
        let row = dm.row(u);
        for v in u + 1..n {
            let w = weights[u * n + v];
            if w != 0 {
                acc.add_product(w as f64, row[v]);
            }
        }
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{tree_cost_naive, CostFunction};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = Tree::random(9, &mut rng).unwrap();
        assert_eq!(tree_cost_fast(&t, &DistanceMatrix::zeros(9)).unwrap(), 0.0);
    }

    #[test]
    fn four_leaves() {
        let t = Tree::from_edges(4, &[(4, 0), (4, 1), (4, 5), (5, 2), (5, 3)]).unwrap();
        let d = DistanceMatrix::from_fn(4, |i, j| match (i, j) {
            (0, 1) => 1.0,
            (2, 3) => 2.0,
            _ => 0.37 * (i + 3 * j) as f64,
        })
        .unwrap();
        assert_eq!(tree_cost_fast(&t, &d).unwrap(), 3.0);
        for p in t.internal_nodes() {
            let mut c = subtree_leaf_counts(&t, p).unwrap();
            c.sort_unstable();
            assert_eq!(c, [1, 1, 2]);
        }
    }

    #[test]
    fn leaf_is_not_a_valid_node() {
        let t = Tree::caterpillar(6).unwrap();
        assert_eq!(subtree_leaf_counts(&t, 3), Err(Error::InvalidNode(3)));
    }

    #[test]
    fn caterpillar_middle_node() {
        let t = Tree::caterpillar(6).unwrap();
        let mid = t.parent(2);
        let sets = subtree_leaf_sets(&t, mid).unwrap();
        let mut all: Vec<Label> = sets.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..6).collect::<Vec<_>>());
        let mut c = subtree_leaf_counts(&t, mid).unwrap();
        c.sort_unstable();
        assert_eq!(c, [1, 2, 3]);
    }

    #[test]
    fn star_adjacent_node_in_five() {
        let t = Tree::caterpillar(5).unwrap();
        let mut c = subtree_leaf_counts(&t, t.parent(0)).unwrap();
        c.sort_unstable();
        assert_eq!(c, [1, 1, 3]);
    }

    #[test]
    fn node_costs_sum_to_tree_cost() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let t = Tree::random(10, &mut rng).unwrap();
        let d = DistanceMatrix::from_fn(10, |_, _| rng.gen()).unwrap();
        let total: f64 = t.internal_nodes().map(|p| node_cost(&t, &d, p).unwrap()).sum();
        let naive = tree_cost_naive(&t, &CostFunction::Distance(d.clone())).unwrap();
        assert!((total - naive).abs() <= 1e-9 * naive.abs().max(1.0));
        assert_eq!(tree_cost_fast(&t, &d).unwrap().to_bits(), naive.to_bits());
    }

    #[test]
    fn dimension_mismatch() {
        let t = Tree::caterpillar(6).unwrap();
        assert!(matches!(tree_cost_fast(&t, &DistanceMatrix::zeros(5)), Err(Error::InvalidInput(_))));
    }
}
