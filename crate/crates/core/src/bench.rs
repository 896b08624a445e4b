//! Artificial reconstruction data and comparison metrics.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;

use crate::cost::{CostFunction, DistanceMatrix, ExplicitCosts};
use crate::mutation::{k_mutation, mutation_path_bound, FatTailK};
use crate::quartet::QuartetTopology;
use crate::search::KCount;
use crate::tree::Tree;
use crate::{Error, Result};

/// `d(a, b) = (L(a, b) + 1) / n` off the diagonal, where `L` counts edges on
/// the path between leaves.
pub fn artificial_metric(tree: &Tree) -> DistanceMatrix {
    let n = tree.leaf_count();
    let len = tree.leaf_path_lengths();
    DistanceMatrix::from_fn(n, |a, b| (len[a * n + b] as f64 + 1.0) / n as f64)
        .expect("path-length metric is a valid matrix")
}

/// Scrambles the caterpillar with `num_mutations` k-mutations and returns
/// it together with its path-length metric.
pub fn generate_artificial<R: Rng + ?Sized>(
    n: usize,
    num_mutations: u64,
    rng: &mut R,
) -> Result<(Tree, DistanceMatrix)> {
    let mut tree = Tree::caterpillar(n)?;
    let fat = FatTailK::new();
    let max_k = (mutation_path_bound(n) as u64).max(4);
    for _ in 0..num_mutations {
        let k = fat.sample_bounded(rng, max_k);
        k_mutation(&mut tree, k, rng)?;
    }
    let d = artificial_metric(&tree);
    Ok((tree, d))
}

/// Five objects `u, v, w, x, y = 0..5` whose cheapest tree cannot reach
/// score 1: `uv|wx` costs `1 - eps`, six topologies that no single tree
/// embeds together cost 0, and everything else costs 1.
pub fn five_leaf_trap(eps: f64) -> Result<CostFunction> {
    let (u, v, w, x, y) = (0, 1, 2, 3, 4);
    let free = [(u, w, x, v), (u, x, v, w), (x, y, u, v), (w, y, u, v), (u, y, w, x), (v, y, w, x)];
    let mut zero = Vec::new();
    for (a, b, c, d) in free {
        zero.push(QuartetTopology::new(a, b, c, d)?);
    }
    let special = QuartetTopology::new(u, v, w, x)?;
    let costs = ExplicitCosts::from_fn(5, |t| {
        if *t == special {
            1.0 - eps
        } else if zero.contains(t) {
            0.0
        } else {
            1.0
        }
    })?;
    Ok(CostFunction::Explicit(costs))
}

/// The optimum of [`five_leaf_trap`]: `y` next to the cherries `(u, v)` and
/// `(w, x)`.
pub fn five_leaf_trap_optimum() -> Tree {
    Tree::from_edges(5, &[(5, 0), (5, 1), (5, 7), (7, 4), (7, 6), (6, 2), (6, 3)]).expect("valid tree")
}

/// `R(T) = 1 - S(T)`.
pub fn room_for_improvement(s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidInput(alloc::format!("score {s} outside [0, 1]")));
    }
    Ok(1.0 - s)
}

/// `10 log10(r_other / r_ours)`: positive when ours leaves less room for
/// improvement. Infinite when exactly one side is zero, 0 when both are.
pub fn db_gain(r_other: f64, r_ours: f64) -> f64 {
    match (r_other == 0.0, r_ours == 0.0) {
        (true, true) => 0.0,
        (_, true) => f64::INFINITY,
        (true, false) => f64::NEG_INFINITY,
        _ => 10.0 * libm::log10(r_other / r_ours),
    }
}

/// One histogram bar: `[lower, lower + width)` holding `count` values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bin {
    pub lower: u64,
    pub count: u64,
    pub fraction: f64,
}

/// Fixed-width histogram from 0 to the largest value.
pub fn histogram(values: &[u64], width: u64) -> Result<Vec<Bin>> {
    if values.is_empty() {
        return Err(Error::InvalidInput("histogram of no values".into()));
    }
    if width == 0 {
        return Err(Error::InvalidInput("histogram bin width must be positive".into()));
    }
    let max = *values.iter().max().expect("nonempty");
    let bins = (max / width + 1) as usize;
    let mut counts = alloc::vec![0u64; bins];
    for &v in values {
        counts[(v / width) as usize] += 1;
    }
    let total = values.len() as f64;
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| Bin { lower: i as u64 * width, count, fraction: count as f64 / total })
        .collect())
}

/// Mass function as `(k, p)` pairs.
pub type Pmf = Vec<(u64, f64)>;

/// Normalized mass functions of accepted and rejected mutation lengths,
/// pooled over several runs. A side with no events yields an empty list.
pub fn k_pmfs<'a>(stats: impl IntoIterator<Item = &'a BTreeMap<u64, KCount>>) -> (Pmf, Pmf) {
    let mut pooled: BTreeMap<u64, KCount> = BTreeMap::new();
    for s in stats {
        for (&k, c) in s {
            let e = pooled.entry(k).or_default();
            e.accepted += c.accepted;
            e.rejected += c.rejected;
        }
    }
    let normalize = |pick: fn(&KCount) -> u64| {
        let total: u64 = pooled.values().map(pick).sum();
        if total == 0 {
            return Vec::new();
        }
        pooled
            .iter()
            .filter(|(_, c)| pick(c) > 0)
            .map(|(&k, c)| (k, pick(c) as f64 / total as f64))
            .collect()
    };
    (normalize(|c| c.accepted), normalize(|c| c.rejected))
}
