//! Quartet topology costs, tree cost, normalization bounds and the
//! normalized benefit score `S(T) = (M - C_T) / (M - m)`.
//!
//! All sums are exact (see [`crate::exact`]), so a tree whose every embedded
//! topology is a per-quartet minimum scores exactly `1.0`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::binomial;
use crate::exact::{cmp_pair_sums, ExactSum};
use crate::fast_cost::tree_cost_fast;
use crate::quartet::{embedded_indices, Quartet, QuartetTopology};
use crate::tree::Tree;
use crate::{Error, Result};

/// Symmetric, nonnegative, zero-diagonal `n x n` matrix of finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates a row-major matrix.
    pub fn new(n: usize, data: Vec<f64>) -> Result<DistanceMatrix> {
        if data.len() != n * n {
            return Err(Error::InvalidInput(alloc::format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let v = data[i * n + j];
                if !v.is_finite() {
                    return Err(Error::InvalidInput(alloc::format!("entry ({i}, {j}) is not finite")));
                }
                if v < 0.0 {
                    return Err(Error::InvalidInput(alloc::format!("entry ({i}, {j}) is negative: {v}")));
                }
                if i == j && v != 0.0 {
                    return Err(Error::InvalidInput(alloc::format!("diagonal entry ({i}, {i}) is {v}, not 0")));
                }
                if v != data[j * n + i] {
                    return Err(Error::InvalidInput(alloc::format!(
                        "matrix is not symmetric: d({i}, {j}) = {v} but d({j}, {i}) = {}",
                        data[j * n + i]
                    )));
                }
            }
        }
        Ok(DistanceMatrix { n, data })
    }

    /// Builds the matrix from `f(i, j)` evaluated for `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<DistanceMatrix> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        DistanceMatrix::new(n, data)
    }

    pub fn zeros(n: usize) -> DistanceMatrix {
        DistanceMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

/// Explicit costs for all `3 C(n, 4)` topologies, stored flat by
/// `3 * quartet_rank + topology_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitCosts {
    n: usize,
    costs: Vec<f64>,
}

impl ExplicitCosts {
    pub fn from_fn(n: usize, mut f: impl FnMut(&QuartetTopology) -> f64) -> Result<ExplicitCosts> {
        if n < 4 {
            return Err(Error::InvalidSize(n));
        }
        let quartets = binomial(n as u64, 4) as usize;
        let mut costs = Vec::with_capacity(3 * quartets);
        for rank in 0..quartets {
            for topo in Quartet::from_rank(rank).topologies() {
                costs.push(f(&topo));
            }
        }
        Self::from_flat(n, costs)
    }

    pub fn from_flat(n: usize, costs: Vec<f64>) -> Result<ExplicitCosts> {
        if n < 4 {
            return Err(Error::InvalidSize(n));
        }
        let expected = 3 * binomial(n as u64, 4) as usize;
        if costs.len() != expected {
            return Err(Error::InvalidInput(alloc::format!(
                "expected {expected} topology costs, got {}",
                costs.len()
            )));
        }
        if let Some(i) = costs.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(alloc::format!(
                "cost of {} is not finite",
                Quartet::from_rank(i / 3).topology(i % 3)
            )));
        }
        Ok(ExplicitCosts { n, costs })
    }

    /// Builds the table from a mapping that must cover every topology.
    pub fn from_map(n: usize, map: &BTreeMap<QuartetTopology, f64>) -> Result<ExplicitCosts> {
        if n < 4 {
            return Err(Error::InvalidSize(n));
        }
        if let Some(topo) = map.keys().find(|t| t.max_label() >= n) {
            return Err(Error::InvalidLabel { label: topo.max_label(), n });
        }
        let quartets = binomial(n as u64, 4) as usize;
        let mut costs = Vec::with_capacity(3 * quartets);
        for rank in 0..quartets {
            for topo in Quartet::from_rank(rank).topologies() {
                match map.get(&topo) {
                    Some(&c) => costs.push(c),
                    None => return Err(Error::IncompleteCostFunction(topo)),
                }
            }
        }
        Self::from_flat(n, costs)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.costs
    }

    #[inline]
    pub fn get(&self, rank: usize, index: usize) -> f64 {
        self.costs[3 * rank + index]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CostFunction {
    Explicit(ExplicitCosts),
    /// `C(uv|wx) = d(u, v) + d(w, x)`.
    Distance(DistanceMatrix),
}

impl CostFunction {
    pub fn size(&self) -> usize {
        match self {
            CostFunction::Explicit(e) => e.size(),
            CostFunction::Distance(d) => d.size(),
        }
    }

    pub fn distances(&self) -> Option<&DistanceMatrix> {
        match self {
            CostFunction::Distance(d) => Some(d),
            CostFunction::Explicit(_) => None,
        }
    }
}

impl From<DistanceMatrix> for CostFunction {
    fn from(d: DistanceMatrix) -> Self {
        CostFunction::Distance(d)
    }
}

impl From<ExplicitCosts> for CostFunction {
    fn from(e: ExplicitCosts) -> Self {
        CostFunction::Explicit(e)
    }
}

/// Sum of per-quartet minimal (`min_cost`, m) and maximal (`max_cost`, M)
/// topology costs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreBounds {
    pub min_cost: f64,
    pub max_cost: f64,
}

impl ScoreBounds {
    /// Normalized score of a tree with cost `cost`. A degenerate cost
    /// function (`M == m`) makes every tree optimal, scored `1.0`.
    pub fn score(&self, cost: f64) -> f64 {
        if self.max_cost == self.min_cost {
            return 1.0;
        }
        (self.max_cost - cost) / (self.max_cost - self.min_cost)
    }
}

pub fn cost_of(cf: &CostFunction, topo: &QuartetTopology) -> Result<f64> {
    let n = cf.size();
    if topo.max_label() >= n {
        return Err(Error::InvalidLabel { label: topo.max_label(), n });
    }
    Ok(match cf {
        CostFunction::Explicit(e) => e.get(topo.quartet().rank(), topo.index()),
        CostFunction::Distance(d) => {
            let [[u, v], [w, x]] = topo.pairs();
            d.get(u, v) + d.get(w, x)
        }
    })
}

/// Cost 0 for every topology in `planted`, 1 for all others.
pub fn cost_from_mqc<'a>(
    n: usize,
    planted: impl IntoIterator<Item = &'a QuartetTopology>,
) -> Result<CostFunction> {
    if n < 4 {
        return Err(Error::InvalidSize(n));
    }
    let quartets = binomial(n as u64, 4) as usize;
    let mut costs = vec![1.0; 3 * quartets];
    for topo in planted {
        if topo.max_label() >= n {
            return Err(Error::InvalidLabel { label: topo.max_label(), n });
        }
        costs[3 * topo.quartet().rank() + topo.index()] = 0.0;
    }
    Ok(CostFunction::Explicit(ExplicitCosts::from_flat(n, costs)?))
}

fn check_labels(tree: &Tree, cf: &CostFunction) -> Result<()> {
    if tree.leaf_count() != cf.size() {
        return Err(Error::InvalidInput(alloc::format!(
            "tree has {} leaves but the cost function covers {} objects",
            tree.leaf_count(),
            cf.size()
        )));
    }
    Ok(())
}

/// `C_T` by summing the cost of every embedded topology.
pub fn tree_cost_naive(tree: &Tree, cf: &CostFunction) -> Result<f64> {
    check_labels(tree, cf)?;
    let n = tree.leaf_count();
    let embedded = embedded_indices(tree);
    let mut acc = ExactSum::new();
    match cf {
        CostFunction::Explicit(e) => {
            for (rank, &idx) in embedded.iter().enumerate() {
                acc.add(e.get(rank, idx as usize));
            }
        }
        CostFunction::Distance(d) => {
            let mut rank = 0;
            for x in 3..n {
                for w in 2..x {
                    for v in 1..w {
                        for u in 0..v {
                            let (p, q) = match embedded[rank] {
                                0 => ((u, v), (w, x)),
                                1 => ((u, w), (v, x)),
                                _ => ((u, x), (v, w)),
                            };
                            acc.add(d.get(p.0, p.1));
                            acc.add(d.get(q.0, q.1));
                            rank += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(acc.value())
}

/// m and M for a complete cost function.
pub fn bounds(cf: &CostFunction) -> ScoreBounds {
    let mut lo = ExactSum::new();
    let mut hi = ExactSum::new();
    match cf {
        CostFunction::Explicit(e) => {
            for triple in e.as_slice().chunks_exact(3) {
                let min = triple.iter().copied().fold(f64::INFINITY, f64::min);
                let max = triple.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                lo.add(min);
                hi.add(max);
            }
        }
        CostFunction::Distance(d) => {
            let n = d.size();
            for x in 3..n {
                for w in 2..x {
                    for v in 1..w {
                        for u in 0..v {
                            let pairs = [
                                (d.get(u, v), d.get(w, x)),
                                (d.get(u, w), d.get(v, x)),
                                (d.get(u, x), d.get(v, w)),
                            ];
                            let mut min = pairs[0];
                            let mut max = pairs[0];
                            for &p in &pairs[1..] {
                                if cmp_pair_sums(p.0, p.1, min.0, min.1) == Ordering::Less {
                                    min = p;
                                }
                                if cmp_pair_sums(p.0, p.1, max.0, max.1) == Ordering::Greater {
                                    max = p;
                                }
                            }
                            lo.add(min.0);
                            lo.add(min.1);
                            hi.add(max.0);
                            hi.add(max.1);
                        }
                    }
                }
            }
        }
    }
    ScoreBounds { min_cost: lo.value(), max_cost: hi.value() }
}

/// `S(T)` computed with the naive scorer.
pub fn score(tree: &Tree, cf: &CostFunction) -> Result<f64> {
    let c = tree_cost_naive(tree, cf)?;
    Ok(bounds(cf).score(c))
}

/// Which algorithm computes `C_T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScorerKind {
    /// Sum over all `C(n, 4)` embedded topologies.
    Naive,
    /// Internal-node decomposition, `O(n^3)`; needs distance-backed costs
    /// and falls back to [`ScorerKind::Naive`] otherwise.
    Fast,
}

/// A cost function together with its precomputed bounds.
#[derive(Debug, Clone)]
pub struct Scorer<'a> {
    cf: &'a CostFunction,
    bounds: ScoreBounds,
    kind: ScorerKind,
}

impl<'a> Scorer<'a> {
    pub fn new(cf: &'a CostFunction, kind: ScorerKind) -> Scorer<'a> {
        let kind = match (kind, cf) {
            (ScorerKind::Fast, CostFunction::Explicit(_)) => ScorerKind::Naive,
            (k, _) => k,
        };
        Scorer { cf, bounds: bounds(cf), kind }
    }

    pub fn bounds(&self) -> ScoreBounds {
        self.bounds
    }

    pub fn kind(&self) -> ScorerKind {
        self.kind
    }

    pub fn cost_function(&self) -> &'a CostFunction {
        self.cf
    }

    pub fn cost(&self, tree: &Tree) -> Result<f64> {
        match (self.kind, self.cf) {
            (ScorerKind::Fast, CostFunction::Distance(d)) => tree_cost_fast(tree, d),
            _ => tree_cost_naive(tree, self.cf),
        }
    }

    pub fn score_of(&self, cost: f64) -> f64 {
        self.bounds.score(cost)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quartet::{all_topologies, embedded_quartets};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cherries01() -> Tree {
        Tree::from_edges(4, &[(4, 0), (4, 1), (4, 5), (5, 2), (5, 3)]).unwrap()
    }

    #[test]
    fn matrix_validation() {
        assert!(DistanceMatrix::new(2, vec![0.0, 1.0, 2.0, 0.0]).is_err());
        assert!(DistanceMatrix::new(2, vec![1.0, 1.0, 1.0, 0.0]).is_err());
        assert!(DistanceMatrix::new(2, vec![0.0, -1.0, -1.0, 0.0]).is_err());
        assert!(DistanceMatrix::new(2, vec![0.0, f64::NAN, f64::NAN, 0.0]).is_err());
        assert!(DistanceMatrix::new(2, vec![0.0; 3]).is_err());
        assert!(DistanceMatrix::new(2, vec![0.0, 1.0, 1.0, 0.0]).is_ok());
    }

    #[test]
    fn distance_costs() {
        let d = DistanceMatrix::from_fn(4, |i, j| match (i, j) {
            (0, 1) => 1.0,
            (2, 3) => 2.0,
            _ => 5.0,
        })
        .unwrap();
        let cf = CostFunction::Distance(d);
        assert_eq!(cost_of(&cf, &QuartetTopology::new(0, 1, 2, 3).unwrap()).unwrap(), 3.0);
        assert_eq!(tree_cost_naive(&cherries01(), &cf).unwrap(), 3.0);
        let zero = CostFunction::Distance(DistanceMatrix::zeros(6));
        for topo in all_topologies(6).unwrap() {
            assert_eq!(cost_of(&zero, &topo).unwrap(), 0.0);
        }
        let bad = QuartetTopology::new(0, 1, 2, 7).unwrap();
        assert_eq!(cost_of(&cf, &bad), Err(Error::InvalidLabel { label: 7, n: 4 }));
    }

    #[test]
    fn explicit_costs_on_four_leaves() {
        let costs = ExplicitCosts::from_flat(4, vec![3.0, 7.0, 9.0]).unwrap();
        let cf = CostFunction::Explicit(costs);
        assert_eq!(tree_cost_naive(&cherries01(), &cf).unwrap(), 3.0);
        let b = bounds(&cf);
        assert_eq!((b.min_cost, b.max_cost), (3.0, 9.0));
        assert_eq!(score(&cherries01(), &cf).unwrap(), 1.0);
    }

    #[test]
    fn incomplete_map_is_rejected() {
        let mut map = BTreeMap::new();
        for topo in all_topologies(5).unwrap().into_iter().skip(1) {
            map.insert(topo, 1.0);
        }
        let missing = all_topologies(5).unwrap()[0];
        assert_eq!(ExplicitCosts::from_map(5, &map), Err(Error::IncompleteCostFunction(missing)));
        map.insert(missing, 0.5);
        assert!(ExplicitCosts::from_map(5, &map).is_ok());
    }

    #[test]
    fn mqc_construction() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = Tree::random(7, &mut rng).unwrap();
        let planted = embedded_quartets(&t);
        let cf = cost_from_mqc(7, &planted).unwrap();
        assert_eq!(tree_cost_naive(&t, &cf).unwrap(), 0.0);
        assert_eq!(score(&t, &cf).unwrap(), 1.0);

        let empty = cost_from_mqc(7, &[]).unwrap();
        let b = bounds(&empty);
        assert_eq!((b.min_cost, b.max_cost), (35.0, 35.0));
        assert_eq!(score(&t, &empty).unwrap(), 1.0);

        let one = [planted[4]];
        let single = cost_from_mqc(7, &one).unwrap();
        assert_eq!(tree_cost_naive(&t, &single).unwrap(), 34.0);
    }

    #[test]
    fn constant_costs_are_degenerate() {
        let cf = CostFunction::Explicit(ExplicitCosts::from_fn(6, |_| 2.5).unwrap());
        let b = bounds(&cf);
        assert_eq!(b.min_cost, 15.0 * 2.5);
        assert_eq!(b.max_cost, 15.0 * 2.5);
    }

    #[test]
    fn mismatched_sizes() {
        let cf = CostFunction::Distance(DistanceMatrix::zeros(5));
        assert!(matches!(tree_cost_naive(&cherries01(), &cf), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn scorer_falls_back_for_explicit_costs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cf = CostFunction::Explicit(ExplicitCosts::from_fn(6, |_| rng.gen()).unwrap());
        let s = Scorer::new(&cf, ScorerKind::Fast);
        assert_eq!(s.kind(), ScorerKind::Naive);
    }
}
