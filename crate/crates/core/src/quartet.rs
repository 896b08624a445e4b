//! Quartets, quartet topologies and their enumeration.
//!
//! A quartet is a sorted 4-set `a < b < c < d`. Its three topologies are
//! indexed `0: ab|cd`, `1: ac|bd`, `2: ad|bc`. Quartets are ranked in the
//! colexicographic order of the combinatorial number system, so a cost table
//! can be a flat array indexed by `3 * rank + topology`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::binomial;
use crate::tree::{Label, Tree};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quartet {
    labels: [Label; 4],
}

impl Quartet {
    pub fn new(mut labels: [Label; 4]) -> Result<Quartet> {
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(alloc::format!("quartet labels not distinct: {labels:?}")));
        }
        Ok(Quartet { labels })
    }

    pub fn labels(&self) -> [Label; 4] {
        self.labels
    }

    /// Colex rank among all 4-subsets of the naturals.
    pub fn rank(&self) -> usize {
        let [a, b, c, d] = self.labels.map(|x| x as u64);
        (binomial(a, 1) + binomial(b, 2) + binomial(c, 3) + binomial(d, 4)) as usize
    }

    pub fn from_rank(mut rank: usize) -> Quartet {
        let mut labels = [0; 4];
        for k in (1..=4u64).rev() {
            // largest x with C(x, k) <= rank
            let mut x = k - 1;
            while binomial(x + 1, k) as usize <= rank {
                x += 1;
            }
            rank -= binomial(x, k) as usize;
            labels[k as usize - 1] = x as Label;
        }
        Quartet { labels }
    }

    pub fn topology(&self, index: usize) -> QuartetTopology {
        let [a, b, c, d] = self.labels;
        let (pa, pb) = match index {
            0 => ([a, b], [c, d]),
            1 => ([a, c], [b, d]),
            2 => ([a, d], [b, c]),
            _ => panic!("topology index {index} out of range"),
        };
        QuartetTopology { pair_a: pa, pair_b: pb }
    }

    pub fn topologies(&self) -> [QuartetTopology; 3] {
        [self.topology(0), self.topology(1), self.topology(2)]
    }
}

/// A pairing `uv|wx` in canonical form: each pair ascending, and the pair
/// holding the smallest label first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuartetTopology {
    pair_a: [Label; 2],
    pair_b: [Label; 2],
}

impl QuartetTopology {
    /// The topology `uv|wx`.
    pub fn new(u: Label, v: Label, w: Label, x: Label) -> Result<QuartetTopology> {
        Quartet::new([u, v, w, x])?;
        let mut pa = [u.min(v), u.max(v)];
        let mut pb = [w.min(x), w.max(x)];
        if pb[0] < pa[0] {
            core::mem::swap(&mut pa, &mut pb);
        }
        Ok(QuartetTopology { pair_a: pa, pair_b: pb })
    }

    pub fn pairs(&self) -> [[Label; 2]; 2] {
        [self.pair_a, self.pair_b]
    }

    pub fn quartet(&self) -> Quartet {
        Quartet::new([self.pair_a[0], self.pair_a[1], self.pair_b[0], self.pair_b[1]])
            .expect("canonical topology has distinct labels")
    }

    /// Position of this topology among its quartet's three.
    pub fn index(&self) -> usize {
        let [_, b, c, _] = self.quartet().labels;
        match self.pair_a[1] {
            x if x == b => 0,
            x if x == c => 1,
            _ => 2,
        }
    }

    pub fn max_label(&self) -> Label {
        self.pair_a[1].max(self.pair_b[1])
    }
}

impl fmt::Display for QuartetTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}|{} {}", self.pair_a[0], self.pair_a[1], self.pair_b[0], self.pair_b[1])
    }
}

/// All `C(n, 4)` quartets over `0..n`, in rank order.
pub fn enumerate_quartets(n: usize) -> Result<Vec<Quartet>> {
    if n < 4 {
        return Err(Error::InvalidSize(n));
    }
    let mut out = Vec::with_capacity(binomial(n as u64, 4) as usize);
    for d in 3..n {
        for c in 2..d {
            for b in 1..c {
                for a in 0..b {
                    out.push(Quartet { labels: [a, b, c, d] });
                }
            }
        }
    }
    Ok(out)
}

/// All `3 C(n, 4)` topologies over `0..n`, ordered by quartet rank then index.
pub fn all_topologies(n: usize) -> Result<Vec<QuartetTopology>> {
    Ok(enumerate_quartets(n)?.iter().flat_map(|q| q.topologies()).collect())
}

/// For each quartet in rank order, the index of the topology `tree` embeds.
///
/// Uses the four-point condition on leaf path lengths: the embedded pairing
/// is the one with strictly the smallest summed path length.
pub fn embedded_indices(tree: &Tree) -> Vec<u8> {
    let n = tree.leaf_count();
    let len = tree.leaf_path_lengths();
    let d = |a: usize, b: usize| len[a * n + b];
    let mut out = vec![0u8; binomial(n as u64, 4) as usize];
    let mut rank = 0;
    for x in 3..n {
        for w in 2..x {
            for v in 1..w {
                for u in 0..v {
                    let s0 = d(u, v) + d(w, x);
                    let s1 = d(u, w) + d(v, x);
                    let s2 = d(u, x) + d(v, w);
                    out[rank] = if s0 < s1 && s0 < s2 {
                        0
                    } else if s1 < s2 {
                        1
                    } else {
                        2
                    };
                    rank += 1;
                }
            }
        }
    }
    out
}

/// The `C(n, 4)` topologies embedded in `tree`, in quartet rank order.
pub fn embedded_quartets(tree: &Tree) -> Vec<QuartetTopology> {
    embedded_indices(tree)
        .iter()
        .enumerate()
        .map(|(rank, &idx)| Quartet::from_rank(rank).topology(idx as usize))
        .collect()
}
