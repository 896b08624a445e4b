//! Simple mutations, k-mutations and constructive mutation paths.
//!
//! Every mutation is described by a [`MutationRecord`] that names the nodes
//! involved, can be replayed on a tree in the same state, and has an exact
//! inverse. Random mutations act in place on a caller-owned tree.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

use crate::exact::ExactSum;
use crate::tree::{Label, NodeId, Tree};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MutationKind {
    LeafInterchange,
    SubtreeInterchange,
    SubtreeTransfer,
}

impl MutationKind {
    pub const ALL: [MutationKind; 3] = [
        MutationKind::LeafInterchange,
        MutationKind::SubtreeInterchange,
        MutationKind::SubtreeTransfer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MutationKind::LeafInterchange => "leaf_interchange",
            MutationKind::SubtreeInterchange => "subtree_interchange",
            MutationKind::SubtreeTransfer => "subtree_transfer",
        }
    }
}

impl fmt::Display for MutationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MutationRecord {
    /// `first` hangs from `first_parent` and `second` from `second_parent`;
    /// the two hanging subtrees trade places.
    Interchange {
        kind: MutationKind,
        first: NodeId,
        first_parent: NodeId,
        second: NodeId,
        second_parent: NodeId,
    },
    /// The subtree at `subtree` hangs from `joint`, which sits between
    /// `from.0` and `from.1`. The joint is removed there and reinserted on
    /// the edge `to`.
    Transfer {
        subtree: NodeId,
        joint: NodeId,
        from: (NodeId, NodeId),
        to: (NodeId, NodeId),
    },
}

impl MutationRecord {
    pub fn kind(&self) -> MutationKind {
        match self {
            MutationRecord::Interchange { kind, .. } => *kind,
            MutationRecord::Transfer { .. } => MutationKind::SubtreeTransfer,
        }
    }

    pub fn inverse(&self) -> MutationRecord {
        match *self {
            MutationRecord::Interchange { kind, first, first_parent, second, second_parent } => {
                MutationRecord::Interchange {
                    kind,
                    first,
                    first_parent: second_parent,
                    second,
                    second_parent: first_parent,
                }
            }
            MutationRecord::Transfer { subtree, joint, from, to } => {
                MutationRecord::Transfer { subtree, joint, from: to, to: from }
            }
        }
    }

    /// Replays the mutation, checking that the tree is in the state the
    /// record describes.
    pub fn apply(&self, tree: &mut Tree) -> Result<()> {
        let bad = |msg: String| Err(Error::MutationNotApplicable(msg));
        let nodes = tree.node_count();
        match *self {
            MutationRecord::Interchange { first, first_parent, second, second_parent, .. } => {
                if [first, first_parent, second, second_parent].iter().any(|&x| x >= nodes) {
                    return bad(alloc::format!("{self}: node out of range"));
                }
                if !tree.adjacent(first, first_parent) || !tree.adjacent(second, second_parent) {
                    return bad(alloc::format!("{self}: nodes are not adjacent"));
                }
                if first_parent == second_parent
                    || first == second
                    || first == second_parent
                    || second == first_parent
                {
                    return bad(alloc::format!("{self}: degenerate interchange"));
                }
                if tree.subtree_contains(first, first_parent, second)
                    || tree.subtree_contains(second, second_parent, first)
                {
                    return bad(alloc::format!("{self}: subtrees overlap"));
                }
                tree.replace_neighbor(first_parent, first, second);
                tree.replace_neighbor(second_parent, second, first);
                tree.replace_neighbor(first, first_parent, second_parent);
                tree.replace_neighbor(second, second_parent, first_parent);
                Ok(())
            }
            MutationRecord::Transfer { subtree, joint, from: (a, b), to: (c, d) } => {
                if [subtree, joint, a, b, c, d].iter().any(|&x| x >= nodes) {
                    return bad(alloc::format!("{self}: node out of range"));
                }
                if tree.is_leaf(joint) {
                    return bad(alloc::format!("{self}: joint is a leaf"));
                }
                let mut around = [subtree, a, b];
                let mut actual = [0; 3];
                actual.copy_from_slice(tree.neighbors(joint));
                around.sort_unstable();
                actual.sort_unstable();
                if around != actual {
                    return bad(alloc::format!("{self}: joint neighbors differ"));
                }
                if (c, d) == (a, b) || (c, d) == (b, a) {
                    return bad(alloc::format!("{self}: target edge is the source edge"));
                }
                if c == joint || d == joint || !tree.adjacent(c, d) {
                    return bad(alloc::format!("{self}: target is not an edge of the remainder"));
                }
                if tree.subtree_contains(subtree, joint, c) || tree.subtree_contains(subtree, joint, d) {
                    return bad(alloc::format!("{self}: target edge inside the moved subtree"));
                }
                tree.replace_neighbor(a, joint, b);
                tree.replace_neighbor(b, joint, a);
                tree.replace_neighbor(c, d, joint);
                tree.replace_neighbor(d, c, joint);
                tree.set_neighbors(joint, [subtree, c, d]);
                Ok(())
            }
        }
    }
}

impl fmt::Display for MutationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MutationRecord::Interchange { kind, first, first_parent, second, second_parent } => {
                write!(f, "{kind} {first} {first_parent} {second} {second_parent}")
            }
            MutationRecord::Transfer { subtree, joint, from, to } => write!(
                f,
                "subtree_transfer {subtree} {joint} {} {} {} {}",
                from.0, from.1, to.0, to.1
            ),
        }
    }
}

impl FromStr for MutationRecord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let kind = parts.next().ok_or_else(|| Error::InvalidInput("empty mutation record".into()))?;
        let ops = parts
            .map(|p| p.parse::<NodeId>())
            .collect::<core::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidInput(alloc::format!("bad operand in {s:?}: {e}")))?;
        let arity = |want: usize| {
            if ops.len() == want {
                Ok(())
            } else {
                Err(Error::InvalidInput(alloc::format!("{kind} takes {want} operands, got {}", ops.len())))
            }
        };
        match kind {
            "leaf_interchange" | "subtree_interchange" => {
                arity(4)?;
                let kind = if kind == "leaf_interchange" {
                    MutationKind::LeafInterchange
                } else {
                    MutationKind::SubtreeInterchange
                };
                Ok(MutationRecord::Interchange {
                    kind,
                    first: ops[0],
                    first_parent: ops[1],
                    second: ops[2],
                    second_parent: ops[3],
                })
            }
            "subtree_transfer" => {
                arity(6)?;
                Ok(MutationRecord::Transfer {
                    subtree: ops[0],
                    joint: ops[1],
                    from: (ops[2], ops[3]),
                    to: (ops[4], ops[5]),
                })
            }
            other => Err(Error::InvalidInput(alloc::format!("unknown mutation kind {other:?}"))),
        }
    }
}

/// Interchanges two random leaves that are not siblings.
pub fn leaf_interchange<R: Rng + ?Sized>(tree: &mut Tree, rng: &mut R) -> Option<MutationRecord> {
    let n = tree.leaf_count();
    // every ternary tree with n >= 4 leaves has a non-sibling pair
    loop {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b || tree.parent(a) == tree.parent(b) {
            continue;
        }
        let rec = MutationRecord::Interchange {
            kind: MutationKind::LeafInterchange,
            first: a,
            first_parent: tree.parent(a),
            second: b,
            second_parent: tree.parent(b),
        };
        rec.apply(tree).expect("non-sibling leaves interchange");
        return Some(rec);
    }
}

/// Interchanges the subtree at a random internal node `u` with the subtree
/// (or leaf) at a random node `w` at least three edges away.
pub fn subtree_interchange<R: Rng + ?Sized>(tree: &mut Tree, rng: &mut R) -> Option<MutationRecord> {
    let internal: Vec<NodeId> = tree.internal_nodes().collect();
    let start = rng.gen_range(0..internal.len());
    for offset in 0..internal.len() {
        let u = internal[(start + offset) % internal.len()];
        let dist = tree.distances_from(u);
        let far: Vec<NodeId> = (0..tree.node_count()).filter(|&w| dist[w] >= 3).collect();
        if far.is_empty() {
            continue;
        }
        let w = far[rng.gen_range(0..far.len())];
        let path = tree.path(u, w);
        let rec = MutationRecord::Interchange {
            kind: MutationKind::SubtreeInterchange,
            first: u,
            first_parent: path[1],
            second: w,
            second_parent: path[path.len() - 2],
        };
        rec.apply(tree).expect("distant subtrees interchange");
        return Some(rec);
    }
    None
}

fn transfer_targets(tree: &Tree, subtree: NodeId, joint: NodeId) -> Vec<(NodeId, NodeId)> {
    let mut moved = vec![false; tree.node_count()];
    for x in tree.subtree_nodes(subtree, joint) {
        moved[x] = true;
    }
    moved[joint] = true;
    tree.edges().into_iter().filter(|&(c, d)| !moved[c] && !moved[d]).collect()
}

/// Detaches a random subtree (possibly a single leaf) and regrafts it onto
/// a random edge elsewhere. Not available for four leaves.
pub fn subtree_transfer<R: Rng + ?Sized>(tree: &mut Tree, rng: &mut R) -> Option<MutationRecord> {
    if tree.leaf_count() < 5 {
        return None;
    }
    let pick = |tree: &Tree, subtree: NodeId, joint: NodeId, rng: &mut R| {
        let targets = transfer_targets(tree, subtree, joint);
        if targets.is_empty() {
            return None;
        }
        let to = targets[rng.gen_range(0..targets.len())];
        let others: Vec<NodeId> = tree.neighbors(joint).iter().copied().filter(|&y| y != subtree).collect();
        Some(MutationRecord::Transfer { subtree, joint, from: (others[0], others[1]), to })
    };
    let mut chosen = None;
    for _ in 0..32 {
        let subtree = rng.gen_range(0..tree.node_count());
        let joints: Vec<NodeId> =
            tree.neighbors(subtree).iter().copied().filter(|&y| !tree.is_leaf(y)).collect();
        if joints.is_empty() {
            continue;
        }
        let joint = joints[rng.gen_range(0..joints.len())];
        if let Some(rec) = pick(tree, subtree, joint, rng) {
            chosen = Some(rec);
            break;
        }
    }
    if chosen.is_none() {
        // a leaf always has somewhere else to go once n >= 5
        let joint = tree.parent(0);
        chosen = pick(tree, 0, joint, rng);
    }
    let rec = chosen?;
    rec.apply(tree).expect("subtree transfer");
    Some(rec)
}

/// One random simple mutation of the given kind; `None` if the tree admits
/// none of that kind.
pub fn simple_mutation<R: Rng + ?Sized>(
    tree: &mut Tree,
    kind: MutationKind,
    rng: &mut R,
) -> Option<MutationRecord> {
    match kind {
        MutationKind::LeafInterchange => leaf_interchange(tree, rng),
        MutationKind::SubtreeInterchange => subtree_interchange(tree, rng),
        MutationKind::SubtreeTransfer => subtree_transfer(tree, rng),
    }
}

/// One simple mutation with its kind drawn uniformly; kinds that are not
/// applicable are redrawn.
pub fn random_mutation<R: Rng + ?Sized>(tree: &mut Tree, rng: &mut R) -> MutationRecord {
    loop {
        let kind = MutationKind::ALL[rng.gen_range(0..3)];
        if let Some(rec) = simple_mutation(tree, kind, rng) {
            return rec;
        }
    }
}

/// Applies `k >= 1` random simple mutations in sequence.
pub fn k_mutation<R: Rng + ?Sized>(tree: &mut Tree, k: u64, rng: &mut R) -> Result<Vec<MutationRecord>> {
    if k == 0 {
        return Err(Error::InvalidInput("a k-mutation needs k >= 1".into()));
    }
    Ok((0..k).map(|_| random_mutation(tree, rng)).collect())
}

/// Rolls back a sequence of applied records, newest first.
pub fn undo(tree: &mut Tree, records: &[MutationRecord]) -> Result<()> {
    for rec in records.iter().rev() {
        rec.inverse().apply(tree)?;
    }
    Ok(())
}

/// Fat-tailed distribution of the number of simple mutations per
/// k-mutation: `p(k) ∝ 1 / ((k + 2) ln(k + 2)^2)` for `k >= 1`.
#[derive(Debug, Clone)]
pub struct FatTailK {
    /// Unnormalized cumulative mass for `k = 1..=TABLE`.
    cdf: Vec<f64>,
    norm: f64,
}

impl Default for FatTailK {
    fn default() -> Self {
        Self::new()
    }
}

impl FatTailK {
    const TABLE: usize = 4096;

    pub fn new() -> FatTailK {
        let mut cdf = Vec::with_capacity(Self::TABLE);
        let mut acc = ExactSum::new();
        for k in 1..=Self::TABLE as u64 {
            acc.add(Self::weight(k));
            cdf.push(acc.value());
        }
        // Euler-Maclaurin remainder for k > TABLE
        let x = Self::TABLE as f64;
        let y = x + 2.0;
        let ly = libm::log(y);
        let integral = 1.0 / ly;
        let f = 1.0 / (y * ly * ly);
        let df = -(ly + 2.0) / (y * y * ly * ly * ly);
        acc.add(integral);
        acc.add(-f / 2.0);
        acc.add(-df / 12.0);
        FatTailK { cdf, norm: acc.value() }
    }

    /// Unnormalized weight of `k`.
    pub fn weight(k: u64) -> f64 {
        let y = k as f64 + 2.0;
        let l = libm::log(y);
        1.0 / (y * l * l)
    }

    /// Normalizing constant `sum_{k>=1} weight(k)`.
    pub fn normalizer(&self) -> f64 {
        self.norm
    }

    pub fn pmf(&self, k: u64) -> f64 {
        if k == 0 {
            0.0
        } else {
            Self::weight(k) / self.norm
        }
    }

    fn search(&self, target: f64) -> u64 {
        // smallest k with cdf(k) > target
        self.cdf.partition_point(|&c| c <= target) as u64 + 1
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let target = rng.gen::<f64>() * self.norm;
        let table_mass = self.cdf[Self::TABLE - 1];
        if target < table_mass {
            return self.search(target).min(Self::TABLE as u64);
        }
        // the mass above k is close to 1 / ln(k + 2.5); invert it
        let remaining = (self.norm - target).max(f64::MIN_POSITIVE);
        let k = libm::exp(1.0 / remaining) - 2.5;
        let k = if k.is_finite() { libm::floor(k) as u64 } else { u64::MAX - 1 };
        k.saturating_add(1).max(Self::TABLE as u64 + 1)
    }

    /// Draw from the distribution truncated to `1..=max`.
    pub fn sample_bounded<R: Rng + ?Sized>(&self, rng: &mut R, max: u64) -> u64 {
        let max = max.max(1);
        if max as usize <= Self::TABLE {
            let target = rng.gen::<f64>() * self.cdf[max as usize - 1];
            return self.search(target).min(max);
        }
        loop {
            let k = self.sample(rng);
            if k <= max {
                return k;
            }
        }
    }
}

/// Reduced view of a tree with some leaves hidden: each hidden leaf is
/// removed and its parent suppressed. Surviving nodes keep their ids.
#[derive(Debug, Clone)]
struct Projection {
    leaves: usize,
    adj: Vec<Vec<NodeId>>,
}

impl Projection {
    fn new(tree: &Tree, hidden: &[bool]) -> Projection {
        let mut p = Projection {
            leaves: tree.leaf_count(),
            adj: (0..tree.node_count()).map(|x| tree.neighbors(x).to_vec()).collect(),
        };
        for (leaf, &h) in hidden.iter().enumerate() {
            if h {
                p.remove_leaf(leaf);
            }
        }
        p
    }

    fn remove_leaf(&mut self, leaf: Label) {
        let parent = self.adj[leaf][0];
        self.adj[leaf].clear();
        let rest: Vec<NodeId> = self.adj[parent].iter().copied().filter(|&y| y != leaf).collect();
        let (a, b) = (rest[0], rest[1]);
        for (x, y) in [(a, b), (b, a)] {
            let slot = self.adj[x].iter().position(|&z| z == parent).unwrap();
            self.adj[x][slot] = y;
        }
        self.adj[parent].clear();
    }

    fn parent(&self, leaf: Label) -> NodeId {
        self.adj[leaf][0]
    }

    fn is_leaf(&self, x: NodeId) -> bool {
        x < self.leaves
    }

    /// A visible leaf whose sibling is also a leaf, with that sibling.
    fn cherry(&self) -> (Label, Label) {
        for a in 0..self.leaves {
            if self.adj[a].is_empty() {
                continue;
            }
            if let Some(&b) = self.adj[self.parent(a)].iter().find(|&&y| y != a && self.is_leaf(y)) {
                return (a, b);
            }
        }
        unreachable!("every tree with four or more leaves has a cherry")
    }

    fn sibling_leaf(&self, a: Label) -> Option<Label> {
        self.adj[self.parent(a)].iter().copied().find(|&y| y != a && self.is_leaf(y))
    }

    fn subtree_contains(&self, root: NodeId, from: NodeId, node: NodeId) -> bool {
        let mut stack = vec![(root, from)];
        while let Some((x, parent)) = stack.pop() {
            if x == node {
                return true;
            }
            for &y in &self.adj[x] {
                if y != parent {
                    stack.push((y, x));
                }
            }
        }
        false
    }
}

/// Builds the full-tree record for a reduced interchange of the subtree at
/// `root` (hanging from `base` in the reduced tree) with leaf `leaf`.
fn lift_interchange(tree: &Tree, root: NodeId, base: NodeId, leaf: Label) -> MutationRecord {
    let (first, first_parent) = if tree.is_leaf(root) {
        (root, tree.parent(root))
    } else {
        (tree.path(base, root)[1], base)
    };
    let kind = if tree.is_leaf(first) {
        MutationKind::LeafInterchange
    } else {
        MutationKind::SubtreeInterchange
    };
    MutationRecord::Interchange { kind, first, first_parent, second: leaf, second_parent: tree.parent(leaf) }
}

/// A sequence of leaf-to-leaf and subtree-to-leaf interchanges turning
/// `from` into a tree equal to `to`.
///
/// Inductive construction: a leaf `l` that sits in a cherry `(p, l)` of the
/// target is set aside (glued into its neighbor), the remaining `n - 1`
/// leaves are arranged recursively, and `l` is then moved next to `p` with
/// at most two subtree-to-leaf interchanges. Four leaves need at most one
/// leaf interchange, so the path has at most `2n - 7` steps, within the
/// `5n - 16` bound.
pub fn mutation_path(from: &Tree, to: &Tree) -> Result<Vec<MutationRecord>> {
    let n = from.leaf_count();
    if n != to.leaf_count() {
        return Err(Error::InvalidComparison(alloc::format!(
            "{} leaves vs {} leaves",
            n,
            to.leaf_count()
        )));
    }
    let mut hidden = vec![false; n];
    let mut target = Projection::new(to, &hidden);
    let mut glued: Vec<(Label, Label)> = Vec::with_capacity(n.saturating_sub(4));
    for _ in 4..n {
        let (p, l) = target.cherry();
        target.remove_leaf(l);
        hidden[l] = true;
        glued.push((l, p));
    }

    let mut cur = from.clone();
    let mut out = Vec::new();
    let push = |cur: &mut Tree, rec: MutationRecord, out: &mut Vec<MutationRecord>| -> Result<()> {
        rec.apply(cur)?;
        out.push(rec);
        Ok(())
    };

    // four visible leaves: make the sibling of one of them right
    let view = Projection::new(&cur, &hidden);
    let a = (0..n).find(|&x| !hidden[x]).expect("visible leaf");
    let want = target.sibling_leaf(a).expect("four-leaf target pairs every leaf");
    let have = view.sibling_leaf(a).expect("four-leaf tree pairs every leaf");
    if want != have {
        let rec = lift_interchange(&cur, have, view.parent(have), want);
        push(&mut cur, rec, &mut out)?;
    }

    for &(l, p) in glued.iter().rev() {
        hidden[l] = false;
        let view = Projection::new(&cur, &hidden);
        let m = view.parent(l);
        let sides: Vec<NodeId> = view.adj[m].iter().copied().filter(|&y| y != l).collect();
        if sides.contains(&p) {
            continue;
        }
        let (side_a, side_b) = if view.subtree_contains(sides[1], m, p) {
            (sides[0], sides[1])
        } else {
            (sides[1], sides[0])
        };
        let r = view.parent(p);
        if r != side_b {
            // move the block {m, l, side_a} to p's place, p goes next to m's old spot
            let rec = lift_interchange(&cur, m, side_b, p);
            push(&mut cur, rec, &mut out)?;
        }
        // side_a trades places with p, leaving l and p as a cherry
        let rec = lift_interchange(&cur, side_a, m, p);
        push(&mut cur, rec, &mut out)?;
    }
    debug_assert!(crate::tree::trees_equal(&cur, to).unwrap_or(false));
    Ok(out)
}

/// Upper bound on the length of [`mutation_path`] guaranteed for `n` leaves.
pub fn mutation_path_bound(n: usize) -> usize {
    if n <= 4 {
        4
    } else {
        5 * n - 16
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::trees_equal;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn cherries(a: Label, b: Label, c: Label, d: Label) -> Tree {
        Tree::from_edges(4, &[(4, a), (4, b), (4, 5), (5, c), (5, d)]).unwrap()
    }

    #[test]
    fn swap_two_leaves() {
        let mut t = cherries(0, 1, 2, 3);
        let rec = MutationRecord::Interchange {
            kind: MutationKind::LeafInterchange,
            first: 1,
            first_parent: 4,
            second: 2,
            second_parent: 5,
        };
        rec.apply(&mut t).unwrap();
        assert!(trees_equal(&t, &cherries(0, 2, 1, 3)).unwrap());
        rec.inverse().apply(&mut t).unwrap();
        assert!(trees_equal(&t, &cherries(0, 1, 2, 3)).unwrap());
    }

    #[test]
    fn stale_records_are_rejected() {
        let mut t = cherries(0, 1, 2, 3);
        let rec = MutationRecord::Interchange {
            kind: MutationKind::LeafInterchange,
            first: 0,
            first_parent: 4,
            second: 1,
            second_parent: 4,
        };
        assert!(rec.apply(&mut t).is_err());
        let rec = MutationRecord::Interchange {
            kind: MutationKind::LeafInterchange,
            first: 0,
            first_parent: 5,
            second: 2,
            second_parent: 5,
        };
        assert!(rec.apply(&mut t).is_err());
    }

    #[test]
    fn four_leaves_have_no_subtree_moves() {
        let mut t = cherries(0, 1, 2, 3);
        let mut r = rng(1);
        assert!(subtree_interchange(&mut t, &mut r).is_none());
        assert!(subtree_transfer(&mut t, &mut r).is_none());
        assert!(leaf_interchange(&mut t, &mut r).is_some());
    }

    #[test]
    fn five_leaves_have_a_subtree_interchange() {
        let mut r = rng(2);
        for _ in 0..20 {
            let mut t = Tree::random(5, &mut r).unwrap();
            let rec = subtree_interchange(&mut t, &mut r).unwrap();
            t.validate().unwrap();
            assert_eq!(rec.kind(), MutationKind::SubtreeInterchange);
        }
    }

    #[test]
    fn leaf_interchange_changes_the_tree() {
        let mut r = rng(3);
        for _ in 0..50 {
            let t = Tree::random(6, &mut r).unwrap();
            let mut u = t.clone();
            leaf_interchange(&mut u, &mut r).unwrap();
            u.validate().unwrap();
            assert!(!trees_equal(&t, &u).unwrap());
        }
    }

    #[test]
    fn caterpillar_end_cherries_swap() {
        let mut t = Tree::caterpillar(6).unwrap();
        let left = t.parent(0);
        let right = t.parent(5);
        let left_base = t.neighbors(left).iter().copied().find(|&y| !t.is_leaf(y)).unwrap();
        let right_base = t.neighbors(right).iter().copied().find(|&y| !t.is_leaf(y)).unwrap();
        let rec = MutationRecord::Interchange {
            kind: MutationKind::SubtreeInterchange,
            first: left,
            first_parent: left_base,
            second: right,
            second_parent: right_base,
        };
        let before = t.clone();
        rec.apply(&mut t).unwrap();
        t.validate().unwrap();
        assert!(!trees_equal(&before, &t).unwrap());
        rec.inverse().apply(&mut t).unwrap();
        assert!(trees_equal(&before, &t).unwrap());
    }

    #[test]
    fn transfers_round_trip() {
        let mut r = rng(4);
        for n in 5..12 {
            for _ in 0..20 {
                let t = Tree::random(n, &mut r).unwrap();
                let mut u = t.clone();
                let rec = subtree_transfer(&mut u, &mut r).unwrap();
                u.validate().unwrap();
                assert!(!trees_equal(&t, &u).unwrap(), "transfer must change the tree");
                rec.inverse().apply(&mut u).unwrap();
                assert!(trees_equal(&t, &u).unwrap());
            }
        }
    }

    #[test]
    fn transfers_leave_the_caterpillar() {
        let mut r = rng(5);
        let cat = Tree::caterpillar(8).unwrap();
        let is_caterpillar = |t: &Tree| {
            // only the caterpillar has exactly two cherries and a path spine
            t.internal_nodes().all(|p| t.neighbors(p).iter().filter(|&&y| !t.is_leaf(y)).count() <= 2)
        };
        let found = (0..100).any(|_| {
            let mut t = cat.clone();
            subtree_transfer(&mut t, &mut r).unwrap();
            !is_caterpillar(&t)
        });
        assert!(found);
    }

    #[test]
    fn k_mutation_lengths() {
        let mut r = rng(6);
        let mut t = Tree::random(10, &mut r).unwrap();
        assert_eq!(k_mutation(&mut t, 1, &mut r).unwrap().len(), 1);
        assert!(k_mutation(&mut t, 0, &mut r).is_err());
        let before = t.clone();
        let recs = k_mutation(&mut t, 25, &mut r).unwrap();
        undo(&mut t, &recs).unwrap();
        assert!(trees_equal(&before, &t).unwrap());
    }

    #[test]
    fn record_text_form() {
        let recs = [
            MutationRecord::Interchange {
                kind: MutationKind::SubtreeInterchange,
                first: 9,
                first_parent: 10,
                second: 3,
                second_parent: 12,
            },
            MutationRecord::Transfer { subtree: 4, joint: 11, from: (8, 9), to: (12, 13) },
        ];
        for rec in recs {
            let text = alloc::format!("{rec}");
            assert_eq!(text.parse::<MutationRecord>().unwrap(), rec);
        }
        assert_eq!(
            alloc::format!("{}", recs[1]),
            "subtree_transfer 4 11 8 9 12 13"
        );
        assert!("leaf_interchange 1 2 3".parse::<MutationRecord>().is_err());
        assert!("grow 1 2 3 4".parse::<MutationRecord>().is_err());
    }

    #[test]
    fn pmf_is_decreasing() {
        let fat = FatTailK::new();
        for k in 1..200 {
            assert!(fat.pmf(k) > fat.pmf(k + 1));
        }
        assert_eq!(fat.pmf(0), 0.0);
    }

    #[test]
    fn bounded_samples_stay_in_range() {
        let fat = FatTailK::new();
        let mut r = rng(7);
        for max in [1u64, 2, 9, 144, 5000] {
            for _ in 0..2000 {
                let k = fat.sample_bounded(&mut r, max);
                assert!((1..=max).contains(&k));
            }
        }
    }

    #[test]
    fn identical_trees_need_no_path() {
        let mut r = rng(8);
        for n in 4..10 {
            let t = Tree::random(n, &mut r).unwrap();
            let u = t.permute_internal(&(0..n - 2).rev().collect::<Vec<_>>()).unwrap();
            assert!(mutation_path(&t, &u).unwrap().is_empty());
        }
    }

    #[test]
    fn path_reaches_target() {
        let mut r = rng(9);
        for n in 4..14 {
            for _ in 0..20 {
                let a = Tree::random(n, &mut r).unwrap();
                let b = Tree::random(n, &mut r).unwrap();
                let path = mutation_path(&a, &b).unwrap();
                assert!(path.len() <= mutation_path_bound(n));
                let mut c = a.clone();
                for rec in &path {
                    rec.apply(&mut c).unwrap();
                    c.validate().unwrap();
                }
                assert!(trees_equal(&c, &b).unwrap());
            }
        }
    }

    #[test]
    fn path_rejects_mismatched_sizes() {
        let a = Tree::caterpillar(5).unwrap();
        let b = Tree::caterpillar(6).unwrap();
        assert!(matches!(mutation_path(&a, &b), Err(Error::InvalidComparison(_))));
    }
}
