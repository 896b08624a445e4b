//! Unrooted ternary trees with labeled leaves.
//!
//! A tree over `n >= 4` objects has `2n - 2` nodes. Node ids `0..n` are the
//! leaves and the id of a leaf is its label; ids `n..2n-2` are internal
//! nodes of degree three. Internal ids carry no meaning: two trees are equal
//! when they embed the same quartet topologies, whatever their internal
//! numbering.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::quartet::QuartetTopology;
use crate::{Error, Result};

pub type NodeId = usize;
pub type Label = usize;

pub(crate) const NONE: NodeId = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tree {
    leaves: usize,
    adj: Vec<[NodeId; 3]>,
}

impl Tree {
    /// Builds a tree from an undirected edge list over node ids `0..2n-2`,
    /// leaves first.
    pub fn from_edges(leaves: usize, edges: &[(NodeId, NodeId)]) -> Result<Tree> {
        if leaves < 4 {
            return Err(Error::InvalidSize(leaves));
        }
        let nodes = 2 * leaves - 2;
        if edges.len() != nodes - 1 {
            return Err(Error::MalformedTree(alloc::format!(
                "expected {} edges, got {}",
                nodes - 1,
                edges.len()
            )));
        }
        let mut adj = vec![[NONE; 3]; nodes];
        let mut degree = vec![0usize; nodes];
        for &(a, b) in edges {
            if a >= nodes || b >= nodes || a == b {
                return Err(Error::MalformedTree(alloc::format!("bad edge ({a}, {b})")));
            }
            for (x, y) in [(a, b), (b, a)] {
                let cap = if x < leaves { 1 } else { 3 };
                if degree[x] >= cap {
                    return Err(Error::MalformedTree(alloc::format!(
                        "node {x} has too many neighbors"
                    )));
                }
                adj[x][degree[x]] = y;
                degree[x] += 1;
            }
        }
        let tree = Tree { leaves, adj };
        tree.validate()?;
        Ok(tree)
    }

    /// Draws a tree by stepwise leaf addition: start from the three-leaf star
    /// and attach each further leaf to a uniformly chosen edge.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Tree> {
        if n < 4 {
            return Err(Error::InvalidSize(n));
        }
        let choices: Vec<usize> = (3..n).map(|leaf| rng.gen_range(0..2 * leaf - 3)).collect();
        Tree::from_insertions(n, &choices)
    }

    /// Builds the tree that stepwise leaf addition produces when leaf
    /// `3 + i` is attached to edge number `choices[i]` (of the `2i + 3`
    /// edges present at that point). Distinct choice sequences give
    /// distinct trees.
    pub fn from_insertions(n: usize, choices: &[usize]) -> Result<Tree> {
        if n < 4 {
            return Err(Error::InvalidSize(n));
        }
        if choices.len() != n - 3 {
            return Err(Error::InvalidInput(alloc::format!(
                "expected {} insertion choices, got {}",
                n - 3,
                choices.len()
            )));
        }
        let mut adj = vec![[NONE; 3]; 2 * n - 2];
        let center = n;
        let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(2 * n - 3);
        for leaf in 0..3 {
            adj[leaf][0] = center;
            adj[center][leaf] = leaf;
            edges.push((center, leaf));
        }
        for (leaf, &e) in (3..n).zip(choices) {
            if e >= edges.len() {
                return Err(Error::InvalidInput(alloc::format!(
                    "insertion choice {e} for leaf {leaf} exceeds {} edges",
                    edges.len()
                )));
            }
            let joint = n + leaf - 2;
            let (a, b) = edges[e];
            replace(&mut adj[a], b, joint);
            replace(&mut adj[b], a, joint);
            adj[joint] = [a, b, leaf];
            adj[leaf][0] = joint;
            edges[e] = (a, joint);
            edges.push((joint, b));
            edges.push((joint, leaf));
        }
        Ok(Tree { leaves: n, adj })
    }

    /// The linear tree: internal nodes on a path, each holding one leaf,
    /// with two leaves at either end.
    pub fn caterpillar(n: usize) -> Result<Tree> {
        if n < 4 {
            return Err(Error::InvalidSize(n));
        }
        let spine: Vec<NodeId> = (n..2 * n - 2).collect();
        let mut edges = Vec::with_capacity(2 * n - 3);
        edges.push((spine[0], 0));
        edges.push((spine[0], 1));
        for (i, w) in spine.windows(2).enumerate() {
            edges.push((w[0], w[1]));
            if i + 1 < spine.len() - 1 {
                edges.push((w[1], i + 2));
            }
        }
        let last = *spine.last().unwrap();
        edges.push((last, n - 2));
        edges.push((last, n - 1));
        Tree::from_edges(n, &edges)
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn is_leaf(&self, node: NodeId) -> bool {
        node < self.leaves
    }

    pub fn internal_nodes(&self) -> core::ops::Range<NodeId> {
        self.leaves..self.adj.len()
    }

    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        if self.is_leaf(node) {
            &self.adj[node][..1]
        } else {
            &self.adj[node][..]
        }
    }

    /// The internal node a leaf hangs from.
    pub fn parent(&self, leaf: Label) -> NodeId {
        self.adj[leaf][0]
    }

    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::with_capacity(self.adj.len() - 1);
        for a in 0..self.adj.len() {
            for &b in self.neighbors(a) {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub(crate) fn replace_neighbor(&mut self, node: NodeId, old: NodeId, new: NodeId) {
        replace(&mut self.adj[node], old, new);
    }

    pub(crate) fn set_neighbors(&mut self, node: NodeId, nbrs: [NodeId; 3]) {
        self.adj[node] = nbrs;
    }

    pub(crate) fn adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.neighbors(a).contains(&b)
    }

    /// Checks node counts, degrees, symmetry, connectivity and acyclicity.
    pub fn validate(&self) -> Result<()> {
        let n = self.leaves;
        if n < 4 {
            return Err(Error::InvalidSize(n));
        }
        if self.adj.len() != 2 * n - 2 {
            return Err(Error::MalformedTree(alloc::format!(
                "{} nodes for {} leaves",
                self.adj.len(),
                n
            )));
        }
        let mut edge_ends = 0;
        for node in 0..self.adj.len() {
            let row = &self.adj[node];
            if self.is_leaf(node) {
                if row[0] == NONE || row[1] != NONE || row[2] != NONE {
                    return Err(Error::MalformedTree(alloc::format!("leaf {node} must have degree 1")));
                }
                if self.is_leaf(row[0]) {
                    return Err(Error::MalformedTree(alloc::format!("leaf {node} attached to a leaf")));
                }
            } else if row.contains(&NONE) {
                return Err(Error::MalformedTree(alloc::format!("internal node {node} must have degree 3")));
            }
            for &m in self.neighbors(node) {
                if m >= self.adj.len() || m == node || !self.neighbors(m).contains(&node) {
                    return Err(Error::MalformedTree(alloc::format!(
                        "asymmetric or invalid edge {node}-{m}"
                    )));
                }
                edge_ends += 1;
            }
            let nb = self.neighbors(node);
            for i in 0..nb.len() {
                for j in i + 1..nb.len() {
                    if nb[i] == nb[j] {
                        return Err(Error::MalformedTree(alloc::format!("parallel edges at {node}")));
                    }
                }
            }
        }
        if edge_ends != 2 * (self.adj.len() - 1) {
            return Err(Error::MalformedTree("wrong edge count".into()));
        }
        // connected with |V| - 1 edges implies acyclic
        let seen = self.distances_from(0);
        if seen.contains(&u32::MAX) {
            return Err(Error::MalformedTree("tree is disconnected".into()));
        }
        Ok(())
    }

    /// Edge counts from `start` to every node (`u32::MAX` if unreachable).
    pub fn distances_from(&self, start: NodeId) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.adj.len()];
        let mut queue = VecDeque::with_capacity(self.adj.len());
        dist[start] = 0;
        queue.push_back(start);
        while let Some(x) = queue.pop_front() {
            for &y in self.neighbors(x) {
                if y != NONE && y < dist.len() && dist[y] == u32::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Path lengths between all leaf pairs, row-major `n x n`.
    pub fn leaf_path_lengths(&self) -> Vec<u32> {
        let n = self.leaves;
        let mut out = vec![0u32; n * n];
        for a in 0..n {
            let d = self.distances_from(a);
            out[a * n..(a + 1) * n].copy_from_slice(&d[..n]);
        }
        out
    }

    /// Nodes on the path from `a` to `b`, both ends included.
    pub fn path(&self, a: NodeId, b: NodeId) -> Vec<NodeId> {
        let mut prev = vec![NONE; self.adj.len()];
        let mut queue = VecDeque::new();
        prev[a] = a;
        queue.push_back(a);
        while let Some(x) = queue.pop_front() {
            if x == b {
                break;
            }
            for &y in self.neighbors(x) {
                if prev[y] == NONE {
                    prev[y] = x;
                    queue.push_back(y);
                }
            }
        }
        let mut path = vec![b];
        let mut cur = b;
        while cur != a {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    /// Nodes of the subtree hanging from `root` on the side away from `from`.
    pub fn subtree_nodes(&self, root: NodeId, from: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![(root, from)];
        while let Some((x, parent)) = stack.pop() {
            out.push(x);
            for &y in self.neighbors(x) {
                if y != parent {
                    stack.push((y, x));
                }
            }
        }
        out
    }

    /// Leaf labels of the subtree hanging from `root` away from `from`.
    pub fn subtree_leaves(&self, root: NodeId, from: NodeId) -> Vec<Label> {
        let mut out = Vec::new();
        self.collect_leaves(root, from, &mut out);
        out
    }

    pub(crate) fn collect_leaves(&self, root: NodeId, from: NodeId, out: &mut Vec<Label>) {
        let mut stack = vec![(root, from)];
        while let Some((x, parent)) = stack.pop() {
            if self.is_leaf(x) {
                out.push(x);
                continue;
            }
            for &y in self.neighbors(x) {
                if y != parent {
                    stack.push((y, x));
                }
            }
        }
    }

    /// Whether `node` lies in the subtree hanging from `root` away from `from`.
    pub fn subtree_contains(&self, root: NodeId, from: NodeId, node: NodeId) -> bool {
        let mut stack = vec![(root, from)];
        while let Some((x, parent)) = stack.pop() {
            if x == node {
                return true;
            }
            for &y in self.neighbors(x) {
                if y != parent {
                    stack.push((y, x));
                }
            }
        }
        false
    }

    /// Canonical encoding, identical for two trees iff they are equal as
    /// leaf-labeled trees. The tree is rooted at leaf 0 and children are
    /// ordered by their smallest leaf label.
    pub fn canonical_form(&self) -> CanonicalForm {
        let mut tokens = Vec::with_capacity(3 * self.leaves);
        tokens.push(0);
        self.encode(self.parent(0), 0, &mut tokens);
        CanonicalForm(tokens)
    }

    fn encode(&self, node: NodeId, from: NodeId, out: &mut Vec<u32>) -> Label {
        if self.is_leaf(node) {
            out.push(node as u32);
            return node;
        }
        let kids: Vec<NodeId> = self.neighbors(node).iter().copied().filter(|&y| y != from).collect();
        let mut parts: [(Label, Vec<u32>); 2] = [(0, Vec::new()), (0, Vec::new())];
        for (slot, &kid) in parts.iter_mut().zip(kids.iter()) {
            let min = self.encode(kid, node, &mut slot.1);
            slot.0 = min;
        }
        if parts[0].0 > parts[1].0 {
            parts.swap(0, 1);
        }
        out.push(CanonicalForm::OPEN);
        out.extend_from_slice(&parts[0].1);
        out.extend_from_slice(&parts[1].1);
        out.push(CanonicalForm::CLOSE);
        parts[0].0
    }

    /// Copy with internal node ids permuted; `perm[i]` is the new position of
    /// the `i`-th internal node.
    pub fn permute_internal(&self, perm: &[usize]) -> Result<Tree> {
        let n = self.leaves;
        if perm.len() != n - 2 {
            return Err(Error::InvalidInput("permutation length must be n - 2".into()));
        }
        let map = |x: NodeId| if x < n { x } else { n + perm[x - n] };
        let mut adj = vec![[NONE; 3]; self.adj.len()];
        for (node, row) in self.adj.iter().enumerate() {
            let mut new_row = [NONE; 3];
            for (slot, &y) in new_row.iter_mut().zip(row.iter()) {
                *slot = if y == NONE { NONE } else { map(y) };
            }
            adj[map(node)] = new_row;
        }
        let tree = Tree { leaves: n, adj };
        tree.validate()?;
        Ok(tree)
    }

    /// Copy with leaf labels renamed; `relabel[old] = new`.
    pub fn relabel_leaves(&self, relabel: &[Label]) -> Result<Tree> {
        let n = self.leaves;
        if relabel.len() != n {
            return Err(Error::InvalidInput("relabeling must cover every leaf".into()));
        }
        let mut seen = vec![false; n];
        for &l in relabel {
            if l >= n || seen[l] {
                return Err(Error::InvalidInput("relabeling must be a permutation".into()));
            }
            seen[l] = true;
        }
        let map = |x: NodeId| if x < n { relabel[x] } else { x };
        let mut adj = vec![[NONE; 3]; self.adj.len()];
        for (node, row) in self.adj.iter().enumerate() {
            let mut new_row = [NONE; 3];
            for (slot, &y) in new_row.iter_mut().zip(row.iter()) {
                *slot = if y == NONE { NONE } else { map(y) };
            }
            adj[map(node)] = new_row;
        }
        Ok(Tree { leaves: n, adj })
    }
}

fn replace(row: &mut [NodeId; 3], old: NodeId, new: NodeId) {
    let slot = row.iter().position(|&x| x == old).expect("neighbor to replace");
    row[slot] = new;
}

/// Token stream produced by [`Tree::canonical_form`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(pub Vec<u32>);

impl CanonicalForm {
    const OPEN: u32 = u32::MAX - 1;
    const CLOSE: u32 = u32::MAX;
}

/// Whether `tree` embeds `topo`: the path between the first pair and the
/// path between the second pair share no node.
pub fn is_consistent(tree: &Tree, topo: &QuartetTopology) -> Result<bool> {
    let n = tree.leaf_count();
    let [[u, v], [w, x]] = topo.pairs();
    for label in [u, v, w, x] {
        if label >= n {
            return Err(Error::InvalidLabel { label, n });
        }
    }
    let mut blocked = vec![false; tree.node_count()];
    for node in tree.path(u, v) {
        blocked[node] = true;
    }
    if blocked[w] || blocked[x] {
        return Ok(false);
    }
    // is x still reachable from w with the u-v path removed?
    let mut seen = blocked;
    let mut stack = vec![w];
    seen[w] = true;
    while let Some(a) = stack.pop() {
        if a == x {
            return Ok(true);
        }
        for &b in tree.neighbors(a) {
            if !seen[b] {
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    Ok(false)
}

/// Equality as leaf-labeled trees, ignoring internal node ids.
pub fn trees_equal(a: &Tree, b: &Tree) -> Result<bool> {
    if a.leaf_count() != b.leaf_count() {
        return Err(Error::InvalidComparison(alloc::format!(
            "{} leaves vs {} leaves",
            a.leaf_count(),
            b.leaf_count()
        )));
    }
    Ok(a.canonical_form() == b.canonical_form())
}

/// Every tree on `n` leaves, `(2n-5)!!` of them. Meant for small `n`.
pub fn all_trees(n: usize) -> Result<Vec<Tree>> {
    if n < 4 {
        return Err(Error::InvalidSize(n));
    }
    let mut out = Vec::with_capacity(tree_count(n) as usize);
    let mut choices = vec![0usize; n - 3];
    loop {
        out.push(Tree::from_insertions(n, &choices)?);
        // mixed-radix increment, digit i has 2i + 3 values
        let mut i = 0;
        loop {
            if i == choices.len() {
                return Ok(out);
            }
            choices[i] += 1;
            if choices[i] < 2 * i + 3 {
                break;
            }
            choices[i] = 0;
            i += 1;
        }
    }
}

/// Number of distinct unrooted ternary trees on `n` labeled leaves, `(2n-5)!!`.
pub fn tree_count(n: usize) -> u64 {
    (1..=(2 * n as u64).saturating_sub(5)).step_by(2).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quartet::{all_topologies, enumerate_quartets};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cherries(a: Label, b: Label, c: Label, d: Label) -> Tree {
        Tree::from_edges(4, &[(4, a), (4, b), (4, 5), (5, c), (5, d)]).unwrap()
    }

    #[test]
    fn sizes_below_four_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(Tree::random(3, &mut rng), Err(Error::InvalidSize(3)));
        assert_eq!(Tree::caterpillar(2), Err(Error::InvalidSize(2)));
    }

    #[test]
    fn random_trees_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 4..40 {
            let t = Tree::random(n, &mut rng).unwrap();
            t.validate().unwrap();
            assert_eq!(t.node_count(), 2 * n - 2);
            assert_eq!(t.edges().len(), 2 * n - 3);
        }
    }

    #[test]
    fn caterpillar_shape() {
        let t = Tree::caterpillar(6).unwrap();
        t.validate().unwrap();
        assert_eq!(t.parent(0), t.parent(1));
        assert_eq!(t.parent(4), t.parent(5));
        let d = t.leaf_path_lengths();
        assert_eq!(d[5], 5); // leaf 0 to leaf 5 runs the whole spine
    }

    #[test]
    fn counts_of_labeled_trees() {
        assert_eq!(tree_count(4), 3);
        assert_eq!(tree_count(5), 15);
        assert_eq!(tree_count(6), 105);
    }

    #[test]
    fn n4_draws_hit_all_three_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let shapes = [cherries(0, 1, 2, 3), cherries(0, 2, 1, 3), cherries(0, 3, 1, 2)];
        let mut counts = [0usize; 3];
        for _ in 0..10_000 {
            let t = Tree::random(4, &mut rng).unwrap();
            let idx = shapes.iter().position(|s| trees_equal(s, &t).unwrap()).unwrap();
            counts[idx] += 1;
        }
        // chi-square with 2 degrees of freedom, 0.1% critical value 13.8
        let expected = 10_000.0 / 3.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < 13.8, "counts {counts:?}");
    }

    #[test]
    fn n5_draws_cover_fifteen_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut seen: Vec<CanonicalForm> = Vec::new();
        for _ in 0..3000 {
            let f = Tree::random(5, &mut rng).unwrap().canonical_form();
            if !seen.contains(&f) {
                seen.push(f);
            }
        }
        assert_eq!(seen.len(), 15);
    }

    #[test]
    fn enumeration_is_complete_and_distinct() {
        for n in 4..=7 {
            let all = all_trees(n).unwrap();
            assert_eq!(all.len() as u64, tree_count(n));
            let mut forms: Vec<CanonicalForm> = all.iter().map(Tree::canonical_form).collect();
            forms.sort();
            forms.dedup();
            assert_eq!(forms.len(), all.len());
        }
        assert!(Tree::from_insertions(5, &[3]).is_err());
        assert!(Tree::from_insertions(5, &[]).is_err());
    }

    #[test]
    fn consistency_on_four_leaves() {
        let t = cherries(0, 1, 2, 3);
        let q = |u, v, w, x| QuartetTopology::new(u, v, w, x).unwrap();
        assert!(is_consistent(&t, &q(0, 1, 2, 3)).unwrap());
        assert!(!is_consistent(&t, &q(0, 2, 1, 3)).unwrap());
        assert!(!is_consistent(&t, &q(0, 3, 1, 2)).unwrap());
        assert_eq!(
            is_consistent(&t, &q(0, 1, 2, 9)),
            Err(Error::InvalidLabel { label: 9, n: 4 })
        );
    }

    #[test]
    fn one_consistent_topology_per_quartet() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let t = Tree::random(8, &mut rng).unwrap();
        for q in enumerate_quartets(8).unwrap() {
            let hits = q.topologies().iter().filter(|topo| is_consistent(&t, topo).unwrap()).count();
            assert_eq!(hits, 1);
        }
        assert_eq!(all_topologies(8).unwrap().len(), 210);
    }

    #[test]
    fn equality_ignores_internal_ids() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = Tree::random(9, &mut rng).unwrap();
        let perm: Vec<usize> = (0..7).rev().collect();
        let u = t.permute_internal(&perm).unwrap();
        assert_ne!(t, u);
        assert!(trees_equal(&t, &u).unwrap());
        assert!(trees_equal(&t, &t).unwrap());
        let other = Tree::random(8, &mut rng).unwrap();
        assert!(matches!(trees_equal(&t, &other), Err(Error::InvalidComparison(_))));
    }

    #[test]
    fn path_and_subtrees() {
        let t = Tree::caterpillar(5).unwrap();
        let p = t.path(0, 4);
        assert_eq!(p.len(), 5);
        assert_eq!(p[0], 0);
        assert_eq!(p[4], 4);
        let hub = t.parent(2);
        let mut leaves = t.subtree_leaves(t.parent(0), hub);
        leaves.sort_unstable();
        assert_eq!(leaves, vec![0, 1]);
        assert!(t.subtree_contains(t.parent(0), hub, 1));
        assert!(!t.subtree_contains(t.parent(0), hub, 3));
    }

    #[test]
    fn from_edges_rejects_garbage() {
        assert!(Tree::from_edges(4, &[(4, 0), (4, 1), (4, 2), (5, 3), (0, 1)]).is_err());
        assert!(Tree::from_edges(4, &[(4, 0), (4, 1), (4, 5), (5, 2)]).is_err());
        // a cycle among internal nodes of a six leaf tree leaves a leaf cut off
        let edges = [(6, 0), (6, 1), (6, 7), (7, 8), (8, 9), (9, 7), (8, 2), (9, 3), (4, 5)];
        assert!(Tree::from_edges(6, &edges).is_err());
    }
}
