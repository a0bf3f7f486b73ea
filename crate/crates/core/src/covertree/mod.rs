//! Explicit-representation cover trees.
//!
//! Every node holds one dataset point and an integer scale `s`; leaves carry
//! [`Scale::Leaf`], which orders below every integer scale. A node at scale
//! `s` has all of its descendants within `2^(s+1)` of its point. Pure
//! self-child chains are coalesced, so every internal node has at least two
//! children and the tree has at most `2N - 1` nodes.

mod imbalance;
mod stats;
mod verify;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::{math, Error, Result};

pub use imbalance::{node_imbalance, tree_imbalance, ImbalanceReport};
pub use stats::{level_packing_check, tree_stats, PackingCheck, TreeStats};
pub use verify::{verify_invariants, VerificationReport, Violation};

/// Integer scale of a node, or the leaf sentinel standing in for `-inf`.
///
/// The derived ordering puts `Leaf` below every `Level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scale {
    Leaf,
    Level(i32),
}

impl Scale {
    #[inline]
    pub fn level(self) -> Option<i32> {
        match self {
            Scale::Leaf => None,
            Scale::Level(s) => Some(s),
        }
    }

    #[inline]
    pub fn is_leaf(self) -> bool {
        matches!(self, Scale::Leaf)
    }

    /// Furthest-descendant bound `2^(s+1)`; zero for leaves.
    #[inline]
    pub fn lambda(self) -> f64 {
        match self {
            Scale::Leaf => 0.0,
            Scale::Level(s) => math::pow2(s + 1),
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scale::Leaf => f.write_str("LEAF"),
            Scale::Level(s) => write!(f, "{s}"),
        }
    }
}

/// Index of a node inside its tree's arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverNode {
    pub point: usize,
    pub scale: Scale,
    /// Children in construction order; the self-child (same point) first.
    pub children: Vec<NodeId>,
    /// Multiplicity-weighted number of points in this node's subtree.
    pub descendant_count: u64,
}

impl CoverNode {
    pub fn leaf(point: usize, weight: u64) -> Self {
        Self { point, scale: Scale::Leaf, children: Vec::new(), descendant_count: weight }
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.scale.lambda()
    }

    #[inline]
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// How the root point is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootPolicy {
    /// Dataset point 0.
    #[default]
    First,
    /// A specific point id.
    Point(usize),
    /// A uniformly random point drawn with this seed.
    Seeded(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BuildConfig {
    pub root: RootPolicy,
}

/// A cover tree over a borrowed dataset.
#[derive(Debug, Clone)]
pub struct CoverTree<'a> {
    data: &'a Dataset,
    nodes: Vec<CoverNode>,
    root: NodeId,
}

impl<'a> CoverTree<'a> {
    /// Build with the default configuration (root at point 0).
    pub fn build(data: &'a Dataset) -> Result<Self> {
        Self::build_with(data, BuildConfig::default())
    }

    /// Build by inserting points one at a time into the implicit tree and
    /// materializing explicit nodes only where a branch appears.
    ///
    /// The point farthest from the root goes in first, which pins the root
    /// scale to `ceil(log2 D)` for `D` the largest root distance.
    pub fn build_with(data: &'a Dataset, config: BuildConfig) -> Result<Self> {
        let n = data.len();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        if let Some((first, second)) = data.find_duplicate() {
            return Err(Error::DuplicatePoints { first, second });
        }
        let root_point = match config.root {
            RootPolicy::First => 0,
            RootPolicy::Point(p) if p < n => p,
            RootPolicy::Point(p) => {
                return Err(Error::InvalidOption(alloc::format!("root point {p} out of range (N = {n})")))
            }
            RootPolicy::Seeded(seed) => ChaCha8Rng::seed_from_u64(seed).random_range(0..n),
        };
        let mut builder = Builder { data, nodes: vec![CoverNode::leaf(root_point, data.weight(root_point))] };
        let farthest = (0..n)
            .filter(|&p| p != root_point)
            .max_by(|&a, &b| data.distance(root_point, a).total_cmp(&data.distance(root_point, b)).then(b.cmp(&a)));
        if let Some(far) = farthest {
            builder.insert(far);
            for p in (0..n).filter(|&p| p != root_point && p != far) {
                builder.insert(p);
            }
        }
        let mut tree = CoverTree { data, nodes: builder.nodes, root: NodeId(0) };
        tree.recompute_descendant_counts();
        Ok(tree)
    }

    /// Assemble a tree from raw nodes without checking anything. Intended
    /// for deserialization and fault injection; run [`verify_invariants`]
    /// on the result.
    pub fn from_nodes(data: &'a Dataset, nodes: Vec<CoverNode>, root: NodeId) -> Self {
        Self { data, nodes, root }
    }

    pub fn into_nodes(self) -> (Vec<CoverNode>, NodeId) {
        (self.nodes, self.root)
    }

    #[inline]
    pub fn dataset(&self) -> &'a Dataset {
        self.data
    }

    #[inline]
    pub fn root(&self) -> NodeId {
        self.root
    }

    #[inline]
    pub fn node(&self, id: NodeId) -> &CoverNode {
        &self.nodes[id.index()]
    }

    pub fn node_mut(&mut self, id: NodeId) -> &mut CoverNode {
        &mut self.nodes[id.index()]
    }

    pub fn nodes(&self) -> &[CoverNode] {
        &self.nodes
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Root scale `s^T`.
    pub fn s_top(&self) -> Scale {
        self.node(self.root).scale
    }

    /// Smallest scale of a non-leaf node; `Leaf` when the tree is a single leaf.
    pub fn s_min(&self) -> Scale {
        self.nodes.iter().map(|n| n.scale).filter(|s| !s.is_leaf()).min().unwrap_or(Scale::Leaf)
    }

    /// Parent of every node (root and unreachable nodes map to `None`).
    pub fn parents(&self) -> Vec<Option<NodeId>> {
        let mut parents = vec![None; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            for &c in &node.children {
                parents[c.index()] = Some(NodeId(i as u32));
            }
        }
        parents
    }

    /// Nodes in depth-first pre-order from the root.
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            out.push(id);
            stack.extend(self.node(id).children.iter().rev().copied());
        }
        out
    }

    /// Points in the subtree of `id` (each leaf once).
    pub fn descendant_points(&self, id: NodeId) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            let node = self.node(n);
            if node.is_leaf() {
                out.push(node.point);
            } else {
                stack.extend(node.children.iter().copied());
            }
        }
        out
    }

    /// Point set `C_s` of level `s`: the root point plus every point whose
    /// node hangs under a parent of scale at least `s + 1`.
    pub fn level_set(&self, s: i32) -> Vec<usize> {
        let mut present = vec![false; self.data.len()];
        present[self.node(self.root).point] = true;
        for node in &self.nodes {
            if let Scale::Level(ps) = node.scale {
                if ps > s {
                    for &c in &node.children {
                        present[self.node(c).point] = true;
                    }
                }
            }
        }
        present.iter().enumerate().filter(|(_, &p)| p).map(|(i, _)| i).collect()
    }

    /// Recompute the cached multiplicity-weighted subtree sizes.
    pub fn recompute_descendant_counts(&mut self) {
        for id in self.preorder().into_iter().rev() {
            let node = &self.nodes[id.index()];
            let count = if node.is_leaf() {
                self.data.weight(node.point)
            } else {
                node.children.iter().map(|c| self.nodes[c.index()].descendant_count).sum()
            };
            self.nodes[id.index()].descendant_count = count;
        }
    }
}

struct Builder<'a> {
    data: &'a Dataset,
    nodes: Vec<CoverNode>,
}

impl Builder<'_> {
    fn push(&mut self, node: CoverNode) -> NodeId {
        self.nodes.push(node);
        NodeId(self.nodes.len() as u32 - 1)
    }

    /// Insert `p` into the implicit tree. Walking down from the root, `cover`
    /// holds the nodes standing for level `i` whose points lie within
    /// `2^(i+1)` of `p`; `p` is attached at the deepest level `i` where some
    /// cover node is within `2^i`, which makes it a level `i-1` point
    /// separated from everything already there.
    fn insert(&mut self, p: usize) {
        let data = self.data;
        let root = NodeId(0);
        let root_dist = data.distance(p, self.nodes[0].point);
        let mut level = math::ceil_log2(root_dist);
        while math::pow2(level) < root_dist {
            level += 1;
        }
        if let Scale::Level(s) = self.nodes[0].scale {
            level = level.max(s);
        }
        let mut cover: Vec<(NodeId, f64)> = vec![(root, root_dist)];
        let mut next: Vec<(NodeId, f64)> = Vec::new();
        let mut parent: (i32, NodeId) = (level, root);
        loop {
            let radius = math::pow2(level);
            if let Some(&(id, _)) = cover
                .iter()
                .filter(|(_, d)| *d <= radius)
                .min_by(|a, b| a.1.total_cmp(&b.1))
            {
                parent = (level, id);
            }
            // children of the level-`level` cover at level `level - 1`
            next.clear();
            let mut nearest = f64::INFINITY;
            for &(id, d) in &cover {
                let node = &self.nodes[id.index()];
                if node.scale == Scale::Level(level) {
                    for &c in &node.children {
                        let cp = self.nodes[c.index()].point;
                        let dc = if cp == node.point { d } else { data.distance(p, cp) };
                        nearest = nearest.min(dc);
                        if dc <= radius {
                            next.push((c, dc));
                        }
                    }
                } else {
                    nearest = nearest.min(d);
                    if d <= radius {
                        next.push((id, d));
                    }
                }
            }
            if nearest > radius {
                break;
            }
            core::mem::swap(&mut cover, &mut next);
            level -= 1;
        }
        self.attach(p, parent.1, parent.0);
    }

    /// Make `p` a child of the implicit node `(point of host, level)`.
    fn attach(&mut self, p: usize, host: NodeId, level: i32) {
        let leaf = self.push(CoverNode::leaf(p, self.data.weight(p)));
        let host_node = &self.nodes[host.index()];
        debug_assert!(host_node.scale <= Scale::Level(level));
        if host_node.scale == Scale::Level(level) {
            self.nodes[host.index()].children.push(leaf);
        } else {
            // `host` covered a coalesced range of levels; split it so an
            // explicit node exists at `level`.
            let moved = host_node.clone();
            let moved_id = self.push(moved);
            let h = &mut self.nodes[host.index()];
            h.scale = Scale::Level(level);
            h.children = vec![moved_id, leaf];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::dataset_extremes;
    use crate::generate::generate_from_str;

    #[test]
    fn single_point_is_one_leaf() {
        let ds = Dataset::from_rows(&[[1.0, 2.0]]).unwrap();
        let t = CoverTree::build(&ds).unwrap();
        assert_eq!(t.node_count(), 1);
        assert_eq!(t.s_top(), Scale::Leaf);
        assert_eq!(tree_imbalance(&t).total, 0);
    }

    #[test]
    fn two_points_at_unit_distance() {
        let ds = Dataset::from_rows(&[[0.0], [1.0]]).unwrap();
        let t = CoverTree::build(&ds).unwrap();
        assert_eq!(t.s_top(), Scale::Level(0));
        let root = t.node(t.root());
        assert_eq!(root.children.len(), 2);
        for &c in &root.children {
            assert!(t.node(c).is_leaf());
        }
        assert_eq!(t.node(root.children[0]).point, 0);
        assert_eq!(t.node(root.children[1]).point, 1);
        assert!(verify_invariants(&t).is_ok());
    }

    #[test]
    fn duplicate_points_rejected() {
        let ds = Dataset::from_rows(&[[0.0], [1.0], [0.0]]).unwrap();
        assert_eq!(CoverTree::build(&ds).unwrap_err(), Error::DuplicatePoints { first: 0, second: 2 });
    }

    #[test]
    fn weighted_duplicates_feed_descendant_counts() {
        let ds = Dataset::from_rows(&[[0.0], [1.0], [0.0], [5.0], [1.0], [0.0]]).unwrap();
        let (w, _) = ds.collapse_duplicates();
        let t = CoverTree::build(&w).unwrap();
        assert_eq!(t.node(t.root()).descendant_count, 6);
        assert!(verify_invariants(&t).is_ok());
    }

    #[test]
    fn empty_dataset_rejected() {
        let ds = Dataset::from_flat(2, alloc::vec::Vec::new()).unwrap();
        assert_eq!(CoverTree::build(&ds).unwrap_err(), Error::EmptyDataset);
    }

    #[test]
    fn top_scale_within_diameter_bracket() {
        for (i, spec) in ["uniform-ball:N=300,d=2", "gaussian-mixture:N=300,d=3,k=5", "grid:N=100,d=2"]
            .iter()
            .enumerate()
        {
            for root in [RootPolicy::First, RootPolicy::Seeded(i as u64), RootPolicy::Point(17)] {
                let ds = generate_from_str(spec, 3).unwrap();
                let t = CoverTree::build_with(&ds, BuildConfig { root }).unwrap();
                let eta = dataset_extremes(&ds).unwrap().eta;
                let top = t.s_top().level().unwrap();
                let ceil = math::ceil_log2(eta);
                assert!(ceil - 1 <= top && top <= ceil, "{spec}: top {top}, ceil log2 eta {ceil}");
            }
        }
    }

    #[test]
    fn generated_trees_pass_verification() {
        for (seed, spec) in [
            "uniform-ball:N=500,d=3",
            "gaussian-mixture:N=400,d=2,k=3",
            "grid:N=64,d=3",
            "outlier-chain:N=200,d=2,num_outliers=4,spacing_factor=10",
        ]
        .iter()
        .enumerate()
        {
            let ds = generate_from_str(spec, seed as u64).unwrap();
            let t = CoverTree::build(&ds).unwrap();
            let report = verify_invariants(&t);
            assert!(report.is_ok(), "{spec}: {:?}", &report.violations[..report.violations.len().min(5)]);
        }
    }

    #[test]
    fn level_sets_are_nested() {
        let ds = generate_from_str("uniform-ball:N=200,d=2", 4).unwrap();
        let t = CoverTree::build(&ds).unwrap();
        let top = t.s_top().level().unwrap();
        let s_min = t.s_min().level().unwrap();
        let mut prev = t.level_set(top + 1);
        assert_eq!(prev, alloc::vec![t.node(t.root()).point]);
        for s in (s_min - 2..=top).rev() {
            let cur = t.level_set(s);
            assert!(prev.iter().all(|p| cur.contains(p)));
            prev = cur;
        }
        assert_eq!(prev.len(), ds.len());
    }

    #[test]
    fn far_outlier_never_lowers_top_scale() {
        let ds = generate_from_str("uniform-ball:N=100,d=2", 8).unwrap();
        let before = CoverTree::build(&ds).unwrap().s_top();
        let bigger = ds.with_point(&[50.0, 0.0]).unwrap();
        let after = CoverTree::build(&bigger).unwrap().s_top();
        assert!(after >= before);
    }
}
