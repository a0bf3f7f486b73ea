use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::{CoverTree, NodeId, Scale};
use crate::math;

/// One broken structural property. Distances are reported alongside the
/// bound they exceeded.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Child point farther than `2^s` from its parent at scale `s`.
    Covering { parent: NodeId, child: NodeId, distance: f64, bound: f64 },
    /// Two points of `C_s` closer than `2^s`.
    Separation { level: i32, a: usize, b: usize, distance: f64 },
    /// Descendant point outside the node's `2^(s+1)` ball.
    FurthestDescendant { node: NodeId, point: usize, distance: f64, bound: f64 },
    /// Child scale not strictly below its parent's.
    ChildScale { parent: NodeId, child: NodeId },
    /// Internal node with fewer than two children.
    InternalDegree { node: NodeId, children: usize },
    /// Internal node without a child holding its own point.
    MissingSelfChild { node: NodeId },
    /// Leaf-scale node with children, or integer-scale node without.
    LeafShape { node: NodeId },
    /// Point held by more than one leaf.
    DuplicateLeaf { point: usize, count: usize },
    /// Point held by no leaf.
    MissingPoint { point: usize },
    /// Node reachable more than once, or not at all, from the root.
    Reachability { node: NodeId, times: usize },
    NodeCount { count: usize, bound: usize },
    DescendantCount { node: NodeId, stored: u64, actual: u64 },
    /// Child index outside the arena.
    DanglingChild { parent: NodeId, child: NodeId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            Covering { parent, child, distance, bound } => {
                write!(f, "covering: node {} -> child {} at distance {distance} > {bound}", parent.0, child.0)
            }
            Separation { level, a, b, distance } => {
                write!(f, "separation: points {a} and {b} at level {level} are {distance} apart")
            }
            FurthestDescendant { node, point, distance, bound } => {
                write!(f, "furthest descendant: point {point} is {distance} from node {} (bound {bound})", node.0)
            }
            ChildScale { parent, child } => write!(f, "child {} scale not below parent {}", child.0, parent.0),
            InternalDegree { node, children } => write!(f, "internal node {} has {children} children", node.0),
            MissingSelfChild { node } => write!(f, "nesting: node {} has no self-child", node.0),
            LeafShape { node } => write!(f, "node {} scale disagrees with its child list", node.0),
            DuplicateLeaf { point, count } => write!(f, "point {point} appears in {count} leaves"),
            MissingPoint { point } => write!(f, "point {point} appears in no leaf"),
            Reachability { node, times } => write!(f, "node {} reached {times} times from the root", node.0),
            NodeCount { count, bound } => write!(f, "{count} nodes exceeds 2N-1 = {bound}"),
            DescendantCount { node, stored, actual } => {
                write!(f, "node {} stores descendant count {stored}, actual {actual}", node.0)
            }
            DanglingChild { parent, child } => write!(f, "node {} has out-of-range child {}", parent.0, child.0),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    pub violations: Vec<Violation>,
    /// Number of distinct levels at which separation was checked.
    pub levels_checked: usize,
}

impl VerificationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check covering, separation, nesting and the explicit-representation
/// shape of `tree` against its dataset.
///
/// Covering and the furthest-descendant bound allow a relative slack of
/// [`math::INVARIANT_RTOL`]. Separation is strict: `C_s` only changes at
/// levels where some node is introduced, and a pair can only become too
/// close at the level where its younger point arrives, so only those pairs
/// are checked.
pub fn verify_invariants(tree: &CoverTree<'_>) -> VerificationReport {
    let mut report = VerificationReport::default();
    let v = &mut report.violations;
    let data = tree.dataset();
    let n = data.len();
    let nodes = tree.nodes();
    let count = nodes.len();

    if count > 2 * n - 1 {
        v.push(Violation::NodeCount { count, bound: 2 * n - 1 });
    }

    // shape and reachability
    let mut reached = vec![0usize; count];
    let mut order = Vec::with_capacity(count);
    let mut stack = vec![tree.root()];
    let mut dangling = false;
    while let Some(id) = stack.pop() {
        reached[id.index()] += 1;
        if reached[id.index()] > 1 {
            continue;
        }
        order.push(id);
        let node = &nodes[id.index()];
        for &c in &node.children {
            if c.index() >= count {
                v.push(Violation::DanglingChild { parent: id, child: c });
                dangling = true;
            } else {
                stack.push(c);
            }
        }
    }
    for (i, &times) in reached.iter().enumerate() {
        if times != 1 {
            v.push(Violation::Reachability { node: NodeId(i as u32), times });
        }
    }
    if dangling || reached.iter().any(|&t| t > 1) {
        // the remaining checks assume a proper tree
        return report;
    }

    let mut leaves_per_point = vec![0usize; n];
    for &id in &order {
        let node = &nodes[id.index()];
        if node.scale.is_leaf() != node.children.is_empty() {
            v.push(Violation::LeafShape { node: id });
        }
        if node.is_leaf() {
            leaves_per_point[node.point] += 1;
            continue;
        }
        if node.children.len() < 2 {
            v.push(Violation::InternalDegree { node: id, children: node.children.len() });
        }
        if !node.children.iter().any(|&c| nodes[c.index()].point == node.point) {
            v.push(Violation::MissingSelfChild { node: id });
        }
        let bound = match node.scale {
            Scale::Level(s) => math::pow2(s),
            Scale::Leaf => 0.0,
        };
        for &c in &node.children {
            let child = &nodes[c.index()];
            if child.scale >= node.scale {
                v.push(Violation::ChildScale { parent: id, child: c });
            }
            let d = data.distance(node.point, child.point);
            if !math::le_tol(d, bound) {
                v.push(Violation::Covering { parent: id, child: c, distance: d, bound });
            }
        }
    }
    for (point, &c) in leaves_per_point.iter().enumerate() {
        match c {
            0 => v.push(Violation::MissingPoint { point }),
            1 => {}
            count => v.push(Violation::DuplicateLeaf { point, count }),
        }
    }

    // descendant counts, bottom-up
    let mut actual = vec![0u64; count];
    for &id in order.iter().rev() {
        let node = &nodes[id.index()];
        actual[id.index()] = if node.is_leaf() {
            data.weight(node.point)
        } else {
            node.children.iter().map(|c| actual[c.index()]).sum()
        };
        if actual[id.index()] != node.descendant_count {
            v.push(Violation::DescendantCount { node: id, stored: node.descendant_count, actual: actual[id.index()] });
        }
    }

    // furthest descendant: walk each leaf's ancestor chain
    let mut anc: Vec<NodeId> = Vec::new();
    let mut walk = vec![(tree.root(), 0usize)];
    while let Some((id, depth)) = walk.pop() {
        anc.truncate(depth);
        let node = &nodes[id.index()];
        if node.is_leaf() {
            for &a in &anc {
                let an = &nodes[a.index()];
                let d = data.distance(an.point, node.point);
                let bound = an.lambda();
                if !math::le_tol(d, bound) {
                    v.push(Violation::FurthestDescendant { node: a, point: node.point, distance: d, bound });
                }
            }
        } else {
            anc.push(id);
            for &c in &node.children {
                walk.push((c, depth + 1));
            }
        }
    }

    // separation: a point enters C_s at parent scale - 1 of its topmost node
    let root_point = nodes[tree.root().index()].point;
    let mut intro = vec![i32::MIN; n];
    for &id in &order {
        if let Scale::Level(s) = nodes[id.index()].scale {
            for &c in &nodes[id.index()].children {
                let p = nodes[c.index()].point;
                if p != root_point {
                    intro[p] = intro[p].max(s - 1);
                }
            }
        }
    }
    let mut by_level: Vec<(i32, usize)> =
        (0..n).filter(|&p| p != root_point && intro[p] != i32::MIN).map(|p| (intro[p], p)).collect();
    by_level.sort_unstable_by(|a, b| b.cmp(a));
    let mut present = vec![root_point];
    let mut start = 0;
    while start < by_level.len() {
        let level = by_level[start].0;
        let mut end = start;
        while end < by_level.len() && by_level[end].0 == level {
            end += 1;
        }
        let radius = math::pow2(level);
        let older = present.len();
        for &(_, p) in &by_level[start..end] {
            present.push(p);
        }
        for i in older..present.len() {
            for j in 0..i {
                let (a, b) = (present[j], present[i]);
                let d = data.distance(a, b);
                if d <= radius {
                    v.push(Violation::Separation { level, a: a.min(b), b: a.max(b), distance: d });
                }
            }
        }
        report.levels_checked += 1;
        start = end;
    }
    report
}
