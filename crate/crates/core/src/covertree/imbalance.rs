use alloc::vec;
use alloc::vec::Vec;

use super::{CoverTree, Scale};

/// Number of implicit levels a node skips below its parent.
///
/// The root contributes nothing. An internal node contributes
/// `s_parent - s - 1`; a leaf counts only the levels down to the smallest
/// internal scale, `max(s_parent - s_min - 1, 0)`.
pub fn node_imbalance(scale: Scale, parent_scale: Option<Scale>, s_min: Scale) -> u64 {
    let Some(Scale::Level(sp)) = parent_scale else {
        return 0;
    };
    let gap = match (scale, s_min) {
        (Scale::Level(s), _) => i64::from(sp) - i64::from(s) - 1,
        (Scale::Leaf, Scale::Level(m)) => i64::from(sp) - i64::from(m) - 1,
        (Scale::Leaf, Scale::Leaf) => 0,
    };
    gap.max(0) as u64
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImbalanceReport {
    /// Contribution of each node, indexed by node id.
    pub per_node: Vec<u64>,
    pub total: u64,
    pub internal: u64,
    pub leaf: u64,
}

/// Total imbalance `i_t` of a tree.
pub fn tree_imbalance(tree: &CoverTree<'_>) -> ImbalanceReport {
    let s_min = tree.s_min();
    let mut per_node = vec![0u64; tree.node_count()];
    let (mut internal, mut leaf) = (0u64, 0u64);
    for id in tree.preorder() {
        let node = tree.node(id);
        for &c in &node.children {
            let child = tree.node(c);
            let i = node_imbalance(child.scale, Some(node.scale), s_min);
            per_node[c.index()] = i;
            if child.is_leaf() {
                leaf += i;
            } else {
                internal += i;
            }
        }
    }
    ImbalanceReport { per_node, total: internal + leaf, internal, leaf }
}
