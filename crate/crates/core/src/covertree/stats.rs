use alloc::vec;

use super::{CoverTree, Scale};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeStats {
    pub node_count: usize,
    pub max_children: usize,
    /// Edges on the longest root-to-leaf path.
    pub max_depth: usize,
    pub s_top: Scale,
    pub s_min: Scale,
    pub leaf_count: usize,
}

impl TreeStats {
    /// Expansion-constant comparators: the `c^4` width bound and
    /// `c^2 log2 N` depth bound.
    pub fn comparators(&self, c: f64) -> (f64, f64) {
        let n = self.leaf_count.max(1) as f64;
        (math::powf(c, 4.0), c * c * math::log2(n).max(1.0))
    }
}

pub fn tree_stats(tree: &CoverTree<'_>) -> TreeStats {
    let mut depth = vec![0usize; tree.node_count()];
    let (mut max_children, mut max_depth, mut leaf_count) = (0, 0, 0);
    for id in tree.preorder() {
        let node = tree.node(id);
        let d = depth[id.index()];
        max_depth = max_depth.max(d);
        max_children = max_children.max(node.children.len());
        if node.is_leaf() {
            leaf_count += 1;
        }
        for &c in &node.children {
            depth[c.index()] = d + 1;
        }
    }
    TreeStats {
        node_count: tree.node_count(),
        max_children,
        max_depth,
        s_top: tree.s_top(),
        s_min: tree.s_min(),
        leaf_count,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PackingCheck {
    pub count: usize,
    pub bound: f64,
}

impl PackingCheck {
    pub fn holds(&self) -> bool {
        self.count as f64 <= self.bound
    }
}

/// Count points of `C_s` inside the closed ball `B(p, rho * 2^s)` and
/// compare with `c^(2 + ceil(log2 rho))`.
pub fn level_packing_check(tree: &CoverTree<'_>, p: &[f64], rho: f64, s: i32, c: f64) -> PackingCheck {
    let data = tree.dataset();
    let radius = rho * math::pow2(s);
    let count = tree.level_set(s).into_iter().filter(|&q| data.distance_to(q, p) <= radius).count();
    let exponent = 2 + math::ceil_log2(rho);
    PackingCheck { count, bound: math::powf(c, f64::from(exponent)) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::expansion_constant;
    use crate::dataset::Dataset;
    use crate::generate::generate_from_str;

    #[test]
    fn single_point_stats() {
        let ds = Dataset::from_rows(&[[0.5, 0.5, 0.5]]).unwrap();
        let t = CoverTree::build(&ds).unwrap();
        let s = tree_stats(&t);
        assert_eq!(
            s,
            TreeStats { node_count: 1, max_children: 0, max_depth: 0, s_top: Scale::Leaf, s_min: Scale::Leaf, leaf_count: 1 }
        );
    }

    #[test]
    fn stats_of_generated_tree() {
        let ds = generate_from_str("uniform-ball:N=256,d=2", 1).unwrap();
        let t = CoverTree::build(&ds).unwrap();
        let s = tree_stats(&t);
        assert_eq!(s.leaf_count, 256);
        assert!(s.node_count <= 511);
        assert!(s.max_depth >= 1 && s.max_children >= 2);
    }

    #[test]
    fn packing_on_small_set() {
        let ds = generate_from_str("gaussian-mixture:N=150,d=2,k=3", 2).unwrap();
        let t = CoverTree::build(&ds).unwrap();
        let c = expansion_constant(&ds, None).unwrap().c;
        let top = t.s_top().level().unwrap();
        for s in [top - 4, top - 2, top] {
            for rho in [0.5, 1.0, 3.0, 6.0] {
                for q in [0usize, 17, 99] {
                    let r = level_packing_check(&t, ds.point(q), rho, s, c);
                    assert!(r.holds(), "s={s} rho={rho} q={q}: {r:?}");
                }
            }
        }
    }
}
