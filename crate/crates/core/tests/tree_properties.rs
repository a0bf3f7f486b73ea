use dualtree_core::analysis::{dataset_extremes, expansion_constant};
use dualtree_core::covertree::{level_packing_check, tree_imbalance, tree_stats, verify_invariants, Violation};
use dualtree_core::{math, BuildConfig, CoverNode, CoverTree, Dataset, NodeId, RootPolicy, Scale};
use proptest::prelude::*;

/// Small point sets on a coarse lattice so that exact distance ties and
/// power-of-two distances show up often.
fn lattice_points(max_n: usize, dim: usize) -> impl Strategy<Value = Dataset> {
    prop::collection::vec(prop::collection::vec(-16i32..16, dim), 1..max_n).prop_map(move |rows| {
        let mut rows: Vec<Vec<f64>> = rows.into_iter().map(|r| r.into_iter().map(|x| x as f64 / 4.0).collect()).collect();
        rows.sort_by(|a, b| a.partial_cmp(b).unwrap());
        rows.dedup();
        Dataset::from_rows(&rows).unwrap()
    })
}

fn real_points(max_n: usize, dim: usize) -> impl Strategy<Value = Dataset> {
    prop::collection::vec(prop::collection::vec(-100.0f64..100.0, dim), 2..max_n)
        .prop_filter_map("duplicates", |rows| {
            let ds = Dataset::from_rows(&rows).ok()?;
            ds.find_duplicate().is_none().then_some(ds)
        })
}

/// Separation and nesting re-derived without the verifier: walk every
/// integer level between the extremes and compare `C_s` pairwise.
fn level_oracle(t: &CoverTree<'_>) -> Result<(), String> {
    let ds = t.dataset();
    let (Some(top), Some(bottom)) = (t.s_top().level(), t.s_min().level()) else {
        return Ok(());
    };
    let mut prev: Vec<usize> = vec![t.node(t.root()).point];
    for s in (bottom - 1..=top).rev() {
        let cur = t.level_set(s);
        if !prev.iter().all(|p| cur.contains(p)) {
            return Err(format!("C_{} not contained in C_{s}", s + 1));
        }
        for (i, &a) in cur.iter().enumerate() {
            for &b in &cur[..i] {
                if ds.distance(a, b) <= math::pow2(s) {
                    return Err(format!("points {a},{b} at level {s}: {}", ds.distance(a, b)));
                }
            }
        }
        prev = cur;
    }
    if prev.len() != ds.len() {
        return Err(format!("bottom level holds {} of {} points", prev.len(), ds.len()));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lattice_trees_are_valid(ds in lattice_points(60, 2), root in 0usize..60) {
        let root = RootPolicy::Point(root % ds.len());
        let t = CoverTree::build_with(&ds, BuildConfig { root }).unwrap();
        let report = verify_invariants(&t);
        prop_assert!(report.is_ok(), "{:?}", report.violations);
        prop_assert!(t.node_count() < 2 * ds.len());
        prop_assert_eq!(tree_stats(&t).leaf_count, ds.len());
        prop_assert_eq!(level_oracle(&t), Ok(()));
        if ds.len() > 1 {
            let eta = dataset_extremes(&ds).unwrap().eta;
            let top = t.s_top().level().unwrap();
            prop_assert!(top <= math::ceil_log2(eta) && top >= math::ceil_log2(eta) - 1);
        }
    }

    #[test]
    fn one_dimensional_trees_are_valid(ds in lattice_points(80, 1)) {
        let t = CoverTree::build(&ds).unwrap();
        prop_assert!(verify_invariants(&t).is_ok());
        prop_assert_eq!(level_oracle(&t), Ok(()));
    }

    #[test]
    fn real_valued_trees_are_valid(ds in real_points(50, 3), seed in any::<u64>()) {
        let t = CoverTree::build_with(&ds, BuildConfig { root: RootPolicy::Seeded(seed) }).unwrap();
        prop_assert!(verify_invariants(&t).is_ok());
        prop_assert_eq!(level_oracle(&t), Ok(()));
        let imb = tree_imbalance(&t);
        prop_assert_eq!(imb.total, imb.per_node.iter().sum::<u64>());
    }

    #[test]
    fn packing_bound_holds(ds in real_points(40, 2), probe in prop::collection::vec(-120.0f64..120.0, 2),
                           rho_exp in 1i32..4, level_offset in 0i32..8) {
        let t = CoverTree::build(&ds).unwrap();
        let c = expansion_constant(&ds, None).unwrap().c;
        let s = t.s_top().level().unwrap() - level_offset;
        let rho = f64::from(1 << rho_exp);
        let r = level_packing_check(&t, &probe, rho, s, c);
        prop_assert!(r.holds(), "{r:?}");
        let on_point = level_packing_check(&t, ds.point(0), rho, s, c);
        prop_assert!(on_point.holds(), "{on_point:?}");
    }
}

#[test]
fn packing_with_empty_ball() {
    let ds = Dataset::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]]).unwrap();
    let t = CoverTree::build(&ds).unwrap();
    let c = expansion_constant(&ds, None).unwrap().c;
    let r = level_packing_check(&t, &[100.0, 100.0], 0.01, 0, c);
    assert_eq!(r.count, 0);
    assert!(r.holds());
}

#[test]
fn re_parented_child_is_a_covering_violation() {
    let ds = Dataset::from_rows(&[[0.0], [1.0], [1.75], [6.0]]).unwrap();
    let t = CoverTree::build(&ds).unwrap();
    assert!(verify_invariants(&t).is_ok());
    let (mut nodes, root) = t.clone().into_nodes();
    // move the leaf of point 3 under the smallest internal node
    let small = (0..nodes.len())
        .filter(|&i| !nodes[i].children.is_empty())
        .min_by_key(|&i| nodes[i].scale)
        .unwrap();
    let leaf3 = (0..nodes.len()).find(|&i| nodes[i].children.is_empty() && nodes[i].point == 3).unwrap();
    for n in nodes.iter_mut() {
        n.children.retain(|c| c.index() != leaf3);
    }
    nodes[small].children.push(NodeId(leaf3 as u32));
    let mut broken = CoverTree::from_nodes(&ds, nodes, root);
    broken.recompute_descendant_counts();
    let r = verify_invariants(&broken);
    assert!(r.violations.iter().any(|v| matches!(v, Violation::Covering { .. })), "{:?}", r.violations);
}

#[test]
fn duplicated_leaf_is_reported() {
    let ds = Dataset::from_rows(&[[0.0], [1.0], [3.0]]).unwrap();
    let t = CoverTree::build(&ds).unwrap();
    let (mut nodes, root) = t.into_nodes();
    nodes.push(CoverNode::leaf(1, 1));
    let extra = NodeId(nodes.len() as u32 - 1);
    nodes[root.index()].children.push(extra);
    let broken = CoverTree::from_nodes(&ds, nodes, root);
    let r = verify_invariants(&broken);
    assert!(r.violations.contains(&Violation::DuplicateLeaf { point: 1, count: 2 }), "{:?}", r.violations);
}

#[test]
fn balanced_and_chain_imbalance() {
    // every child exactly one level below its parent, leaves at s_min
    let ds = Dataset::from_rows(&[[0.0], [2.0], [1.0], [3.0]]).unwrap();
    let node = |point, s: i32, c: [u32; 2], n| CoverNode {
        point,
        scale: Scale::Level(s),
        children: c.iter().map(|&c| NodeId(c)).collect(),
        descendant_count: n,
    };
    let nodes = vec![
        node(0, 1, [1, 2], 4),
        node(0, 0, [3, 4], 2),
        node(1, 0, [5, 6], 2),
        CoverNode::leaf(0, 1),
        CoverNode::leaf(2, 1),
        CoverNode::leaf(1, 1),
        CoverNode::leaf(3, 1),
    ];
    let t = CoverTree::from_nodes(&ds, nodes, NodeId(0));
    assert!(verify_invariants(&t).is_ok());
    assert_eq!(tree_imbalance(&t).total, 0);

    // geometric chain: 0, then points at 2^-k; every leaf hangs far below
    // the root while s_min is tiny
    let n = 12;
    let rows: Vec<[f64; 1]> = (0..n).map(|k| [if k == 0 { 0.0 } else { math::pow2(-k) }]).collect();
    let ds = Dataset::from_rows(&rows).unwrap();
    let t = CoverTree::build(&ds).unwrap();
    assert!(verify_invariants(&t).is_ok());
    let imb = tree_imbalance(&t);
    assert!(imb.total > 0);
    assert_eq!(t.s_min(), Scale::Level(-(n - 1)));
}

#[test]
fn max_children_below_c_to_the_fourth() {
    for (seed, n, d) in [(1u64, 300usize, 2usize), (2, 500, 3), (3, 1000, 5)] {
        let ds = dualtree_core::generate::generate_from_str(&format!("uniform-ball:N={n},d={d}"), seed).unwrap();
        let t = CoverTree::build(&ds).unwrap();
        let c = expansion_constant(&ds, None).unwrap().c;
        let stats = tree_stats(&t);
        assert!((stats.max_children as f64) <= stats.comparators(c).0, "{stats:?} c={c}");
    }
}
