//! Nearest-neighbor search, approximate kernel density estimation and range
//! search as traversal rule sets, each with a driver and a brute-force
//! oracle.

pub mod kde;
pub mod nn;
pub mod range;

use crate::analysis::{dataset_extremes, expansion_constant};
use crate::covertree::{tree_imbalance, CoverTree, NodeId};
use crate::traversal::{theta_estimate, NodeView};
use crate::Result;

pub use kde::{kde_brute_force, kde_kmax, kde_search, KdeMode, KdeOptions, KdeOutput, KdeRules};
pub use nn::{nn_brute_force, nn_search, NnOptions, NnOutput, NnRules};
pub use range::{
    alpha_expansion_stats, beta_for_alpha, range_brute_force, range_search, RangeDifficulty, RangeOptions, RangeOutput, RangeRules,
};

/// Lower bound on the distance between any descendants of two nodes.
#[inline]
pub fn node_dmin(q: &NodeView, r: &NodeView, point_distance: f64) -> f64 {
    let v = point_distance - q.lambda - r.lambda;
    if v > 0.0 {
        v
    } else {
        0.0
    }
}

/// Upper bound on the distance between any descendants of two nodes.
#[inline]
pub fn node_dmax(q: &NodeView, r: &NodeView, point_distance: f64) -> f64 {
    point_distance + q.lambda + r.lambda
}

/// `(node_dmin, node_dmax)` for nodes of two trees.
pub fn node_bounds(qt: &CoverTree<'_>, q: NodeId, rt: &CoverTree<'_>, r: NodeId) -> (f64, f64) {
    let (qv, rv) = (NodeView::of(qt, q), NodeView::of(rt, r));
    let d = point_distance(qt, qv.point, rt, rv.point);
    (node_dmin(&qv, &rv, d), node_dmax(&qv, &rv, d))
}

#[inline]
pub(crate) fn point_distance(qt: &CoverTree<'_>, q: usize, rt: &CoverTree<'_>, r: usize) -> f64 {
    crate::metric::euclidean_unchecked(qt.dataset().point(q), rt.dataset().point(r))
}

/// Whether both trees index the very same dataset.
pub fn is_monochromatic(query: &CoverTree<'_>, reference: &CoverTree<'_>) -> bool {
    core::ptr::eq(query.dataset(), reference.dataset())
}

/// What to compute for the bound reports. The expansion constants are
/// exact `O(N^2 log N)` scans, and the bichromatic `c_qr` repeats that scan
/// once per query point, so both are opt-in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BoundOptions {
    pub enabled: bool,
    /// Compute `c_qr` for bichromatic runs (monochromatic runs reuse `c_r`).
    pub c_qr: bool,
}

/// Brute-force inputs shared by the per-problem bound reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub n: usize,
    pub c_r: f64,
    pub c_qr: Option<f64>,
    pub i_t_query: u64,
    pub theta: Option<f64>,
}

impl BoundInputs {
    /// `None` when either dataset is too small for the expansion constant.
    pub fn compute(query: &CoverTree<'_>, reference: &CoverTree<'_>, want_c_qr: bool) -> Result<Option<Self>> {
        let (qd, rd) = (query.dataset(), reference.dataset());
        if qd.len() < 2 || rd.len() < 2 {
            return Ok(None);
        }
        let c_r = expansion_constant(rd, None)?.c;
        let mono = is_monochromatic(query, reference);
        let n = qd.len().max(rd.len());
        let theta = if mono { None } else { Some(theta_estimate(&dataset_extremes(qd)?, &dataset_extremes(rd)?, n)) };
        let c_qr = if mono {
            Some(c_r)
        } else if want_c_qr {
            let mut best = c_r;
            for p in qd.points() {
                // the union with a point already present is the set itself
                if rd.points().any(|r| r == p) {
                    continue;
                }
                best = best.max(expansion_constant(rd, Some(p))?.c);
            }
            Some(best)
        } else {
            None
        };
        Ok(Some(Self { n, c_r, c_qr, i_t_query: tree_imbalance(query).total, theta }))
    }
}
