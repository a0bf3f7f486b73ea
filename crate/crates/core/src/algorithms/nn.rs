//! Single nearest-neighbor search.

use alloc::vec;
use alloc::vec::Vec;
use core::convert::Infallible;

use super::{is_monochromatic, node_dmin, BoundInputs, BoundOptions};
use crate::covertree::CoverTree;
use crate::dataset::Dataset;
use crate::metric::euclidean_unchecked;
use crate::traversal::{
    dual_traverse, runtime_bound_report, BaseCaseLog, BoundReport, NodeView, RStarPolicy, Score, TraversalCounters,
    TraversalOptions, TraversalRules,
};
use crate::{math, Error, Result};

/// Candidate neighbor per query point, tightened by every base case.
#[derive(Debug, Clone)]
pub struct NnRules<'a> {
    query: &'a Dataset,
    reference: &'a Dataset,
    exclude_self: bool,
    pub distances: Vec<f64>,
    pub neighbors: Vec<Option<usize>>,
}

impl<'a> NnRules<'a> {
    /// `exclude_self` ignores pairs with equal ids; only meaningful when
    /// both sides are the same dataset.
    pub fn new(query: &'a Dataset, reference: &'a Dataset, exclude_self: bool) -> Self {
        let n = query.len();
        Self { query, reference, exclude_self, distances: vec![f64::INFINITY; n], neighbors: vec![None; n] }
    }

    /// `D[p_q] + lambda_q`: no descendant of the query node has its
    /// neighbor farther than this.
    #[inline]
    pub fn bound(&self, q: &NodeView) -> f64 {
        self.distances[q.point] + q.lambda
    }
}

impl TraversalRules for NnRules<'_> {
    type Error = Infallible;

    #[inline]
    fn base_case(&mut self, q: usize, r: usize) -> Result<f64, Infallible> {
        if self.exclude_self && q == r {
            return Ok(0.0);
        }
        let d = euclidean_unchecked(self.query.point(q), self.reference.point(r));
        if d < self.distances[q] {
            self.distances[q] = d;
            self.neighbors[q] = Some(r);
        }
        Ok(d)
    }

    #[inline]
    fn score(&mut self, q: &NodeView, r: &NodeView, _: &BaseCaseLog) -> Result<Score, Infallible> {
        let d = euclidean_unchecked(self.query.point(q.point), self.reference.point(r.point));
        let dmin = node_dmin(q, r, d);
        Ok(if dmin >= self.bound(q) { Score::Prune } else { Score::Keep(dmin) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NnOptions {
    /// Skip `p_q = p_r` in monochromatic runs.
    pub exclude_self: bool,
    pub traversal: TraversalOptions,
    pub bounds: BoundOptions,
}

impl Default for NnOptions {
    fn default() -> Self {
        Self { exclude_self: true, traversal: TraversalOptions::default(), bounds: BoundOptions::default() }
    }
}

#[derive(Debug, Clone)]
pub struct NnOutput {
    pub neighbors: Vec<Option<usize>>,
    pub distances: Vec<f64>,
    pub counters: TraversalCounters,
    /// Uses the measured `|R*|`; `theoretical_r_star` is `c_qr^5` when
    /// `c_qr` is known.
    pub bounds: Option<BoundReport>,
}

/// Exact 1-nearest neighbors of every query point. Passing the same tree
/// (or two trees over the same dataset) makes the run monochromatic.
pub fn nn_search(query: &CoverTree<'_>, reference: &CoverTree<'_>, options: &NnOptions) -> Result<NnOutput> {
    let (qd, rd) = (query.dataset(), reference.dataset());
    if qd.dim() != rd.dim() {
        return Err(Error::DimensionMismatch { expected: rd.dim(), found: qd.dim() });
    }
    let mono = is_monochromatic(query, reference);
    let exclude = mono && options.exclude_self;
    let mut rules = NnRules::new(qd, rd, exclude);
    let mut traversal = options.traversal;
    traversal.skip_self_pairs |= exclude;
    let counters = match dual_traverse(query, reference, &mut rules, &traversal) {
        Ok(c) => c,
        Err(e) => match e {},
    };
    let bounds = if options.bounds.enabled {
        BoundInputs::compute(query, reference, options.bounds.c_qr)?.map(|b| {
            let mut report = runtime_bound_report(&counters, b.n, b.c_r, b.i_t_query, b.theta, RStarPolicy::Measured);
            report.c_qr = b.c_qr;
            report.theoretical_r_star = b.c_qr.map(|c| math::powf(c, 5.0));
            report
        })
    } else {
        None
    };
    Ok(NnOutput { neighbors: rules.neighbors, distances: rules.distances, counters, bounds })
}

/// `O(N_q N_r)` scan; ties go to the smallest reference id.
pub fn nn_brute_force(query: &Dataset, reference: &Dataset, exclude_self: bool) -> (Vec<Option<usize>>, Vec<f64>) {
    let mut ids = Vec::with_capacity(query.len());
    let mut dists = Vec::with_capacity(query.len());
    for q in 0..query.len() {
        let mut best = (None, f64::INFINITY);
        for r in 0..reference.len() {
            if exclude_self && q == r {
                continue;
            }
            let d = euclidean_unchecked(query.point(q), reference.point(r));
            if d < best.1 {
                best = (Some(r), d);
            }
        }
        ids.push(best.0);
        dists.push(best.1);
    }
    (ids, dists)
}
