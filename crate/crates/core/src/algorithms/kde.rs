//! Approximate kernel density estimation with absolute or relative error.
//!
//! Estimates are normalized by the total reference weight, i.e.
//! `f*(p_q) = sum_r w_r K(d(p_q, p_r)) / sum_r w_r`. A pruned combination
//! charges every pair its midpoint kernel value, which is off by less than
//! half the prune threshold per unit of reference weight, so the normalized
//! estimate stays within the threshold.

use alloc::vec;
use alloc::vec::Vec;
use core::convert::Infallible;

use super::{node_dmax, node_dmin, BoundInputs, BoundOptions};
use crate::covertree::{CoverTree, NodeId};
use crate::dataset::Dataset;
use crate::kernels::Kernel;
use crate::metric::euclidean_unchecked;
use crate::traversal::{
    dual_traverse, runtime_bound_report, BaseCaseLog, BoundReport, NodeView, RStarPolicy, Score, TraversalCounters,
    TraversalOptions, TraversalRules,
};
use crate::{math, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KdeMode {
    #[default]
    Absolute,
    Relative,
}

/// Partial sums in raw (unnormalized) units: `f_p` per query point,
/// `f_n` per query node.
#[derive(Debug, Clone)]
pub struct KdeRules<'a> {
    query: &'a Dataset,
    reference: &'a Dataset,
    kernel: Kernel,
    /// Largest kernel gap `K(d_min) - K(d_max)` that still prunes: `eps`,
    /// or `eps * K^max` in relative mode.
    threshold: f64,
    pub f_p: Vec<f64>,
    pub f_n: Vec<f64>,
}

impl<'a> KdeRules<'a> {
    pub fn new(query: &'a Dataset, reference: &'a Dataset, query_nodes: usize, kernel: Kernel, threshold: f64) -> Self {
        Self {
            query,
            reference,
            kernel,
            threshold,
            f_p: vec![0.0; query.len()],
            f_n: vec![0.0; query_nodes],
        }
    }

    /// Push node sums down to the points and normalize: a single pass over
    /// the query tree.
    pub fn extract(&self, tree: &CoverTree<'_>) -> Vec<f64> {
        let total = self.reference.total_weight() as f64;
        let mut out = vec![0.0; self.query.len()];
        let mut stack: Vec<(NodeId, f64)> = vec![(tree.root(), 0.0)];
        while let Some((id, above)) = stack.pop() {
            let acc = above + self.f_n[id.index()];
            let node = tree.node(id);
            if node.is_leaf() {
                out[node.point] = (self.f_p[node.point] + acc) / total;
            } else {
                stack.extend(node.children.iter().map(|&c| (c, acc)));
            }
        }
        out
    }
}

impl TraversalRules for KdeRules<'_> {
    type Error = Infallible;

    #[inline]
    fn base_case(&mut self, q: usize, r: usize) -> Result<f64, Infallible> {
        let k = self.kernel.value(euclidean_unchecked(self.query.point(q), self.reference.point(r)));
        self.f_p[q] += self.reference.weight(r) as f64 * k;
        Ok(k)
    }

    fn score(&mut self, q: &NodeView, r: &NodeView, log: &BaseCaseLog) -> Result<Score, Infallible> {
        let d = euclidean_unchecked(self.query.point(q.point), self.reference.point(r.point));
        let hi = self.kernel.value(node_dmin(q, r, d));
        let lo = self.kernel.value(node_dmax(q, r, d));
        let gap = hi - lo;
        if gap < self.threshold {
            self.f_n[q.id.index()] += r.descendant_count as f64 * (hi + lo) / 2.0;
            // the node-point pair may already be in f_p exactly; the node
            // charge now covers it
            if log.contains(q.point, r.point) {
                let exact = self.reference.weight(r.point) as f64 * self.kernel.value(d);
                self.f_p[q.point] = (self.f_p[q.point] - exact).max(0.0);
            }
            Ok(Score::Prune)
        } else {
            Ok(Score::Keep(gap))
        }
    }
}

/// `K(node_dmax(root_q, root_r))`: a kernel value no larger than that of any
/// query-reference pair.
pub fn kde_kmax(query: &CoverTree<'_>, reference: &CoverTree<'_>, kernel: &Kernel) -> f64 {
    let (_, dmax) = super::node_bounds(query, query.root(), reference, reference.root());
    kernel.value(dmax)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KdeOptions {
    pub kernel: Kernel,
    pub epsilon: f64,
    pub mode: KdeMode,
    pub traversal: TraversalOptions,
    pub bounds: BoundOptions,
}

impl KdeOptions {
    pub fn new(kernel: Kernel, epsilon: f64, mode: KdeMode) -> Self {
        Self { kernel, epsilon, mode, traversal: TraversalOptions::default(), bounds: BoundOptions::default() }
    }
}

#[derive(Debug, Clone)]
pub struct KdeOutput {
    pub estimates: Vec<f64>,
    pub counters: TraversalCounters,
    /// `K^max`, relative mode only.
    pub k_max: Option<f64>,
    /// Uses the measured `|R*|`; `theoretical_r_star` is
    /// `c_r^(4 + ceil(log2 zeta))` when `0 < eps < 1`.
    pub bounds: Option<BoundReport>,
}

pub fn kde_search(query: &CoverTree<'_>, reference: &CoverTree<'_>, options: &KdeOptions) -> Result<KdeOutput> {
    let (qd, rd) = (query.dataset(), reference.dataset());
    if qd.dim() != rd.dim() {
        return Err(Error::DimensionMismatch { expected: rd.dim(), found: qd.dim() });
    }
    let eps = options.epsilon;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::OutOfDomain { what: "epsilon", value: eps });
    }
    if options.traversal.strict_query_scoring {
        // scoring a child by its parent would charge the parent's f_n once
        // per child
        return Err(Error::InvalidOption("kde does not support parent scoring of query children".into()));
    }
    let k_max = match options.mode {
        KdeMode::Absolute => None,
        KdeMode::Relative => Some(kde_kmax(query, reference, &options.kernel)),
    };
    let threshold = eps * k_max.unwrap_or(1.0);
    let mut rules = KdeRules::new(qd, rd, query.node_count(), options.kernel, threshold);
    let mut traversal = options.traversal;
    traversal.skip_self_pairs = false;
    let counters = match dual_traverse(query, reference, &mut rules, &traversal) {
        Ok(c) => c,
        Err(e) => match e {},
    };
    let estimates = rules.extract(query);
    let bounds = if options.bounds.enabled {
        BoundInputs::compute(query, reference, false)?.map(|b| {
            let mut report = runtime_bound_report(&counters, b.n, b.c_r, b.i_t_query, b.theta, RStarPolicy::Measured);
            report.c_qr = b.c_qr;
            if eps < 1.0 {
                if let Ok(z) = options.kernel.zeta(eps) {
                    report.theoretical_r_star = Some(math::powf(b.c_r, f64::from(4 + math::ceil_log2(z))));
                }
            }
            report
        })
    } else {
        None
    };
    Ok(KdeOutput { estimates, counters, k_max, bounds })
}

/// Exact normalized densities by direct summation.
pub fn kde_brute_force(query: &Dataset, reference: &Dataset, kernel: &Kernel) -> Vec<f64> {
    let total = reference.total_weight() as f64;
    (0..query.len())
        .map(|q| {
            let mut s = 0.0;
            for r in 0..reference.len() {
                s += reference.weight(r) as f64 * kernel.value(euclidean_unchecked(query.point(q), reference.point(r)));
            }
            s / total
        })
        .collect()
}
