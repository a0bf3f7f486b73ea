//! Range search and range count over a closed distance interval `[l, u]`.

use alloc::vec;
use alloc::vec::Vec;
use core::convert::Infallible;

use super::{is_monochromatic, node_dmax, node_dmin, BoundInputs, BoundOptions};
use crate::covertree::CoverTree;
use crate::dataset::Dataset;
use crate::metric::euclidean_unchecked;
use crate::traversal::{
    dual_traverse, runtime_bound_report, BaseCaseLog, BoundReport, NodeView, RStarPolicy, Score, TraversalCounters,
    TraversalOptions, TraversalRules,
};
use crate::{math, Error, Result};

/// Slack on node bounds so rounding in `d - lambda` never prunes a pair
/// sitting exactly on the interval boundary.
const BOUND_RTOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct RangeRules<'a> {
    query: &'a Dataset,
    reference: &'a Dataset,
    lower: f64,
    upper: f64,
    count_only: bool,
    /// Prune unless one of the two node bounds falls inside the interval,
    /// missing combinations whose bounds bracket it.
    literal: bool,
    pub results: Vec<Vec<usize>>,
    pub counts: Vec<u64>,
}

impl<'a> RangeRules<'a> {
    pub fn new(query: &'a Dataset, reference: &'a Dataset, lower: f64, upper: f64, count_only: bool) -> Result<Self> {
        if !(lower <= upper) || lower < 0.0 {
            return Err(Error::InvalidRange { lower, upper });
        }
        let n = query.len();
        Ok(Self {
            query,
            reference,
            lower,
            upper,
            count_only,
            literal: false,
            results: if count_only { Vec::new() } else { vec![Vec::new(); n] },
            counts: vec![0; n],
        })
    }

    /// Switch to the two-clause prune test that ignores bracketing bounds.
    pub fn literal(mut self, on: bool) -> Self {
        self.literal = on;
        self
    }

    #[inline]
    fn contains(&self, d: f64) -> bool {
        self.lower <= d && d <= self.upper
    }
}

impl TraversalRules for RangeRules<'_> {
    type Error = Infallible;

    #[inline]
    fn base_case(&mut self, q: usize, r: usize) -> Result<f64, Infallible> {
        let d = euclidean_unchecked(self.query.point(q), self.reference.point(r));
        if self.contains(d) {
            self.counts[q] += 1;
            if !self.count_only {
                self.results[q].push(r);
            }
        }
        Ok(d)
    }

    fn score(&mut self, q: &NodeView, r: &NodeView, _: &BaseCaseLog) -> Result<Score, Infallible> {
        let d = euclidean_unchecked(self.query.point(q.point), self.reference.point(r.point));
        let (dmin, dmax) = (node_dmin(q, r, d), node_dmax(q, r, d));
        let keep = if self.literal {
            self.contains(dmin) || self.contains(dmax)
        } else {
            let slack = BOUND_RTOL * dmax;
            dmin - slack <= self.upper && dmax + slack >= self.lower
        };
        Ok(if keep { Score::Keep(dmin) } else { Score::Prune })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeOptions {
    pub lower: f64,
    pub upper: f64,
    pub count_only: bool,
    /// Use the two-clause prune test (demonstrably incomplete).
    pub literal_score: bool,
    /// Skip `p_q = p_r` in monochromatic runs.
    pub exclude_self: bool,
    /// Expansion parameter for the difficulty statistics in the bound report.
    pub alpha: f64,
    pub traversal: TraversalOptions,
    pub bounds: BoundOptions,
}

impl RangeOptions {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self {
            lower,
            upper,
            count_only: false,
            literal_score: false,
            exclude_self: false,
            alpha: 1.0 / 3.0,
            traversal: TraversalOptions::default(),
            bounds: BoundOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RangeOutput {
    /// Sorted reference ids per query; empty when counting only.
    pub results: Vec<Vec<usize>>,
    pub counts: Vec<u64>,
    pub counters: TraversalCounters,
    pub difficulty: Option<RangeDifficulty>,
    /// Uses the measured `|R*|`; `theoretical_r_star` is
    /// `max(c_r^(4 + beta), |S_max| + C)`.
    pub bounds: Option<BoundReport>,
}

pub fn range_search(query: &CoverTree<'_>, reference: &CoverTree<'_>, options: &RangeOptions) -> Result<RangeOutput> {
    let (qd, rd) = (query.dataset(), reference.dataset());
    if qd.dim() != rd.dim() {
        return Err(Error::DimensionMismatch { expected: rd.dim(), found: qd.dim() });
    }
    let mut rules =
        RangeRules::new(qd, rd, options.lower, options.upper, options.count_only)?.literal(options.literal_score);
    let mut traversal = options.traversal;
    traversal.skip_self_pairs |= options.exclude_self && is_monochromatic(query, reference);
    let counters = match dual_traverse(query, reference, &mut rules, &traversal) {
        Ok(c) => c,
        Err(e) => match e {},
    };
    let mut results = rules.results;
    results.iter_mut().for_each(|r| r.sort_unstable());
    let (mut difficulty, mut bounds) = (None, None);
    if options.bounds.enabled {
        if let Some(b) = BoundInputs::compute(query, reference, false)? {
            let diff = alpha_expansion_stats(qd, rd, options.lower, options.upper, options.alpha)?;
            let mut report = runtime_bound_report(&counters, b.n, b.c_r, b.i_t_query, b.theta, RStarPolicy::Measured);
            report.c_qr = b.c_qr;
            report.theoretical_r_star = Some(diff.r_star_bound(b.c_r));
            difficulty = Some(diff);
            bounds = Some(report);
        }
    }
    Ok(RangeOutput { results, counts: rules.counts, counters, difficulty, bounds })
}

/// Sorted in-range reference ids for every query by exhaustive scan.
pub fn range_brute_force(query: &Dataset, reference: &Dataset, lower: f64, upper: f64) -> Vec<Vec<usize>> {
    (0..query.len())
        .map(|q| {
            (0..reference.len())
                .filter(|&r| {
                    let d = euclidean_unchecked(query.point(q), reference.point(r));
                    lower <= d && d <= upper
                })
                .collect()
        })
        .collect()
}

/// How much harder the problem gets when the range is widened.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeDifficulty {
    /// `max_q |S[p_q]|`.
    pub s_max_size: usize,
    pub alpha: f64,
    /// `max_q |S^alpha[p_q] \ S[p_q]|` for the widened range
    /// `[(1 - alpha) l, (1 + alpha) u]`.
    pub c: usize,
    /// `ceil(log2(1 + 1/alpha))`.
    pub beta: i32,
}

impl RangeDifficulty {
    /// `max(c_r^(4 + beta), |S_max| + C)`.
    pub fn r_star_bound(&self, c_r: f64) -> f64 {
        math::powf(c_r, f64::from(4 + self.beta)).max((self.s_max_size + self.c) as f64)
    }

    /// Exponent of the simplified `c_r^(8 + beta)` form, valid when
    /// `|S_max| + C <= c_r^(4 + beta)`.
    pub fn simplified_exponent(&self, c_r: f64) -> Option<i32> {
        ((self.s_max_size + self.c) as f64 <= math::powf(c_r, f64::from(4 + self.beta))).then_some(8 + self.beta)
    }
}

pub fn beta_for_alpha(alpha: f64) -> i32 {
    math::ceil_log2(1.0 + 1.0 / alpha)
}

/// Brute-force `|S_max|`, `C` and `beta`.
pub fn alpha_expansion_stats(query: &Dataset, reference: &Dataset, lower: f64, upper: f64, alpha: f64) -> Result<RangeDifficulty> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::OutOfDomain { what: "alpha", value: alpha });
    }
    if !(lower <= upper) {
        return Err(Error::InvalidRange { lower, upper });
    }
    let (wl, wu) = ((1.0 - alpha) * lower, (1.0 + alpha) * upper);
    let (mut s_max, mut c) = (0, 0);
    for q in 0..query.len() {
        let (mut inside, mut widened) = (0usize, 0usize);
        for r in 0..reference.len() {
            let d = euclidean_unchecked(query.point(q), reference.point(r));
            inside += usize::from(lower <= d && d <= upper);
            widened += usize::from(wl <= d && d <= wu);
        }
        s_max = s_max.max(inside);
        // [l, u] lies inside the widened range, so the difference of counts
        // is the size of the set difference
        c = c.max(widened - inside);
    }
    Ok(RangeDifficulty { s_max_size: s_max, alpha, c, beta: beta_for_alpha(alpha) })
}
