//! The standard pruning dual-tree traversal for cover trees.
//!
//! A query node is paired with a *set* of reference nodes `R`. While the
//! query scale is below the largest non-leaf scale in `R`, the traversal
//! performs a reference recursion: base cases against every member of `R`,
//! then the largest-scale members are replaced by their children and the
//! result is score-filtered. Otherwise it descends into the query children,
//! each of which filters `R` on its own. A query leaf facing only reference
//! leaves runs its final base cases and stops.

mod bounds;

use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashSet;

use crate::covertree::{CoverTree, NodeId, Scale};
use crate::math;

pub use bounds::{pre_recursion_estimate, runtime_bound_report, theta_estimate, BoundReport, RStarPolicy};

/// Outcome of scoring a node combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Score {
    /// Keep the combination; the value is informational.
    Keep(f64),
    /// Discard the combination and everything beneath it.
    Prune,
}

impl Score {
    pub fn is_prune(self) -> bool {
        matches!(self, Score::Prune)
    }
}

/// What a rule set sees of a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeView {
    pub id: NodeId,
    pub point: usize,
    pub scale: Scale,
    /// Furthest-descendant bound `2^(s+1)`, zero at leaves.
    pub lambda: f64,
    pub descendant_count: u64,
}

impl NodeView {
    pub fn of(tree: &CoverTree<'_>, id: NodeId) -> Self {
        let n = tree.node(id);
        Self { id, point: n.point, scale: n.scale, lambda: n.lambda(), descendant_count: n.descendant_count }
    }
}

/// Record of the point pairs already handed to `base_case`.
#[derive(Debug, Clone, Default)]
pub struct BaseCaseLog {
    delivered: Vec<HashSet<u32>>,
}

impl BaseCaseLog {
    fn with_queries(n: usize) -> Self {
        Self { delivered: vec![HashSet::new(); n] }
    }

    /// Whether `(query, reference)` has been delivered. Answers are only
    /// reliable while some node of `query` is still being traversed.
    pub fn contains(&self, query: usize, reference: usize) -> bool {
        self.delivered[query].contains(&(reference as u32))
    }

    fn insert(&mut self, query: usize, reference: usize) -> bool {
        self.delivered[query].insert(reference as u32)
    }

    fn release(&mut self, query: usize) {
        self.delivered[query] = HashSet::new();
    }
}

/// A problem plugged into the traversal.
pub trait TraversalRules {
    type Error;

    /// Point-to-point work. Delivered at most once per pair.
    fn base_case(&mut self, query: usize, reference: usize) -> Result<f64, Self::Error>;

    /// Decide whether `(query, reference)` can be discarded.
    fn score(&mut self, query: &NodeView, reference: &NodeView, log: &BaseCaseLog) -> Result<Score, Self::Error>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TraversalOptions {
    /// Score query children with their parent instead of themselves.
    pub strict_query_scoring: bool,
    /// Never deliver pairs with identical ids (monochromatic runs).
    pub skip_self_pairs: bool,
    /// Check pairwise separation of `R` at every reference recursion.
    pub audit_separation: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TraversalCounters {
    /// Query children descended into.
    pub query_recursions: u64,
    pub reference_recursions: u64,
    /// Reference recursions at the query root, before it was split.
    pub ref_recursions_before_first_query: u64,
    /// Reference recursions at query leaves.
    pub ref_recursions_after_last_query: u64,
    pub base_case_calls: u64,
    pub self_pairs_skipped: u64,
    pub score_calls: u64,
    pub prunes: u64,
    /// Largest `|R|` seen on entry to any recursion.
    pub max_reference_set_size: usize,
    pub audit_checks: u64,
    pub audit_violations: u64,
}

impl TraversalCounters {
    pub fn total_recursions(&self) -> u64 {
        self.query_recursions + self.reference_recursions
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceEvent {
    ReferenceRecursion { query: NodeId, s_r_max: i32, set_size: usize },
    QueryRecursion { query: NodeId, children: usize, set_size: usize },
    BaseCase { query: usize, reference: usize, value: f64 },
    Prune { query: NodeId, reference: NodeId },
    SeparationViolation { s_r_max: i32, a: usize, b: usize, distance: f64 },
}

pub trait TraceSink {
    fn event(&mut self, event: TraceEvent);
}

/// Discards every event.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoTrace;

impl TraceSink for NoTrace {
    #[inline]
    fn event(&mut self, _: TraceEvent) {}
}

impl<F: FnMut(TraceEvent)> TraceSink for F {
    fn event(&mut self, event: TraceEvent) {
        self(event)
    }
}

/// Run the traversal of `query` against `reference` with `rules`.
pub fn dual_traverse<R: TraversalRules>(
    query: &CoverTree<'_>,
    reference: &CoverTree<'_>,
    rules: &mut R,
    options: &TraversalOptions,
) -> Result<TraversalCounters, R::Error> {
    dual_traverse_traced(query, reference, rules, options, &mut NoTrace)
}

struct Frame {
    query: NodeId,
    refs: Vec<NodeId>,
    /// Parent to score with when the child's set still needs filtering.
    pending: Option<NodeId>,
}

struct Walker<'q, 'r, 'a, 'b, R, T> {
    query: &'q CoverTree<'a>,
    reference: &'r CoverTree<'b>,
    rules: &'q mut R,
    sink: &'q mut T,
    options: TraversalOptions,
    log: BaseCaseLog,
    counters: TraversalCounters,
}

impl<R: TraversalRules, T: TraceSink> Walker<'_, '_, '_, '_, R, T> {
    fn base_case(&mut self, q: usize, r: usize) -> Result<(), R::Error> {
        if self.options.skip_self_pairs && q == r {
            self.counters.self_pairs_skipped += u64::from(!self.log.contains(q, r));
            self.log.insert(q, r);
            return Ok(());
        }
        if self.log.insert(q, r) {
            let value = self.rules.base_case(q, r)?;
            self.counters.base_case_calls += 1;
            self.sink.event(TraceEvent::BaseCase { query: q, reference: r, value });
        }
        Ok(())
    }

    fn filter(&mut self, scorer: NodeId, refs: &mut Vec<NodeId>) -> Result<(), R::Error> {
        let qv = NodeView::of(self.query, scorer);
        let mut kept = 0;
        for i in 0..refs.len() {
            let r = refs[i];
            let rv = NodeView::of(self.reference, r);
            self.counters.score_calls += 1;
            match self.rules.score(&qv, &rv, &self.log)? {
                Score::Keep(_) => {
                    refs[kept] = r;
                    kept += 1;
                }
                Score::Prune => {
                    self.counters.prunes += 1;
                    self.sink.event(TraceEvent::Prune { query: scorer, reference: r });
                }
            }
        }
        refs.truncate(kept);
        Ok(())
    }

    fn audit(&mut self, refs: &[NodeId], s_r_max: i32) {
        self.counters.audit_checks += 1;
        let bound = math::pow2(s_r_max);
        let data = self.reference.dataset();
        for (i, &a) in refs.iter().enumerate() {
            let pa = self.reference.node(a).point;
            for &b in &refs[..i] {
                let pb = self.reference.node(b).point;
                let d = data.distance(pa, pb);
                if !math::gt_tol(d, bound) {
                    self.counters.audit_violations += 1;
                    self.sink.event(TraceEvent::SeparationViolation { s_r_max, a: pa.min(pb), b: pa.max(pb), distance: d });
                }
            }
        }
    }

    fn run(&mut self) -> Result<(), R::Error> {
        let q_root = self.query.root();
        let r_root = self.reference.root();
        self.base_case(self.query.node(q_root).point, self.reference.node(r_root).point)?;
        let mut stack = vec![Frame { query: q_root, refs: vec![r_root], pending: None }];
        let mut split_root = false;
        while let Some(Frame { query: q, mut refs, pending }) = stack.pop() {
            if let Some(parent) = pending {
                let scorer = if self.options.strict_query_scoring { parent } else { q };
                self.filter(scorer, &mut refs)?;
            }
            let q_node = self.query.node(q);
            let q_point = q_node.point;
            let q_scale = q_node.scale;
            loop {
                if refs.is_empty() {
                    break;
                }
                self.counters.max_reference_set_size = self.counters.max_reference_set_size.max(refs.len());
                let s_r_max = refs.iter().filter_map(|&r| self.reference.node(r).scale.level()).max();
                match s_r_max {
                    Some(srm) if q_scale < Scale::Level(srm) => {
                        self.counters.reference_recursions += 1;
                        if q == q_root && !split_root {
                            self.counters.ref_recursions_before_first_query += 1;
                        } else if q_scale.is_leaf() {
                            self.counters.ref_recursions_after_last_query += 1;
                        }
                        self.sink.event(TraceEvent::ReferenceRecursion { query: q, s_r_max: srm, set_size: refs.len() });
                        if self.options.audit_separation {
                            self.audit(&refs, srm);
                        }
                        for &r in &refs {
                            self.base_case(q_point, self.reference.node(r).point)?;
                        }
                        let mut next = Vec::with_capacity(refs.len() * 2);
                        for &r in &refs {
                            let node = self.reference.node(r);
                            if node.scale == Scale::Level(srm) {
                                next.extend_from_slice(&node.children);
                            } else {
                                next.push(r);
                            }
                        }
                        self.filter(q, &mut next)?;
                        refs = next;
                    }
                    _ if q_node.is_leaf() => {
                        for &r in &refs {
                            self.base_case(q_point, self.reference.node(r).point)?;
                        }
                        break;
                    }
                    _ => {
                        split_root = true;
                        let children = &q_node.children;
                        self.counters.query_recursions += children.len() as u64;
                        self.sink.event(TraceEvent::QueryRecursion { query: q, children: children.len(), set_size: refs.len() });
                        for &c in children.iter().rev() {
                            stack.push(Frame { query: c, refs: refs.clone(), pending: Some(q) });
                        }
                        break;
                    }
                }
            }
            if q_node.is_leaf() {
                // the leaf is the last node holding this point
                self.log.release(q_point);
            }
        }
        Ok(())
    }
}

/// [`dual_traverse`] reporting every event to `sink`.
pub fn dual_traverse_traced<R: TraversalRules, T: TraceSink>(
    query: &CoverTree<'_>,
    reference: &CoverTree<'_>,
    rules: &mut R,
    options: &TraversalOptions,
    sink: &mut T,
) -> Result<TraversalCounters, R::Error> {
    let mut walker = Walker {
        query,
        reference,
        rules,
        sink,
        options: *options,
        log: BaseCaseLog::with_queries(query.dataset().len()),
        counters: TraversalCounters::default(),
    };
    walker.run()?;
    Ok(walker.counters)
}

/// Exhaustive pairwise check that the points of `refs` are more than
/// `2^s_r_max` apart (with relative slack). Returns the offending pairs.
pub fn separation_audit(tree: &CoverTree<'_>, refs: &[NodeId]) -> Vec<(usize, usize)> {
    let Some(srm) = refs.iter().filter_map(|&r| tree.node(r).scale.level()).max() else {
        return Vec::new();
    };
    let bound = math::pow2(srm);
    let data = tree.dataset();
    let mut bad = Vec::new();
    for (i, &a) in refs.iter().enumerate() {
        for &b in &refs[..i] {
            let (pa, pb) = (tree.node(a).point, tree.node(b).point);
            if !math::gt_tol(data.distance(pa, pb), bound) {
                bad.push((pa.min(pb), pa.max(pb)));
            }
        }
    }
    bad
}
