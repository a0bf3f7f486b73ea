//! Schema-versioned JSON run reports. The schema ships as
//! `docs/report.schema.json`; everything except `timing` is a pure function
//! of the configuration and seed.

use std::collections::BTreeMap;
use std::path::Path;

use dualtree_core::covertree::{tree_imbalance, tree_stats};
use dualtree_core::traversal::BoundReport;
use dualtree_core::{CoverTree, Scale, TraversalCounters};
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const SCHEMA: &str = "dualtree-report";
pub const SCHEMA_VERSION: u32 = 1;
const SURROGATE_NOTE: &str = "surrogate: big-O constants taken as 1";

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub schema_version: u32,
    pub command: String,
    pub config: BTreeMap<String, Value>,
    pub datasets: DatasetsDoc,
    pub trees: TreesDoc,
    pub counters: CountersDoc,
    pub bounds: Option<BoundsDoc>,
    pub problem: Value,
    pub oracle: OracleDoc,
    pub timing: TimingDoc,
}

impl Report {
    pub fn write(&self, path: &Path) -> CliResult<()> {
        let text = serde_json::to_string_pretty(self).expect("reports always serialize");
        std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetsDoc {
    pub monochromatic: bool,
    pub query: DatasetDoc,
    pub reference: DatasetDoc,
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetDoc {
    pub source: String,
    pub n: usize,
    pub dim: usize,
    pub total_weight: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TreesDoc {
    pub query: TreeInfo,
    pub reference: TreeInfo,
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeInfo {
    pub node_count: usize,
    pub leaf_count: usize,
    pub max_depth: usize,
    pub max_children: usize,
    pub s_top: Value,
    pub s_min: Value,
    pub imbalance: u64,
}

pub fn scale_json(s: Scale) -> Value {
    match s {
        Scale::Leaf => Value::from("leaf"),
        Scale::Level(l) => Value::from(l),
    }
}

impl TreeInfo {
    pub fn of(tree: &CoverTree<'_>) -> Self {
        let s = tree_stats(tree);
        Self {
            node_count: s.node_count,
            leaf_count: s.leaf_count,
            max_depth: s.max_depth,
            max_children: s.max_children,
            s_top: scale_json(s.s_top),
            s_min: scale_json(s.s_min),
            imbalance: tree_imbalance(tree).total,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CountersDoc {
    pub query_recursions: u64,
    pub reference_recursions: u64,
    pub total_recursions: u64,
    pub ref_recursions_before_first_query: u64,
    pub ref_recursions_after_last_query: u64,
    pub base_case_calls: u64,
    pub self_pairs_skipped: u64,
    pub score_calls: u64,
    pub prunes: u64,
    pub max_reference_set_size: usize,
}

impl From<&TraversalCounters> for CountersDoc {
    fn from(c: &TraversalCounters) -> Self {
        Self {
            query_recursions: c.query_recursions,
            reference_recursions: c.reference_recursions,
            total_recursions: c.total_recursions(),
            ref_recursions_before_first_query: c.ref_recursions_before_first_query,
            ref_recursions_after_last_query: c.ref_recursions_after_last_query,
            base_case_calls: c.base_case_calls,
            self_pairs_skipped: c.self_pairs_skipped,
            score_calls: c.score_calls,
            prunes: c.prunes,
            max_reference_set_size: c.max_reference_set_size,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SurrogateDoc {
    pub value: f64,
    pub surrogate: bool,
    pub note: &'static str,
}

impl SurrogateDoc {
    pub fn new(value: f64) -> Self {
        Self { value, surrogate: true, note: SURROGATE_NOTE }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RStarDoc {
    pub measured: usize,
    pub theoretical: Option<f64>,
    /// How the theoretical value was obtained, e.g. `c_qr^5`.
    pub theoretical_form: String,
    pub measured_within_theoretical: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremDoc {
    pub theta: SurrogateDoc,
    pub pre_recursion_estimate: SurrogateDoc,
    pub formula_measured: f64,
    pub formula_theoretical: Option<f64>,
    pub formula_text: String,
}

/// The monochromatic form of the bound, which has no theta term.
#[derive(Debug, Clone, Serialize)]
pub struct CorollaryDoc {
    pub formula_measured: f64,
    pub formula_theoretical: Option<f64>,
    pub formula_text: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsDoc {
    pub chi: u32,
    pub psi: u32,
    pub n: usize,
    pub c_r: f64,
    pub c_qr: Option<f64>,
    pub i_t_query: u64,
    pub measured_recursions: u64,
    pub recursions_within_formula: bool,
    pub r_star: RStarDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem: Option<TheoremDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monochromatic_corollary: Option<CorollaryDoc>,
}

impl BoundsDoc {
    /// `pre_recursion` is only used for bichromatic reports.
    pub fn new(b: &BoundReport, theoretical_form: &str, pre_recursion: f64) -> Self {
        let formula_theoretical = b.theoretical_r_star.map(|r| b.formula_with(r));
        let (theorem, monochromatic_corollary) = match b.theta {
            Some(theta) => (
                Some(TheoremDoc {
                    theta: SurrogateDoc::new(theta),
                    pre_recursion_estimate: SurrogateDoc::new(pre_recursion),
                    formula_measured: b.formula_value,
                    formula_theoretical,
                    formula_text: b.formula_text.clone(),
                }),
                None,
            ),
            None => (
                None,
                Some(CorollaryDoc {
                    formula_measured: b.formula_value,
                    formula_theoretical,
                    formula_text: b.formula_text.clone(),
                }),
            ),
        };
        Self {
            chi: 1,
            psi: 1,
            n: b.n,
            c_r: b.c_r,
            c_qr: b.c_qr,
            i_t_query: b.i_t_query,
            measured_recursions: b.measured_recursions,
            recursions_within_formula: (b.measured_recursions as f64) <= b.formula_value,
            r_star: RStarDoc {
                measured: b.measured_r_star,
                theoretical: b.theoretical_r_star,
                theoretical_form: theoretical_form.into(),
                measured_within_theoretical: b.theoretical_r_star.map(|t| b.measured_r_star as f64 <= t),
            },
            theorem,
            monochromatic_corollary,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct OracleDoc {
    pub requested: bool,
    pub checked: bool,
    pub passed: Option<bool>,
    pub mismatches: u64,
    pub max_abs_error: Option<f64>,
    pub max_rel_error: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct TimingDoc {
    pub build_ms: f64,
    /// Traversal plus the brute-force bound inputs.
    pub search_ms: f64,
    pub oracle_ms: f64,
}
