//! Size sweeps over generated monochromatic datasets.
//!
//! One CSV row per (N, seed). Column order is the field order of
//! [`BenchRow`] and is part of the output contract.

use dualtree_core::algorithms::{
    kde_brute_force, kde_search, nn_brute_force, nn_search, range_brute_force, range_search, BoundOptions, KdeMode,
    KdeOptions, NnOptions, RangeOptions,
};
use dualtree_core::covertree::tree_imbalance;
use dualtree_core::generate::{generate_dataset, GeneratorSpec};
use dualtree_core::traversal::BoundReport;
use dualtree_core::{CoverTree, Kernel, TraversalCounters};
use serde::Serialize;

use crate::cli::{BenchArgs, Mode, Problem};
use crate::commands::{destination, emit, BOUND_CAP};
use crate::error::{CliError, CliResult};

/// Oracle verification is skipped above this size.
pub const ORACLE_CAP: usize = 4000;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub problem: Problem,
    /// Generator spec without `N`.
    pub generator: String,
    pub sizes: Vec<usize>,
    pub seeds: u64,
    pub first_seed: u64,
    pub kernel: Kernel,
    pub epsilon: f64,
    pub mode: KdeMode,
    pub lower: f64,
    pub upper: f64,
    pub oracle: bool,
    pub bounds: bool,
}

impl BenchConfig {
    /// All-NN with the default sweep.
    pub fn allnn(generator: &str) -> Self {
        Self {
            problem: Problem::Allnn,
            generator: generator.into(),
            sizes: vec![250, 500, 1000, 2000],
            seeds: 5,
            first_seed: 0,
            kernel: Kernel::gaussian(1.0).expect("positive bandwidth"),
            epsilon: 0.1,
            mode: KdeMode::Absolute,
            lower: 0.0,
            upper: 0.25,
            oracle: true,
            bounds: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub problem: &'static str,
    pub generator: String,
    pub n: usize,
    pub seed: u64,
    pub query_recursions: u64,
    pub reference_recursions: u64,
    pub total_recursions: u64,
    pub ref_recursions_before_first_query: u64,
    pub ref_recursions_after_last_query: u64,
    pub base_case_calls: u64,
    pub prunes: u64,
    pub max_reference_set_size: usize,
    pub i_t: u64,
    pub c_r: Option<f64>,
    pub r_star_theoretical: Option<f64>,
    pub r_star_within_theoretical: Option<bool>,
    pub formula_measured: Option<f64>,
    pub formula_theoretical: Option<f64>,
    pub recursions_within_formula: Option<bool>,
    /// `pass`, `fail` or `skipped`.
    pub oracle: &'static str,
    pub oracle_mismatches: u64,
}

fn spec_with_n(generator: &str, n: usize) -> CliResult<GeneratorSpec> {
    let sep = if generator.contains(':') { ',' } else { ':' };
    let text = format!("{generator}{sep}N={n}");
    text.parse().map_err(|e| CliError::Usage(format!("generator `{generator}`: {e}")))
}

fn problem_name(p: Problem) -> &'static str {
    match p {
        Problem::Allnn => "allnn",
        Problem::Kde => "kde",
        Problem::Range => "range",
    }
}

pub fn run_bench(cfg: &BenchConfig) -> CliResult<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &n in &cfg.sizes {
        let spec = spec_with_n(&cfg.generator, n)?;
        for seed in cfg.first_seed..cfg.first_seed + cfg.seeds {
            let data = generate_dataset(&spec, seed)?;
            let tree = CoverTree::build(&data)?;
            let bounds = BoundOptions { enabled: cfg.bounds && n <= BOUND_CAP, c_qr: false };
            let check = cfg.oracle && n <= ORACLE_CAP;
            let (counters, report, mismatches): (TraversalCounters, Option<BoundReport>, Option<u64>) = match cfg.problem {
                Problem::Allnn => {
                    let out = nn_search(&tree, &tree, &NnOptions { bounds, ..NnOptions::default() })?;
                    let bad = check.then(|| {
                        let (_, exact) = nn_brute_force(&data, &data, true);
                        exact.iter().zip(&out.distances).filter(|(e, d)| (*e - *d).abs() > 1e-12 * e.max(1.0)).count()
                            as u64
                    });
                    (out.counters, out.bounds, bad)
                }
                Problem::Kde => {
                    let mut opts = KdeOptions::new(cfg.kernel, cfg.epsilon, cfg.mode);
                    opts.bounds = bounds;
                    let out = kde_search(&tree, &tree, &opts)?;
                    let bad = check.then(|| {
                        let exact = kde_brute_force(&data, &data, &cfg.kernel);
                        exact
                            .iter()
                            .zip(&out.estimates)
                            .filter(|(e, f)| {
                                let err = (*f - *e).abs();
                                let err = if cfg.mode == KdeMode::Relative { err / e.abs() } else { err };
                                !(err < cfg.epsilon)
                            })
                            .count() as u64
                    });
                    (out.counters, out.bounds, bad)
                }
                Problem::Range => {
                    let mut opts = RangeOptions::new(cfg.lower, cfg.upper);
                    opts.bounds = bounds;
                    let out = range_search(&tree, &tree, &opts)?;
                    let bad = check.then(|| {
                        let exact = range_brute_force(&data, &data, cfg.lower, cfg.upper);
                        exact.iter().zip(&out.results).filter(|(e, r)| e != r).count() as u64
                    });
                    (out.counters, out.bounds, bad)
                }
            };
            let b = report.as_ref();
            let formula_theoretical = b.and_then(|b| b.theoretical_r_star.map(|r| b.formula_with(r)));
            rows.push(BenchRow {
                problem: problem_name(cfg.problem),
                generator: spec.to_string(),
                n,
                seed,
                query_recursions: counters.query_recursions,
                reference_recursions: counters.reference_recursions,
                total_recursions: counters.total_recursions(),
                ref_recursions_before_first_query: counters.ref_recursions_before_first_query,
                ref_recursions_after_last_query: counters.ref_recursions_after_last_query,
                base_case_calls: counters.base_case_calls,
                prunes: counters.prunes,
                max_reference_set_size: counters.max_reference_set_size,
                i_t: tree_imbalance(&tree).total,
                c_r: b.map(|b| b.c_r),
                r_star_theoretical: b.and_then(|b| b.theoretical_r_star),
                r_star_within_theoretical: b.and_then(|b| b.theoretical_r_star.map(|t| b.measured_r_star as f64 <= t)),
                formula_measured: b.map(|b| b.formula_value),
                formula_theoretical,
                recursions_within_formula: b.map(|b| (b.measured_recursions as f64) <= b.formula_value),
                oracle: match mismatches {
                    None => "skipped",
                    Some(0) => "pass",
                    Some(_) => "fail",
                },
                oracle_mismatches: mismatches.unwrap_or(0),
            });
        }
    }
    Ok(rows)
}

/// For each pair of successive sizes, the mean over seeds of the per-seed
/// ratio of total recursion counts.
pub fn recursion_ratios(rows: &[BenchRow]) -> Vec<(usize, usize, f64)> {
    let mut sizes: Vec<usize> = rows.iter().map(|r| r.n).collect();
    sizes.dedup();
    let mut out = Vec::new();
    for w in sizes.windows(2) {
        let (small, large) = (w[0], w[1]);
        let ratios: Vec<f64> = rows
            .iter()
            .filter(|r| r.n == large)
            .filter_map(|l| {
                rows.iter()
                    .find(|s| s.n == small && s.seed == l.seed)
                    .map(|s| l.total_recursions as f64 / s.total_recursions as f64)
            })
            .collect();
        if !ratios.is_empty() {
            out.push((small, large, ratios.iter().sum::<f64>() / ratios.len() as f64));
        }
    }
    out
}

pub fn to_csv(rows: &[BenchRow]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("bench rows always serialize");
    }
    w.into_inner().expect("writing to memory")
}

pub fn run(args: &BenchArgs) -> CliResult<()> {
    let kernel: Kernel = args.kernel.parse().map_err(|e| CliError::Usage(format!("--kernel: {e}")))?;
    if args.sizes.is_empty() || args.seeds == 0 {
        return Err(CliError::Usage("bench needs at least one size and one seed".into()));
    }
    let cfg = BenchConfig {
        problem: args.problem,
        generator: args.generator.clone(),
        sizes: args.sizes.clone(),
        seeds: args.seeds,
        first_seed: args.seed,
        kernel,
        epsilon: args.epsilon,
        mode: match args.mode {
            Mode::Absolute => KdeMode::Absolute,
            Mode::Relative => KdeMode::Relative,
        },
        lower: args.lower,
        upper: args.upper,
        oracle: !args.no_oracle,
        bounds: !args.no_bounds,
    };
    let rows = run_bench(&cfg)?;
    emit(destination(&args.output, &format!("bench-{}.csv", problem_name(args.problem))).as_deref(), &to_csv(&rows))?;
    for (small, large, ratio) in recursion_ratios(&rows) {
        eprintln!("mean recursion ratio N={small} -> N={large}: {ratio:.3}");
    }
    let failed = rows.iter().filter(|r| r.oracle == "fail").count();
    if failed > 0 {
        return Err(CliError::Contract(format!("oracle check failed on {failed} bench run(s)")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_is_appended_to_the_spec() {
        assert_eq!(spec_with_n("uniform-ball:d=3", 10).unwrap().to_string(), "uniform-ball:N=10,d=3");
        assert_eq!(spec_with_n("grid", 4).map_err(|_| ()), Err(()));
    }

    #[test]
    fn ratios_pair_seeds() {
        let mk = |n, seed, total| BenchRow {
            problem: "allnn",
            generator: String::new(),
            n,
            seed,
            query_recursions: 0,
            reference_recursions: 0,
            total_recursions: total,
            ref_recursions_before_first_query: 0,
            ref_recursions_after_last_query: 0,
            base_case_calls: 0,
            prunes: 0,
            max_reference_set_size: 0,
            i_t: 0,
            c_r: None,
            r_star_theoretical: None,
            r_star_within_theoretical: None,
            formula_measured: None,
            formula_theoretical: None,
            recursions_within_formula: None,
            oracle: "skipped",
            oracle_mismatches: 0,
        };
        let rows = [mk(10, 0, 100), mk(10, 1, 200), mk(20, 0, 300), mk(20, 1, 200)];
        assert_eq!(recursion_ratios(&rows), vec![(10, 20, 2.0)]);
    }
}
