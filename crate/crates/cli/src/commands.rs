//! Subcommand implementations.
//!
//! Results go to `-o` when given, otherwise to `$DUALTREE_OUT_DIR/<name>`
//! when that variable is set, otherwise to stdout. Reports follow the same
//! rule with `--report`, except that without either they are not written.

use std::collections::BTreeMap;
use std::convert::Infallible;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use dualtree_core::algorithms::{
    is_monochromatic, kde_brute_force, kde_search, nn_brute_force, nn_search, range_brute_force,
    range_search, KdeMode, KdeOptions, KdeRules, NnOptions, NnRules, RangeOptions, RangeRules,
};
use dualtree_core::analysis::{dataset_extremes, expansion_constant};
use dualtree_core::covertree::{tree_imbalance, tree_stats, verify_invariants, VerificationReport};
use dualtree_core::generate::GeneratorSpec;
use dualtree_core::traversal::{dual_traverse_traced, pre_recursion_estimate, BoundReport, TraceEvent};
use dualtree_core::{BuildConfig, CoverTree, Dataset, Kernel, RootPolicy, TraversalOptions, TraversalRules};
use serde_json::{json, Value};

use crate::cli::{AllnnArgs, BuildArgs, CheckArgs, Cli, Command, DataArgs, GenArgs, KdeArgs, Mode, RangeArgs, RunArgs, StatsArgs};
use crate::data::{write_csv_to, DataSource};
use crate::error::{CliError, CliResult};
use crate::report::{
    scale_json, BoundsDoc, CountersDoc, DatasetDoc, DatasetsDoc, OracleDoc, Report, TimingDoc, TreeInfo, TreesDoc,
    SCHEMA, SCHEMA_VERSION,
};
use crate::{bench, tree_json};

pub const OUT_DIR_ENV: &str = "DUALTREE_OUT_DIR";
/// Largest dataset for which bound reports are computed by default; the
/// expansion constant is an `O(N^2 log N)` scan.
pub const BOUND_CAP: usize = 4000;

pub fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Gen(a) => gen(&a),
        Command::Build(a) => build(&a),
        Command::Check(a) => check(&a),
        Command::Stats(a) => stats(&a),
        Command::Allnn(a) => allnn(&a),
        Command::Kde(a) => kde(&a),
        Command::Range(a) => range(&a),
        Command::Bench(a) => bench::run(&a),
    }
}

pub(crate) fn destination(explicit: &Option<PathBuf>, default_name: &str) -> Option<PathBuf> {
    explicit.clone().or_else(|| std::env::var_os(OUT_DIR_ENV).map(|d| PathBuf::from(d).join(default_name)))
}

/// Write `body` to `dest`, or stdout when there is none.
pub(crate) fn emit(dest: Option<&Path>, body: &[u8]) -> CliResult<()> {
    match dest {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
            }
            std::fs::write(path, body).map_err(|e| CliError::io(path, e))
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(body).and_then(|()| out.flush()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

fn emit_json(dest: Option<&Path>, value: &impl serde::Serialize) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("documents always serialize");
    text.push('\n');
    emit(dest, text.as_bytes())
}

fn root_policy(arg: &str, seed: u64) -> CliResult<RootPolicy> {
    match arg {
        "first" => Ok(RootPolicy::First),
        "seeded" => Ok(RootPolicy::Seeded(seed)),
        id => id
            .parse()
            .map(RootPolicy::Point)
            .map_err(|_| CliError::Usage(format!("--root expects `first`, `seeded` or a point id, got `{id}`"))),
    }
}

fn build_config(args: &DataArgs) -> CliResult<BuildConfig> {
    Ok(BuildConfig { root: root_policy(&args.root, args.seed)? })
}

fn load(arg: &str, seed: u64, args: &DataArgs) -> CliResult<(DataSource, Dataset)> {
    let source = DataSource::resolve(arg, seed)?;
    let data = source.load(args.header, args.duplicates.into())?;
    Ok((source, data))
}

fn gen(args: &GenArgs) -> CliResult<()> {
    let spec: GeneratorSpec = args.spec.parse().map_err(|e| CliError::Usage(format!("`{}`: {e}", args.spec)))?;
    let data = dualtree_core::generate::generate_dataset(&spec, args.seed)?;
    let mut buf = Vec::new();
    write_csv_to(&mut buf, &data, !args.no_header).expect("writing to memory");
    emit(destination(&args.output, "gen.csv").as_deref(), &buf)
}

fn verification_doc(tree: &CoverTree<'_>, report: &VerificationReport) -> Value {
    json!({
        "ok": report.is_ok(),
        "levels_checked": report.levels_checked,
        "node_count": tree.node_count(),
        "points": tree.dataset().len(),
        "violations": report.violations.iter().map(ToString::to_string).collect::<Vec<_>>(),
    })
}

fn violations_error(report: &VerificationReport) -> CliResult<()> {
    if report.is_ok() {
        Ok(())
    } else {
        Err(CliError::Contract(format!(
            "{} invariant violation(s), first: {}",
            report.violations.len(),
            report.violations[0]
        )))
    }
}

fn build(args: &BuildArgs) -> CliResult<()> {
    let (_, data) = load(&args.data, args.data_args.seed, &args.data_args)?;
    let tree = CoverTree::build_with(&data, build_config(&args.data_args)?)?;
    let report = verify_invariants(&tree);
    let mut text = serde_json::to_string_pretty(&tree_json::to_doc(&tree)).expect("trees always serialize");
    text.push('\n');
    emit(destination(&args.output, "tree.json").as_deref(), text.as_bytes())?;
    if let Some(dest) = destination(&args.report, "build.check.json") {
        emit_json(Some(&dest), &verification_doc(&tree, &report))?;
    }
    eprintln!(
        "built {} nodes over {} points; {} invariant violation(s)",
        tree.node_count(),
        data.len(),
        report.violations.len()
    );
    violations_error(&report)
}

fn check(args: &CheckArgs) -> CliResult<()> {
    let (_, data) = load(&args.data, args.data_args.seed, &args.data_args)?;
    let tree = match &args.tree {
        Some(path) => {
            let doc = tree_json::read(path)?;
            tree_json::from_doc(&doc, &data).map_err(|message| CliError::Format { path: path.clone(), message })?
        }
        None => CoverTree::build_with(&data, build_config(&args.data_args)?)?,
    };
    let report = verify_invariants(&tree);
    emit_json(destination(&args.output, "check.json").as_deref(), &verification_doc(&tree, &report))?;
    violations_error(&report)
}

fn stats(args: &StatsArgs) -> CliResult<()> {
    let (source, data) = load(&args.data, args.data_args.seed, &args.data_args)?;
    let tree = CoverTree::build_with(&data, build_config(&args.data_args)?)?;
    let s = tree_stats(&tree);
    let (c, eta, delta) = if data.len() >= 2 {
        let e = dataset_extremes(&data)?;
        (Some(expansion_constant(&data, None)?.c), Some(e.eta), Some(e.delta))
    } else {
        (None, None, None)
    };
    let doc = json!({
        "source": source.describe(),
        "n": data.len(),
        "dim": data.dim(),
        "i_t": tree_imbalance(&tree).total,
        "c": c,
        "eta": eta,
        "delta": delta,
        "depth": s.max_depth,
        "width": s.max_children,
        "node_count": s.node_count,
        "s_top": scale_json(s.s_top),
        "s_min": scale_json(s.s_min),
    });
    emit_json(destination(&args.output, "stats.json").as_deref(), &doc)
}

/// Loaded inputs of an algorithm run. `query` is `None` for monochromatic
/// runs.
struct Inputs {
    reference: (DataSource, Dataset),
    query: Option<(DataSource, Dataset)>,
}

impl Inputs {
    fn load(run: &RunArgs) -> CliResult<Self> {
        let d = &run.data_args;
        let reference = load(&run.reference, d.seed, d)?;
        let query = match (&run.query, run.mono) {
            (Some(q), false) => Some(load(q, run.query_seed.unwrap_or(d.seed.wrapping_add(1)), d)?),
            _ => None,
        };
        Ok(Self { reference, query })
    }

    fn datasets_doc(&self) -> DatasetsDoc {
        let doc = |(s, d): &(DataSource, Dataset)| DatasetDoc {
            source: s.describe(),
            n: d.len(),
            dim: d.dim(),
            total_weight: d.total_weight(),
        };
        let reference = doc(&self.reference);
        DatasetsDoc {
            monochromatic: self.query.is_none(),
            query: self.query.as_ref().map(doc).unwrap_or_else(|| reference.clone()),
            reference,
        }
    }
}

/// The two trees of a run; the query tree is the reference tree in
/// monochromatic runs.
struct Trees<'a> {
    reference: CoverTree<'a>,
    query: Option<CoverTree<'a>>,
    build_ms: f64,
}

impl<'a> Trees<'a> {
    fn build(inputs: &'a Inputs, config: BuildConfig) -> CliResult<Self> {
        let t = Instant::now();
        let reference = CoverTree::build_with(&inputs.reference.1, config)?;
        let query = inputs.query.as_ref().map(|(_, q)| CoverTree::build_with(q, config)).transpose()?;
        Ok(Self { reference, query, build_ms: millis(t) })
    }

    fn query(&self) -> &CoverTree<'a> {
        self.query.as_ref().unwrap_or(&self.reference)
    }

    fn docs(&self) -> TreesDoc {
        TreesDoc { query: TreeInfo::of(self.query()), reference: TreeInfo::of(&self.reference) }
    }
}

fn millis(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn bounds_wanted(run: &RunArgs, inputs: &Inputs) -> bool {
    let n = inputs.reference.1.len().max(inputs.query.as_ref().map_or(0, |q| q.1.len()));
    !run.no_bounds && (run.bounds || n <= BOUND_CAP)
}

fn traversal_options(run: &RunArgs) -> TraversalOptions {
    TraversalOptions { strict_query_scoring: run.strict_paper_mode, skip_self_pairs: false, audit_separation: run.audit }
}

fn bounds_doc(report: Option<&BoundReport>, trees: &Trees<'_>, form: &str) -> CliResult<Option<BoundsDoc>> {
    let Some(b) = report else { return Ok(None) };
    let pre = if b.theta.is_some() {
        let (q, r) = (trees.query().dataset(), trees.reference.dataset());
        pre_recursion_estimate(&dataset_extremes(q)?, &dataset_extremes(r)?, b.n)
    } else {
        0.0
    };
    Ok(Some(BoundsDoc::new(b, form, pre)))
}

/// Replay the traversal with fresh rules, writing every event as one JSON
/// line. The drivers are deterministic, so the replay sees exactly the
/// events of the measured run.
fn write_trace<R: TraversalRules<Error = Infallible>>(
    path: &Path,
    trees: &Trees<'_>,
    rules: &mut R,
    options: &TraversalOptions,
) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut failure: Option<io::Error> = None;
    let mut sink = |event: TraceEvent| {
        if failure.is_some() {
            return;
        }
        let line = match event {
            TraceEvent::ReferenceRecursion { query, s_r_max, set_size } => {
                json!({"event": "reference_recursion", "query_node": query.0, "s_r_max": s_r_max, "set_size": set_size})
            }
            TraceEvent::QueryRecursion { query, children, set_size } => {
                json!({"event": "query_recursion", "query_node": query.0, "children": children, "set_size": set_size})
            }
            TraceEvent::BaseCase { query, reference, value } => {
                json!({"event": "base_case", "query": query, "reference": reference, "value": value})
            }
            TraceEvent::Prune { query, reference } => {
                json!({"event": "prune", "query_node": query.0, "reference_node": reference.0})
            }
            TraceEvent::SeparationViolation { s_r_max, a, b, distance } => {
                json!({"event": "separation_violation", "s_r_max": s_r_max, "a": a, "b": b, "distance": distance})
            }
        };
        if let Err(e) = writeln!(w, "{line}") {
            failure = Some(e);
        }
    };
    match dual_traverse_traced(trees.query(), &trees.reference, rules, options, &mut sink) {
        Ok(_) => {}
        Err(e) => match e {},
    }
    match failure {
        Some(e) => Err(CliError::io(path, e)),
        None => w.flush().map_err(|e| CliError::io(path, e)),
    }
}

/// Shared tail of the three algorithm commands: write results and report,
/// then turn oracle or audit failures into exit code 2.
struct Finish<'a> {
    command: &'static str,
    run: &'a RunArgs,
    config: BTreeMap<String, Value>,
    results: Vec<u8>,
    results_name: &'static str,
    counters: dualtree_core::TraversalCounters,
    bounds: Option<BoundsDoc>,
    problem: Value,
    oracle: OracleDoc,
    timing: TimingDoc,
}

impl Finish<'_> {
    fn done(self, inputs: &Inputs, trees: &Trees<'_>) -> CliResult<()> {
        emit(destination(&self.run.output, self.results_name).as_deref(), &self.results)?;
        let mut config = self.config;
        config.insert("reference".into(), json!(self.run.reference));
        config.insert("query".into(), json!(self.run.query));
        config.insert("mono".into(), json!(inputs.query.is_none()));
        config.insert("seed".into(), json!(self.run.data_args.seed));
        config.insert("root".into(), json!(self.run.data_args.root));
        config.insert("duplicates".into(), json!(format!("{:?}", self.run.data_args.duplicates).to_lowercase()));
        config.insert("strict_paper_mode".into(), json!(self.run.strict_paper_mode));
        config.insert("verify_with_oracle".into(), json!(self.run.verify_with_oracle));
        config.insert("audit".into(), json!(self.run.audit));
        let report = Report {
            schema: SCHEMA,
            schema_version: SCHEMA_VERSION,
            command: self.command.into(),
            config,
            datasets: inputs.datasets_doc(),
            trees: trees.docs(),
            counters: CountersDoc::from(&self.counters),
            bounds: self.bounds,
            problem: self.problem,
            oracle: self.oracle.clone(),
            timing: self.timing,
        };
        if let Some(dest) = destination(&self.run.report, &format!("{}.report.json", self.command)) {
            emit_json(Some(&dest), &report)?;
        }
        if self.counters.audit_violations > 0 {
            return Err(CliError::Contract(format!(
                "separation audit failed {} time(s)",
                self.counters.audit_violations
            )));
        }
        if self.oracle.passed == Some(false) {
            return Err(CliError::Contract(format!(
                "oracle check failed: {} mismatching query point(s)",
                self.oracle.mismatches
            )));
        }
        Ok(())
    }
}

fn allnn(args: &AllnnArgs) -> CliResult<()> {
    let run = &args.run;
    let inputs = Inputs::load(run)?;
    let trees = Trees::build(&inputs, build_config(&run.data_args)?)?;
    let (qt, rt) = (trees.query(), &trees.reference);
    let opts = NnOptions {
        exclude_self: !args.include_self,
        traversal: traversal_options(run),
        bounds: dualtree_core::algorithms::BoundOptions { enabled: bounds_wanted(run, &inputs), c_qr: run.c_qr },
    };
    let t = Instant::now();
    let out = nn_search(qt, rt, &opts)?;
    let search_ms = millis(t);
    let exclude = opts.exclude_self && is_monochromatic(qt, rt);
    if let Some(path) = &run.trace {
        let mut traversal = opts.traversal;
        traversal.skip_self_pairs |= exclude;
        write_trace(path, &trees, &mut NnRules::new(qt.dataset(), rt.dataset(), exclude), &traversal)?;
    }

    let t = Instant::now();
    let mut oracle = OracleDoc { requested: run.verify_with_oracle, ..OracleDoc::default() };
    if run.verify_with_oracle {
        let (ids, dists) = nn_brute_force(qt.dataset(), rt.dataset(), exclude);
        let (mut mismatches, mut max_abs) = (0u64, 0.0f64);
        for q in 0..dists.len() {
            let err = if ids[q].is_none() && out.neighbors[q].is_none() { 0.0 } else { (out.distances[q] - dists[q]).abs() };
            let same = ids[q].is_some() == out.neighbors[q].is_some() && err <= 1e-12 * dists[q].max(1.0);
            mismatches += u64::from(!same);
            max_abs = max_abs.max(if err.is_nan() { f64::INFINITY } else { err });
        }
        oracle.checked = true;
        oracle.passed = Some(mismatches == 0);
        oracle.mismatches = mismatches;
        oracle.max_abs_error = Some(max_abs);
        oracle.note = Some("neighbors compared by distance; ties count as equal".into());
    }
    let oracle_ms = millis(t);

    let mut results = String::from("query,neighbor,distance\n");
    for (q, (n, d)) in out.neighbors.iter().zip(&out.distances).enumerate() {
        match n {
            Some(n) => results.push_str(&format!("{q},{n},{d}\n")),
            None => results.push_str(&format!("{q},,\n")),
        }
    }
    let mut config = BTreeMap::new();
    config.insert("include_self".into(), json!(args.include_self));
    let bounds = bounds_doc(out.bounds.as_ref(), &trees, "c_qr^5")?;
    Finish {
        command: "allnn",
        run,
        config,
        results: results.into_bytes(),
        results_name: "allnn.csv",
        counters: out.counters,
        bounds,
        problem: json!({ "exclude_self": exclude }),
        oracle,
        timing: TimingDoc { build_ms: trees.build_ms, search_ms, oracle_ms },
    }
    .done(&inputs, &trees)
}

fn kde(args: &KdeArgs) -> CliResult<()> {
    let run = &args.run;
    if run.strict_paper_mode {
        return Err(CliError::Usage(
            "kde has no strict mode: scoring query children with their parent would double count node sums".into(),
        ));
    }
    let kernel: Kernel = args.kernel.parse().map_err(|e| CliError::Usage(format!("--kernel: {e}")))?;
    if !(args.epsilon > 0.0 && args.epsilon.is_finite()) {
        return Err(CliError::Usage(format!("--epsilon must be positive, got {}", args.epsilon)));
    }
    let mode = match args.mode {
        Mode::Absolute => KdeMode::Absolute,
        Mode::Relative => KdeMode::Relative,
    };
    let inputs = Inputs::load(run)?;
    let trees = Trees::build(&inputs, build_config(&run.data_args)?)?;
    let (qt, rt) = (trees.query(), &trees.reference);
    let mut opts = KdeOptions::new(kernel, args.epsilon, mode);
    opts.traversal = traversal_options(run);
    opts.bounds.enabled = bounds_wanted(run, &inputs);
    let t = Instant::now();
    let out = kde_search(qt, rt, &opts)?;
    let search_ms = millis(t);
    if let Some(path) = &run.trace {
        let threshold = args.epsilon * out.k_max.unwrap_or(1.0);
        let mut rules = KdeRules::new(qt.dataset(), rt.dataset(), qt.node_count(), kernel, threshold);
        write_trace(path, &trees, &mut rules, &opts.traversal)?;
    }

    let t = Instant::now();
    let mut oracle = OracleDoc { requested: run.verify_with_oracle, ..OracleDoc::default() };
    if run.verify_with_oracle {
        let exact = kde_brute_force(qt.dataset(), rt.dataset(), &kernel);
        let (mut mismatches, mut max_abs, mut max_rel) = (0u64, 0.0f64, 0.0f64);
        for (f, f_star) in out.estimates.iter().zip(&exact) {
            let abs = (f - f_star).abs();
            let rel = if *f_star != 0.0 { abs / f_star.abs() } else if abs == 0.0 { 0.0 } else { f64::INFINITY };
            let err = match mode {
                KdeMode::Absolute => abs,
                KdeMode::Relative => rel,
            };
            mismatches += u64::from(!(err < args.epsilon));
            max_abs = max_abs.max(abs);
            max_rel = max_rel.max(rel);
        }
        oracle.checked = true;
        oracle.passed = Some(mismatches == 0);
        oracle.mismatches = mismatches;
        oracle.max_abs_error = Some(max_abs);
        oracle.max_rel_error = Some(max_rel);
    }
    let oracle_ms = millis(t);

    let mut results = String::from("query,estimate\n");
    for (q, f) in out.estimates.iter().enumerate() {
        results.push_str(&format!("{q},{f}\n"));
    }
    let exponents = if args.epsilon < 1.0 { kernel.bound_exponents(args.epsilon).ok() } else { None };
    let problem = json!({
        "kernel": kernel.to_string(),
        "epsilon": args.epsilon,
        "mode": format!("{:?}", args.mode).to_lowercase(),
        "k_max": out.k_max,
        "zeta": if args.epsilon < 1.0 { kernel.zeta(args.epsilon).ok() } else { None },
        "exponents": exponents.map(|e| json!({"theorem": e.theorem, "illustrative": e.illustrative})),
    });
    let mut config = BTreeMap::new();
    config.insert("kernel".into(), json!(args.kernel));
    config.insert("epsilon".into(), json!(args.epsilon));
    config.insert("mode".into(), problem["mode"].clone());
    let bounds = bounds_doc(out.bounds.as_ref(), &trees, "c_r^(4 + ceil(log2 zeta))")?;
    Finish {
        command: "kde",
        run,
        config,
        results: results.into_bytes(),
        results_name: "kde.csv",
        counters: out.counters,
        bounds,
        problem,
        oracle,
        timing: TimingDoc { build_ms: trees.build_ms, search_ms, oracle_ms },
    }
    .done(&inputs, &trees)
}

fn range(args: &RangeArgs) -> CliResult<()> {
    let run = &args.run;
    if !(0.0 <= args.lower && args.lower <= args.upper) {
        return Err(CliError::Usage(format!("need 0 <= --lower <= --upper, got [{}, {}]", args.lower, args.upper)));
    }
    if !(args.alpha > 0.0 && args.alpha.is_finite()) {
        return Err(CliError::Usage(format!("--alpha must be positive, got {}", args.alpha)));
    }
    let inputs = Inputs::load(run)?;
    let trees = Trees::build(&inputs, build_config(&run.data_args)?)?;
    let (qt, rt) = (trees.query(), &trees.reference);
    let mut opts = RangeOptions::new(args.lower, args.upper);
    opts.count_only = args.count_only;
    opts.literal_score = run.strict_paper_mode;
    opts.exclude_self = args.exclude_self;
    opts.alpha = args.alpha;
    opts.traversal = traversal_options(run);
    opts.bounds.enabled = bounds_wanted(run, &inputs);
    let t = Instant::now();
    let out = range_search(qt, rt, &opts)?;
    let search_ms = millis(t);
    let exclude = args.exclude_self && is_monochromatic(qt, rt);
    if let Some(path) = &run.trace {
        let mut rules = RangeRules::new(qt.dataset(), rt.dataset(), args.lower, args.upper, args.count_only)?
            .literal(run.strict_paper_mode);
        let mut traversal = opts.traversal;
        traversal.skip_self_pairs |= exclude;
        write_trace(path, &trees, &mut rules, &traversal)?;
    }

    let t = Instant::now();
    let mut oracle = OracleDoc { requested: run.verify_with_oracle, ..OracleDoc::default() };
    if run.verify_with_oracle {
        let mut expected = range_brute_force(qt.dataset(), rt.dataset(), args.lower, args.upper);
        if exclude {
            for (q, ids) in expected.iter_mut().enumerate() {
                ids.retain(|&r| r != q);
            }
        }
        let mismatches = expected
            .iter()
            .enumerate()
            .filter(|&(q, ids)| {
                if args.count_only {
                    out.counts[q] != ids.len() as u64
                } else {
                    out.results[q] != *ids
                }
            })
            .count() as u64;
        oracle.checked = true;
        oracle.passed = Some(mismatches == 0);
        oracle.mismatches = mismatches;
    }
    let oracle_ms = millis(t);

    let mut results = String::new();
    for q in 0..out.counts.len() {
        let line = if args.count_only {
            json!({"query": q, "count": out.counts[q]})
        } else {
            json!({"query": q, "ids": out.results[q]})
        };
        results.push_str(&line.to_string());
        results.push('\n');
    }
    let c_r = out.bounds.as_ref().map(|b| b.c_r);
    let problem = json!({
        "lower": args.lower,
        "upper": args.upper,
        "count_only": args.count_only,
        "exclude_self": exclude,
        "score_rule": if run.strict_paper_mode { "literal" } else { "interval-overlap" },
        "difficulty": out.difficulty.map(|d| json!({
            "alpha": d.alpha,
            "beta": d.beta,
            "s_max_size": d.s_max_size,
            "alpha_expansion_excess": d.c,
            "simplified_exponent": c_r.and_then(|c| d.simplified_exponent(c)),
        })),
    });
    let mut config = BTreeMap::new();
    config.insert("lower".into(), json!(args.lower));
    config.insert("upper".into(), json!(args.upper));
    config.insert("alpha".into(), json!(args.alpha));
    config.insert("count_only".into(), json!(args.count_only));
    config.insert("exclude_self".into(), json!(args.exclude_self));
    let bounds = bounds_doc(out.bounds.as_ref(), &trees, "max(c_r^(4 + beta), |S_max| + C)")?;
    Finish {
        command: "range",
        run,
        config,
        results: results.into_bytes(),
        results_name: "range.ndjson",
        counters: out.counters,
        bounds,
        problem,
        oracle,
        timing: TimingDoc { build_ms: trees.build_ms, search_ms, oracle_ms },
    }
    .done(&inputs, &trees)
}
