use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn dualtree(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dualtree"));
    cmd.args(args).env_remove("DUALTREE_OUT_DIR");
    if let Some(dir) = out_dir {
        cmd.env("DUALTREE_OUT_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

// A small validator for the keywords the shipped schema uses.
fn validate(schema: &Value, root: &Value, v: &Value, at: &str, errors: &mut Vec<String>) {
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        let name = r.strip_prefix("#/$defs/").expect("local refs only");
        return validate(&root["$defs"][name], root, v, at, errors);
    }
    if let Some(c) = schema.get("const") {
        if c != v {
            errors.push(format!("{at}: expected {c}, got {v}"));
        }
    }
    if let Some(options) = schema.get("enum").and_then(Value::as_array) {
        if !options.contains(v) {
            errors.push(format!("{at}: {v} not in {options:?}"));
        }
    }
    if let Some(t) = schema.get("type") {
        let types: Vec<&str> = match t {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().map(|x| x.as_str().unwrap()).collect(),
            _ => panic!("bad type keyword"),
        };
        let ok = types.iter().any(|t| match *t {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "boolean" => v.is_boolean(),
            "null" => v.is_null(),
            "number" => v.is_number(),
            "integer" => v.is_i64() || v.is_u64(),
            other => panic!("unknown type {other}"),
        });
        if !ok {
            errors.push(format!("{at}: {v} is not of type {t}"));
            return;
        }
    }
    if let Some(min) = schema.get("minimum").and_then(Value::as_f64) {
        if let Some(x) = v.as_f64() {
            if x < min {
                errors.push(format!("{at}: {x} < {min}"));
            }
        }
    }
    if let Some(obj) = v.as_object() {
        if let Some(req) = schema.get("required").and_then(Value::as_array) {
            for key in req {
                if !obj.contains_key(key.as_str().unwrap()) {
                    errors.push(format!("{at}: missing `{}`", key.as_str().unwrap()));
                }
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        for (key, value) in obj {
            match props.and_then(|p| p.get(key)) {
                Some(sub) => validate(sub, root, value, &format!("{at}.{key}"), errors),
                None if schema.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    errors.push(format!("{at}: unexpected `{key}`"))
                }
                None => {}
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), v.as_array()) {
        for (i, x) in arr.iter().enumerate() {
            validate(items, root, x, &format!("{at}[{i}]"), errors);
        }
    }
}

fn schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn schema_errors(doc: &Value) -> Vec<String> {
    let s = schema();
    let mut errors = Vec::new();
    validate(&s, &s, doc, "$", &mut errors);
    errors
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

#[test]
fn gen_is_deterministic() {
    let dir = tmp();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        let out = dualtree(&["gen", "uniform-ball:N=100,d=3", "--seed", "7", "-o", path_str(p)], None);
        assert_eq!(code(&out), 0);
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 101);
    assert_eq!(text.lines().next(), Some("x0,x1,x2"));
}

#[test]
fn mono_allnn_with_oracle_passes_and_validates() {
    let dir = tmp();
    let (res, rep) = (dir.path().join("nn.csv"), dir.path().join("nn.json"));
    let out = dualtree(
        &[
            "allnn", "-r", "uniform-ball:N=500,d=5", "--mono", "--verify-with-oracle",
            "-o", path_str(&res), "--report", path_str(&rep),
        ],
        None,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&rep);
    assert_eq!(schema_errors(&report), Vec::<String>::new());
    assert_eq!(report["oracle"]["passed"], Value::Bool(true));
    assert_eq!(report["oracle"]["mismatches"], 0);
    let corollary = &report["bounds"]["monochromatic_corollary"];
    assert!(corollary.is_object());
    assert!(corollary.get("theta").is_none());
    assert!(report["bounds"].get("theorem").is_none());
    let csv = std::fs::read_to_string(&res).unwrap();
    assert_eq!(csv.lines().next(), Some("query,neighbor,distance"));
    assert_eq!(csv.lines().count(), 501);
}

#[test]
fn bichromatic_report_marks_surrogates() {
    let dir = tmp();
    let rep = dir.path().join("kde.json");
    let out = dualtree(
        &[
            "kde", "-r", "uniform-ball:N=300,d=3", "-q", "gaussian-mixture:N=200,d=3,k=3",
            "-k", "gaussian:sigma=1", "-e", "0.01", "--verify-with-oracle",
            "-o", path_str(&dir.path().join("kde.csv")), "--report", path_str(&rep),
        ],
        None,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&rep);
    assert_eq!(schema_errors(&report), Vec::<String>::new());
    let theorem = &report["bounds"]["theorem"];
    assert_eq!(theorem["theta"]["surrogate"], Value::Bool(true));
    assert_eq!(theorem["pre_recursion_estimate"]["surrogate"], Value::Bool(true));
    assert!(report["bounds"].get("monochromatic_corollary").is_none());
    assert!(report["problem"]["zeta"].as_f64().unwrap() > 0.0);
}

#[test]
fn range_count_report_validates() {
    let dir = tmp();
    let out = dualtree(
        &["range", "-r", "uniform-ball:N=400,d=2", "--mono", "-l", "0.1", "-u", "0.3", "--count-only", "--verify-with-oracle"],
        Some(dir.path()),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("range.report.json"));
    assert_eq!(schema_errors(&report), Vec::<String>::new());
    assert_eq!(report["problem"]["difficulty"]["beta"], 2);
    let lines = std::fs::read_to_string(dir.path().join("range.ndjson")).unwrap();
    let first: Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert!(first["count"].is_u64());
}

#[test]
fn validator_rejects_broken_reports() {
    let dir = tmp();
    let out = dualtree(&["allnn", "-r", "grid:N=50,d=2", "--mono"], Some(dir.path()));
    assert_eq!(code(&out), 0);
    let mut report = read_json(&dir.path().join("allnn.report.json"));
    assert!(schema_errors(&report).is_empty());
    report["schema_version"] = Value::from(2);
    report["counters"].as_object_mut().unwrap().remove("prunes");
    report["bounds"]["monochromatic_corollary"]["theta"] = Value::from(1.0);
    assert_eq!(schema_errors(&report).len(), 3);
}

#[test]
fn reports_repeat_byte_for_byte_apart_from_timing() {
    let dir = tmp();
    let mut docs = Vec::new();
    for name in ["a.json", "b.json"] {
        let rep = dir.path().join(name);
        let out = dualtree(
            &["range", "-r", "uniform-ball:N=300,d=3", "-q", "uniform-ball:N=100,d=3", "-l", "0", "-u", "0.4",
              "--seed", "5", "-o", path_str(&dir.path().join("r.ndjson")), "--report", path_str(&rep)],
            None,
        );
        assert_eq!(code(&out), 0);
        let text = std::fs::read_to_string(&rep).unwrap();
        let start = text.find("\"timing\"").unwrap();
        docs.push(text[..start].to_string());
    }
    assert_eq!(docs[0], docs[1]);
}

#[test]
fn usage_and_contract_exit_codes() {
    let dir = tmp();
    let strict = dualtree(&["kde", "-r", "grid:N=20,d=2", "-k", "gaussian", "-e", "0.1", "--strict-paper-mode"], Some(dir.path()));
    assert_eq!(code(&strict), 1);
    let missing = dualtree(&["kde", "-r", "grid:N=20,d=2", "-e", "0.1"], None);
    assert_eq!(code(&missing), 1);
    let unknown = dualtree(&["stats", "no-such-file.csv"], None);
    assert_eq!(code(&unknown), 1);

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,y\n1,2\n3,oops\n").unwrap();
    let out = dualtree(&["stats", path_str(&bad)], None);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 3"), "{}", String::from_utf8_lossy(&out.stderr));

    let dup = dir.path().join("dup.csv");
    std::fs::write(&dup, "0,0\n1,1\n0,0\n").unwrap();
    assert_eq!(code(&dualtree(&["build", path_str(&dup), "-o", path_str(&dir.path().join("t.json"))], None)), 2);
    let weighted = dualtree(&["build", path_str(&dup), "--duplicates", "weighted", "-o", path_str(&dir.path().join("t.json"))], None);
    assert_eq!(code(&weighted), 0);
}

#[test]
fn check_detects_a_corrupted_tree() {
    let dir = tmp();
    let data = dir.path().join("d.csv");
    let tree = dir.path().join("t.json");
    assert_eq!(code(&dualtree(&["gen", "uniform-ball:N=200,d=2", "-o", path_str(&data)], None)), 0);
    assert_eq!(code(&dualtree(&["build", path_str(&data), "-o", path_str(&tree)], None)), 0);
    let report = dir.path().join("check.json");
    assert_eq!(code(&dualtree(&["check", path_str(&data), "--tree", path_str(&tree), "-o", path_str(&report)], None)), 0);
    assert_eq!(read_json(&report)["ok"], Value::Bool(true));

    // shrinking the root scale breaks covering
    let mut doc = read_json(&tree);
    doc["root"]["scale"] = Value::from(-20);
    std::fs::write(&tree, serde_json::to_string(&doc).unwrap()).unwrap();
    assert_eq!(code(&dualtree(&["check", path_str(&data), "--tree", path_str(&tree), "-o", path_str(&report)], None)), 2);
    let violations = read_json(&report)["violations"].as_array().unwrap().len();
    assert!(violations > 0);
}

#[test]
fn stats_reports_the_documented_fields() {
    let dir = tmp();
    let out = dualtree(&["stats", "uniform-ball:N=300,d=2"], Some(dir.path()));
    assert_eq!(code(&out), 0);
    let doc = read_json(&dir.path().join("stats.json"));
    for key in ["i_t", "c", "eta", "delta", "depth", "width", "node_count"] {
        assert!(doc[key].is_number(), "{key}");
    }
}

#[test]
fn bench_csv_has_fixed_columns() {
    let dir = tmp();
    let out_path: PathBuf = dir.path().join("bench.csv");
    let out = dualtree(&["bench", "allnn", "--sizes", "100,200", "--seeds", "2", "-o", path_str(&out_path)], None);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("problem,generator,n,seed,query_recursions,reference_recursions,total_recursions"));
    assert!(header.ends_with("recursions_within_formula,oracle,oracle_mismatches"));
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().skip(1).all(|l| l.contains(",pass,0")));
}

#[test]
fn trace_records_every_base_case() {
    let dir = tmp();
    let trace = dir.path().join("trace.ndjson");
    let rep = dir.path().join("r.json");
    let out = dualtree(
        &["allnn", "-r", "uniform-ball:N=120,d=2", "--mono", "--trace", path_str(&trace), "--report", path_str(&rep),
          "-o", path_str(&dir.path().join("nn.csv"))],
        None,
    );
    assert_eq!(code(&out), 0);
    let base_cases = std::fs::read_to_string(&trace)
        .unwrap()
        .lines()
        .filter(|l| serde_json::from_str::<Value>(l).unwrap()["event"] == "base_case")
        .count() as u64;
    assert_eq!(Some(base_cases), read_json(&rep)["counters"]["base_case_calls"].as_u64());
}
