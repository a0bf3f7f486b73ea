//! Dataset CSV files and generator-spec sources.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use dualtree_core::dataset::DuplicatePolicy;
use dualtree_core::generate::{generate_dataset, GeneratorSpec};
use dualtree_core::Dataset;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum HeaderMode {
    /// Treat the first row as a header if any field is not a number.
    #[default]
    Auto,
    Yes,
    No,
}

/// Read one point per row. Every row must have the same number of numeric
/// fields; errors name the 1-based row.
pub fn read_csv(path: &Path, header: HeaderMode, policy: DuplicatePolicy) -> CliResult<Dataset> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(file);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (i, record) in reader.records().enumerate() {
        let row = i as u64 + 1;
        let record = record.map_err(|e| CliError::Csv { path: path.into(), row, message: e.to_string() })?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let values = match (parsed, header, i) {
            (Ok(v), HeaderMode::Auto | HeaderMode::No, _) => v,
            (_, HeaderMode::Yes, 0) | (Err(_), HeaderMode::Auto, 0) => continue,
            (Ok(v), HeaderMode::Yes, _) => v,
            (Err(_), _, _) => {
                let bad = record.iter().find(|f| f.parse::<f64>().is_err()).unwrap_or("");
                return Err(CliError::Csv { path: path.into(), row, message: format!("not a number: `{bad}`") });
            }
        };
        if let Some(c) = values.iter().position(|v| !v.is_finite()) {
            return Err(CliError::Csv { path: path.into(), row, message: format!("non-finite value in column {}", c + 1) });
        }
        match width {
            None => width = Some(values.len()),
            Some(w) if w != values.len() => {
                return Err(CliError::Csv {
                    path: path.into(),
                    row,
                    message: format!("expected {w} columns, found {}", values.len()),
                })
            }
            _ => {}
        }
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(CliError::Csv { path: path.into(), row: 0, message: "no data rows".into() });
    }
    Ok(Dataset::from_rows_with_policy(&rows, policy)?)
}

/// Write one point per row, with an `x0,x1,...` header unless disabled.
pub fn write_csv(path: &Path, data: &Dataset, header: bool) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_csv_to(&mut w, data, header).and_then(|()| w.flush()).map_err(|e| CliError::io(path, e))
}

pub fn write_csv_to<W: Write>(w: &mut W, data: &Dataset, header: bool) -> std::io::Result<()> {
    if header {
        let names: Vec<String> = (0..data.dim()).map(|i| format!("x{i}")).collect();
        writeln!(w, "{}", names.join(","))?;
    }
    for p in data.points() {
        let fields: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

/// Where a dataset comes from: an existing CSV file, or a generator spec
/// such as `uniform-ball:N=100,d=3`.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    File(PathBuf),
    Generated { spec: GeneratorSpec, seed: u64 },
}

impl DataSource {
    pub fn resolve(arg: &str, seed: u64) -> CliResult<Self> {
        let path = Path::new(arg);
        if path.exists() {
            return Ok(DataSource::File(path.into()));
        }
        match arg.parse::<GeneratorSpec>() {
            Ok(spec) => Ok(DataSource::Generated { spec, seed }),
            Err(e) if arg.contains(':') => Err(CliError::Usage(format!("`{arg}`: {e}"))),
            Err(_) => Err(CliError::Usage(format!("`{arg}` is neither an existing file nor a generator spec"))),
        }
    }

    pub fn load(&self, header: HeaderMode, policy: DuplicatePolicy) -> CliResult<Dataset> {
        match self {
            DataSource::File(p) => read_csv(p, header, policy),
            DataSource::Generated { spec, seed } => {
                let ds = generate_dataset(spec, *seed)?;
                Ok(match policy {
                    DuplicatePolicy::Reject => ds,
                    DuplicatePolicy::Weighted => ds.collapse_duplicates().0,
                })
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            DataSource::File(p) => p.display().to_string(),
            DataSource::Generated { spec, seed } => format!("{spec} (seed {seed})"),
        }
    }
}
