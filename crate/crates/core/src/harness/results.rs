use std::fs::OpenOptions;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ValidationIssue;
use crate::error::{Error, Result};
use crate::stats::Summary;

/// CSV column order. Never reorder; append new columns at the end.
pub const COLUMNS: [&str; 27] = [
    "experiment_id",
    "kind",
    "label",
    "statistic",
    "law_a",
    "law_b",
    "law_p",
    "dim",
    "direction",
    "chord",
    "n",
    "kappa",
    "t",
    "epsilon",
    "replicas",
    "seed",
    "count",
    "mean",
    "sd",
    "se",
    "median",
    "min",
    "max",
    "verdict",
    "truncation_failures",
    "version",
    "schema",
];

/// Version of the CSV layout, stored in every row.
pub const CSV_SCHEMA: u32 = 1;

/// One line of the results table. Empty cells are `None`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment_id: String,
    pub kind: String,
    /// Task label, e.g. `mu/(1,0)/n=256`.
    pub label: String,
    /// Quantity summarized by the statistics columns, e.g. `T/n`.
    pub statistic: String,
    pub law_a: Option<u32>,
    pub law_b: Option<u32>,
    pub law_p: Option<f64>,
    pub dim: usize,
    pub direction: Option<String>,
    pub chord: Option<String>,
    pub n: Option<i64>,
    pub kappa: Option<f64>,
    pub t: Option<u64>,
    pub epsilon: Option<f64>,
    pub replicas: u64,
    /// Master seed of the experiment.
    pub seed: u64,
    pub count: Option<u64>,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub se: Option<f64>,
    pub median: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub verdict: Option<String>,
    pub truncation_failures: Option<u64>,
    pub version: String,
    pub schema: u32,
}

impl ResultRow {
    pub fn with_summary(mut self, s: &Summary) -> Self {
        self.count = Some(s.count as u64);
        self.mean = Some(s.mean);
        self.sd = Some(s.sd);
        self.se = Some(s.se);
        self.median = Some(s.median);
        self.min = Some(s.min);
        self.max = Some(s.max);
        self
    }

    /// A single value with an optional standard error.
    pub fn with_value(mut self, value: f64, se: Option<f64>) -> Self {
        self.mean = Some(value);
        self.se = se;
        self
    }
}

/// Parses a results table, checking the header.
pub fn read_rows<R: Read>(reader: R) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != COLUMNS {
        return Err(Error::Validation(vec![ValidationIssue {
            path: "out".into(),
            message: "results file has an unexpected header".into(),
        }]));
    }
    rdr.deserialize().map(|r| Ok(r?)).collect()
}

/// Encodes rows without a header.
pub fn encode_rows(rows: &[ResultRow]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner()
        .map_err(|e| Error::Csv(csv::Error::from(e.into_error())))
}

fn header_line() -> String {
    format!("{}\n", COLUMNS.join(","))
}

/// Experiment ids already present in a results file.
pub fn recorded_ids(path: &Path) -> Result<Vec<String>> {
    match std::fs::File::open(path) {
        Ok(f) => {
            let mut ids: Vec<String> = read_rows(f)?.into_iter().map(|r| r.experiment_id).collect();
            ids.dedup();
            Ok(ids)
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
        Err(e) => Err(Error::io(path, e)),
    }
}

/// Appends rows, writing the header first if the file is new or empty.
/// Existing content is never rewritten.
pub fn append_rows(path: &Path, rows: &[ResultRow]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let existing = match std::fs::read(path) {
        Ok(bytes) => Some(bytes),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
        Err(e) => return Err(Error::io(path, e)),
    };
    let mut out = Vec::new();
    match existing.filter(|b| !b.is_empty()) {
        None => out.extend_from_slice(header_line().as_bytes()),
        Some(bytes) => {
            if !bytes.starts_with(header_line().as_bytes()) {
                return Err(Error::Validation(vec![ValidationIssue {
                    path: "out".into(),
                    message: format!("{} has a different header", path.display()),
                }]));
            }
        }
    }
    out.extend(encode_rows(rows)?);
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    f.write_all(&out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: &str) -> ResultRow {
        ResultRow {
            experiment_id: id.into(),
            kind: "mu".into(),
            label: "mu/(1,0)/n=16".into(),
            statistic: "T/n".into(),
            law_a: Some(1),
            law_b: Some(1),
            law_p: Some(1.0),
            dim: 2,
            direction: Some("(1,0)".into()),
            n: Some(16),
            replicas: 4,
            seed: 7,
            verdict: Some("zero".into()),
            version: "0.1.0".into(),
            schema: CSV_SCHEMA,
            ..ResultRow::default()
        }
        .with_summary(&Summary::of(&[1.0, 1.0]).unwrap())
    }

    #[test]
    fn append_only_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        append_rows(&path, &[row("a")]).unwrap();
        let first = std::fs::read(&path).unwrap();
        append_rows(&path, &[row("b"), row("b")]).unwrap();
        let both = std::fs::read(&path).unwrap();
        assert!(both.starts_with(&first));
        let rows = read_rows(&both[..]).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0], row("a"));
        assert_eq!(recorded_ids(&path).unwrap(), vec!["a", "b"]);
        assert!(String::from_utf8(first)
            .unwrap()
            .contains(",\"(1,0)\",,16,"));
    }

    #[test]
    fn foreign_header_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(append_rows(&path, &[row("a")]).is_err());
        assert!(read_rows(&b"a,b\n1,2\n"[..]).is_err());
    }
}
