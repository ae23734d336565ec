use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{OutputFormat, RunConfig};
use crate::error::{Error, Result};

/// One emitted value with its error estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub quantity: String,
    pub index: String,
    pub value: f64,
    pub est_error: f64,
}

impl ResultRow {
    pub fn new(
        quantity: impl Into<String>,
        index: impl ToString,
        value: f64,
        est_error: f64,
    ) -> Self {
        ResultRow {
            quantity: quantity.into(),
            index: index.to_string(),
            value,
            est_error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigSummary {
    pub radial_count: usize,
    pub angular_order: usize,
    pub solver_tol: f64,
    pub report_rtol: f64,
    pub backend: String,
    pub digest: String,
}

impl From<&RunConfig> for ConfigSummary {
    fn from(c: &RunConfig) -> Self {
        ConfigSummary {
            radial_count: c.radial_count,
            angular_order: c.angular_order,
            solver_tol: c.solver_tol,
            report_rtol: c.report_rtol,
            backend: c.backend.as_str().to_string(),
            digest: c.digest(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub results: Vec<ResultRow>,
    pub config: ConfigSummary,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl ResultRecord {
    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(self)
                    .map_err(|e| Error::config(format!("cannot serialize results: {e}")))?;
                s.push('\n');
                Ok(s)
            }
            OutputFormat::Csv => {
                let mut w = csv::WriterBuilder::new()
                    .terminator(csv::Terminator::Any(b'\n'))
                    .from_writer(Vec::new());
                for row in &self.results {
                    w.serialize(row)
                        .map_err(|e| Error::config(format!("cannot serialize results: {e}")))?;
                }
                let bytes = w
                    .into_inner()
                    .map_err(|e| Error::config(format!("cannot serialize results: {e}")))?;
                let mut s = String::from_utf8(bytes).expect("csv output is UTF-8");
                if self.results.is_empty() {
                    s.push_str("quantity,index,value,est_error\n");
                }
                Ok(s)
            }
        }
    }
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let fail = |e: std::io::Error| Error::config(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(contents.as_bytes()).map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> ResultRecord {
        ResultRecord {
            command: "holo".into(),
            params: BTreeMap::from([("n_max".into(), "3".into())]),
            results: vec![
                ResultRow::new("holo_sectional", 2, -0.1167136249340538, 1e-15),
                ResultRow::new("holo_sectional", 3, 1.0 / 3.0, 0.0),
            ],
            config: ConfigSummary::from(&RunConfig::default()),
            timestamp: 0,
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let csv = record().render(OutputFormat::Csv).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "quantity,index,value,est_error");
        assert_eq!(lines.len(), 3);
        assert!(csv.ends_with('\n'));
    }

    #[test]
    fn json_round_trips_bit_for_bit() {
        let r = record();
        let back: ResultRecord =
            serde_json::from_str(&r.render(OutputFormat::Json).unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_atomic(&p, "a\n").unwrap();
        write_atomic(&p, "b\n").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "b\n");
    }
}
