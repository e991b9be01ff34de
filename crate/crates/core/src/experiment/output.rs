//! Versioned CSV files.
//!
//! Every file starts with one `# <schema> v<version>` comment line, then a
//! header row. Floats are written in shortest round-trip form; non-finite
//! values appear as `inf` / `NaN`. Readers refuse any other schema line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const RESULTS_SCHEMA: &str = "# psimax-results v1";
pub const SUMMARY_SCHEMA: &str = "# psimax-summary v1";
pub const CURVES_SCHEMA: &str = "# psimax-curves v1";
pub const CORRELATION_SCHEMA: &str = "# psimax-correlation v1";
pub const HULL_SPLIT_SCHEMA: &str = "# psimax-hull-split v1";
pub const EXPECTED_BS_SCHEMA: &str = "# psimax-expected-bs v1";

/// One geometry row per scenario with at least `l_min` hearable stations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scenario_id: u64,
    #[serde(rename = "L")]
    pub l: usize,
    pub psi_max: f64,
    pub gdop_toa: f64,
    pub gdop_tdoa: f64,
    /// False for boundary cases; see `degenerate_flag`.
    pub inside_hull: bool,
    /// Set when hull membership is undecidable or a GDOP is singular.
    pub degenerate_flag: bool,
}

/// A named statistic, optionally indexed by `arg` (an `L` or a `φ`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub statistic: String,
    pub arg: Option<f64>,
    pub value: f64,
    pub std_error: Option<f64>,
}

impl SummaryRow {
    pub fn new(statistic: &str, arg: Option<f64>, value: f64, std_error: Option<f64>) -> Self {
        Self {
            statistic: statistic.to_string(),
            arg,
            value,
            std_error,
        }
    }
}

/// One point of a named CDF curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub curve_id: String,
    pub x: f64,
    #[serde(rename = "F")]
    pub f: f64,
}

/// Incremental writer for one schema.
pub struct CsvSink {
    inner: csv::Writer<BufWriter<File>>,
}

impl CsvSink {
    pub fn create(path: &Path, schema: &str) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{schema}")?;
        Ok(Self {
            inner: csv::Writer::from_writer(out),
        })
    }

    pub fn write<T: Serialize>(&mut self, row: &T) -> Result<()> {
        self.inner.serialize(row).map_err(csv_error)
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

pub fn write_csv<'a, T, I>(path: &Path, schema: &str, rows: I) -> Result<()>
where
    T: Serialize + 'a,
    I: IntoIterator<Item = &'a T>,
{
    let mut sink = CsvSink::create(path, schema)?;
    for row in rows {
        sink.write(row)?;
    }
    sink.finish()
}

/// Reads a file written under `schema`.
pub fn read_csv<T: DeserializeOwned>(path: &Path, schema: &'static str) -> Result<Vec<T>> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let found = first.trim_end_matches(['\r', '\n']);
    if found != schema {
        return Err(Error::Schema {
            file: schema,
            message: format!("expected schema line `{schema}`, found `{found}`"),
        });
    }
    csv::Reader::from_reader(reader)
        .deserialize()
        .map(|r| {
            r.map_err(|e| Error::Schema {
                file: schema,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    read_csv(path, RESULTS_SCHEMA)
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    read_csv(path, SUMMARY_SCHEMA)
}

/// Reads a curve file and checks each curve is a valid CDF table.
pub fn read_curves(path: &Path) -> Result<Vec<CurvePoint>> {
    let points: Vec<CurvePoint> = read_csv(path, CURVES_SCHEMA)?;
    for w in points.windows(2) {
        if w[0].curve_id == w[1].curve_id && (w[1].x <= w[0].x || w[1].f < w[0].f) {
            return Err(Error::Schema {
                file: CURVES_SCHEMA,
                message: format!("curve `{}` is not a CDF table", w[0].curve_id),
            });
        }
    }
    Ok(points)
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidParameter(format!("csv: {other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: u64, psi: f64, gdop: f64) -> ResultRow {
        ResultRow {
            scenario_id: id,
            l: 4,
            psi_max: psi,
            gdop_toa: gdop,
            gdop_tdoa: gdop * 1.5,
            inside_hull: psi < std::f64::consts::PI,
            degenerate_flag: !gdop.is_finite(),
        }
    }

    #[test]
    fn results_round_trip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.csv");
        let rows = vec![
            row(0, 0.1 + 0.2, 1.0 / 3.0),
            row(7, std::f64::consts::PI, f64::INFINITY),
            row(9, std::f64::consts::TAU, 1e-300),
        ];
        write_csv(&path, RESULTS_SCHEMA, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(
            "# psimax-results v1\nscenario_id,L,psi_max,gdop_toa,gdop_tdoa,inside_hull,degenerate_flag\n"
        ));
        assert_eq!(read_results(&path).unwrap(), rows);
    }

    #[test]
    fn summary_optional_fields() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("summary.csv");
        let rows = vec![
            SummaryRow::new("scenarios", None, 10.0, None),
            SummaryRow::new("p_n_eq", Some(4.0), 0.25, Some(0.01)),
        ];
        write_csv(&path, SUMMARY_SCHEMA, &rows).unwrap();
        assert!(std::fs::read_to_string(&path).unwrap().contains("scenarios,,10.0,\n"));
        assert_eq!(read_summary(&path).unwrap(), rows);
    }

    #[test]
    fn wrong_schema_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curves.csv");
        std::fs::write(&path, "# psimax-curves v0\ncurve_id,x,F\na,1.0,0.5\n").unwrap();
        assert!(matches!(read_curves(&path), Err(Error::Schema { .. })));
        assert!(matches!(read_results(&path), Err(Error::Schema { .. })));
    }

    #[test]
    fn curves_must_be_cdfs() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curves.csv");
        std::fs::write(&path, "# psimax-curves v1\ncurve_id,x,F\na,1.0,0.5\na,2.0,0.4\n").unwrap();
        assert!(read_curves(&path).is_err());
        std::fs::write(&path, "# psimax-curves v1\ncurve_id,x,F\na,1.0,0.5\nb,0.5,0.1\n").unwrap();
        assert_eq!(read_curves(&path).unwrap().len(), 2);
    }
}
