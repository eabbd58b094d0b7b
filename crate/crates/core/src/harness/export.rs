use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CellSummary, ExperimentPlan, ExperimentResult};
use crate::benchmarks::Problem;
use crate::error::{invalid, Error, Result};

/// Column order of the summary CSV.
pub const CSV_COLUMNS: [&str; 14] = [
    "problem",
    "n",
    "m",
    "d",
    "algorithm",
    "param_name",
    "param_value",
    "sweep_name",
    "sweep_value",
    "trials",
    "censored",
    "mean_iterations",
    "stderr",
    "master_seed",
];

/// One line of the summary CSV. Absent values are empty fields; floats are
/// written in shortest round-trip form, so parsing a row back reproduces
/// every number exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub problem: String,
    pub n: usize,
    pub m: Option<usize>,
    pub d: Option<f64>,
    pub algorithm: String,
    pub param_name: Option<String>,
    pub param_value: Option<f64>,
    pub sweep_name: Option<String>,
    pub sweep_value: Option<f64>,
    pub trials: u64,
    pub censored: u64,
    pub mean_iterations: Option<f64>,
    pub stderr: Option<f64>,
    pub master_seed: u64,
}

impl SummaryRow {
    pub(super) fn from_summary(row: &CellSummary, plan: &ExperimentPlan) -> Self {
        let n = row.problem.n();
        let (m, d) = match row.problem.cliff_params() {
            Some((m, d)) => (Some(m), Some(d)),
            None => (None, None),
        };
        let param = row.algorithm.primary_param(n);
        SummaryRow {
            problem: row.problem.name().to_owned(),
            n,
            m,
            d,
            algorithm: row.algorithm.id().to_owned(),
            param_name: param.map(|(name, _)| name.to_owned()),
            param_value: param.map(|(_, v)| v),
            sweep_name: plan.sweep.as_ref().map(|s| s.name.clone()),
            sweep_value: row.sweep_value,
            trials: row.trials,
            censored: row.censored,
            mean_iterations: row.mean_iterations,
            stderr: row.stderr,
            master_seed: plan.master_seed,
        }
    }

    /// The benchmark instance this row was measured on.
    pub fn instance(&self) -> Result<Problem> {
        match (self.problem.as_str(), self.m, self.d) {
            ("onemax", _, _) => Problem::one_max(self.n),
            ("cliff", Some(m), Some(d)) => Problem::cliff(self.n, m, d),
            ("cliff", _, _) => Err(invalid("m", "cliff row without m and d")),
            (other, _, _) => Err(invalid("problem", format!("unknown problem `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(invalid("format", format!("expected csv or json, got `{other}`"))),
        }
    }
}

/// Write the header and `rows`. An empty slice yields a header-only file.
pub fn write_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_COLUMNS.iter().copied()) {
        return Err(invalid(
            "results",
            format!("unexpected CSV header `{}`", header.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn write_json<T: Serialize + ?Sized, W: Write>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out).map_err(|e| Error::Json(serde_json::Error::io(e)))?;
    Ok(())
}

/// Write `result` to `path`, or to standard output when `path` is `-`.
pub fn export(result: &ExperimentResult, format: ExportFormat, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let to_io = |e: Error| match e {
        Error::Csv(c) if c.is_io_error() => match c.into_kind() {
            csv::ErrorKind::Io(source) => io_err(source),
            _ => unreachable!("checked by is_io_error"),
        },
        other => other,
    };
    let write = |out: &mut dyn Write| -> Result<()> {
        match format {
            ExportFormat::Csv => write_csv(&result.summary_rows(), out),
            ExportFormat::Json => write_json(result, out),
        }
    };
    if path == Path::new("-") {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        write(&mut lock).map_err(to_io)?;
        lock.flush().map_err(io_err)
    } else {
        let file = File::create(path).map_err(io_err)?;
        let mut out = BufWriter::new(file);
        write(&mut out).map_err(to_io)?;
        out.flush().map_err(io_err)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_row() -> SummaryRow {
        SummaryRow {
            problem: "cliff".into(),
            n: 150,
            m: Some(8),
            d: Some(3.0),
            algorithm: "oea".into(),
            param_name: Some("p".into()),
            param_value: Some(4.0 / 150.0),
            sweep_name: Some("m".into()),
            sweep_value: Some(8.0),
            trials: 100,
            censored: 0,
            mean_iterations: Some(123_456.789_012_345_67),
            stderr: Some(0.1 + 0.2),
            master_seed: u64::MAX,
        }
    }

    #[test]
    fn empty_result_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", CSV_COLUMNS.join(",")));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mut rows = vec![sample_row()];
        let mut absent = sample_row();
        absent.problem = "onemax".into();
        absent.m = None;
        absent.d = None;
        absent.param_name = None;
        absent.param_value = None;
        absent.mean_iterations = None;
        absent.stderr = None;
        rows.push(absent);
        let mut inf = sample_row();
        inf.param_value = Some(f64::INFINITY);
        inf.mean_iterations = Some(1e300 / 7.0);
        rows.push(inf);

        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, rows);
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(2).unwrap().starts_with("onemax,150,,,oea,,,m,"));
    }

    #[test]
    fn wrong_header_is_rejected() {
        assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn row_instance() {
        assert_eq!(sample_row().instance().unwrap(), Problem::cliff(150, 8, 3.0).unwrap());
        let mut r = sample_row();
        r.m = None;
        assert!(r.instance().is_err());
    }
}
