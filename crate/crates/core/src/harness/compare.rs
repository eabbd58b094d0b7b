use serde::Serialize;

use super::SummaryRow;
use crate::benchmarks::Problem;
use crate::error::Result;
use crate::heuristics::Alpha;
use crate::oracle::expected_runtime;

/// `|z|` above this value flags a row.
pub const Z_FLAG: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonStatus {
    Agrees,
    Flagged,
    /// The exact chain only covers one-bit-flip Metropolis and RLS.
    NoOracle,
    /// Every run was censored, so there is no mean to compare.
    NoEstimate,
    /// The oracle reports an infinite expectation (e.g. Cliff with `α = ∞`).
    Unreachable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleComparison {
    pub row: usize,
    pub algorithm: String,
    pub sweep_value: Option<f64>,
    pub mean: Option<f64>,
    pub stderr: Option<f64>,
    pub exact: Option<f64>,
    pub z: Option<f64>,
    pub censored: u64,
    pub status: ComparisonStatus,
}

/// z-score of every row against the exact expected runtime.
///
/// The instance and `α` are taken from each row unless given explicitly.
pub fn compare_with_oracle(
    rows: &[SummaryRow],
    problem: Option<Problem>,
    alpha: Option<Alpha>,
) -> Result<Vec<OracleComparison>> {
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let mut out = OracleComparison {
                row: i,
                algorithm: row.algorithm.clone(),
                sweep_value: row.sweep_value,
                mean: row.mean_iterations,
                stderr: row.stderr,
                exact: None,
                z: None,
                censored: row.censored,
                status: ComparisonStatus::NoOracle,
            };
            let alpha = match row.algorithm.as_str() {
                "rls" => Alpha::INFINITE,
                "ma" => match alpha {
                    Some(a) => a,
                    None => Alpha::new(row.param_value.unwrap_or(f64::NAN))?,
                },
                _ => return Ok(out),
            };
            let instance = match problem {
                Some(p) => p,
                None => row.instance()?,
            };
            let exact = match expected_runtime(&instance, alpha) {
                Ok(v) => v,
                Err(crate::error::Error::UnreachableOptimum { .. }) => {
                    out.status = ComparisonStatus::Unreachable;
                    return Ok(out);
                }
                Err(e) => return Err(e),
            };
            out.exact = Some(exact);
            let Some(mean) = row.mean_iterations else {
                out.status = ComparisonStatus::NoEstimate;
                return Ok(out);
            };
            let z = if mean == exact {
                0.0
            } else {
                match row.stderr {
                    Some(se) if se > 0.0 => (mean - exact) / se,
                    _ => f64::INFINITY.copysign(mean - exact),
                }
            };
            out.z = Some(z);
            out.status = if z.abs() <= Z_FLAG {
                ComparisonStatus::Agrees
            } else {
                ComparisonStatus::Flagged
            };
            Ok(out)
        })
        .collect()
}
