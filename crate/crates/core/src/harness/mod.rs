//! Repeated trials, parameter sweeps and aggregation.

mod compare;
mod export;
mod figures;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmarks::Problem;
use crate::error::{invalid, Error, Result};
use crate::heuristics::{run, Algorithm, HeuristicConfig, RunRecord, DEFAULT_BUDGET};
use crate::rng::derive_seed;

pub use compare::{compare_with_oracle, ComparisonStatus, OracleComparison, Z_FLAG};
pub use export::{export, read_csv, write_csv, write_json, ExportFormat, SummaryRow, CSV_COLUMNS};
pub use figures::{FigureOverrides, FigurePreset};

/// A parameter varied across the cells of a plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    /// `n`, `m` or `d` (instance) or `alpha`, `p`, `beta`, `R` (algorithm).
    pub name: String,
    pub values: Vec<f64>,
}

impl Sweep {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        Sweep {
            name: name.into(),
            values,
        }
    }

    /// `start, start + step, ...` up to and including `stop` (within rounding).
    pub fn range(name: impl Into<String>, start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && start.is_finite() && stop.is_finite()) {
            return Err(invalid("vary", format!("need a positive step and finite bounds, got {start}:{stop}:{step}")));
        }
        if stop < start {
            return Err(invalid("vary", format!("stop {stop} is below start {start}")));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        let values = (0..count).map(|i| start + i as f64 * step).collect();
        Ok(Sweep::new(name, values))
    }

    fn is_instance_param(&self) -> bool {
        matches!(self.name.as_str(), "n" | "m" | "d")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    /// Instance template; a sweep over `n`, `m` or `d` overrides one field.
    pub problem: Problem,
    pub sweep: Option<Sweep>,
    pub algorithms: Vec<Algorithm>,
    pub trials: u64,
    pub master_seed: u64,
    pub budget: u64,
}

impl ExperimentPlan {
    pub fn new(problem: Problem, algorithms: Vec<Algorithm>, trials: u64, master_seed: u64) -> Self {
        ExperimentPlan {
            problem,
            sweep: None,
            algorithms,
            trials,
            master_seed,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_sweep(mut self, sweep: Sweep) -> Self {
        self.sweep = Some(sweep);
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// Instance and algorithm list of every cell, validated.
    pub fn cells(&self) -> Result<Vec<Cell>> {
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        if self.budget == 0 {
            return Err(invalid("budget", "must be positive"));
        }
        if self.algorithms.is_empty() {
            return Err(invalid("algorithms", "plan has no algorithms"));
        }
        let Some(sweep) = &self.sweep else {
            let cell = Cell {
                sweep_value: None,
                problem: self.problem,
                algorithms: self.algorithms.clone(),
            };
            cell.validate(self.budget)?;
            return Ok(vec![cell]);
        };

        if sweep.values.is_empty() {
            return Err(invalid("vary", "sweep has no values"));
        }
        if sweep.values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("vary", "sweep values must be finite"));
        }
        if sweep.values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("vary", "sweep values must be strictly increasing"));
        }
        if !sweep.is_instance_param() && !self.algorithms.iter().any(|a| a.has_param(&sweep.name)) {
            return Err(Error::Unsupported(format!(
                "no algorithm in the plan has a parameter `{}`",
                sweep.name
            )));
        }
        sweep
            .values
            .iter()
            .map(|&v| {
                let cell = if sweep.is_instance_param() {
                    Cell {
                        sweep_value: Some(v),
                        problem: self.problem.with_param(&sweep.name, v)?,
                        algorithms: self.algorithms.clone(),
                    }
                } else {
                    let algorithms = self
                        .algorithms
                        .iter()
                        .map(|a| {
                            if a.has_param(&sweep.name) {
                                a.with_param(&sweep.name, v)
                            } else {
                                Ok(*a)
                            }
                        })
                        .collect::<Result<_>>()?;
                    Cell {
                        sweep_value: Some(v),
                        problem: self.problem,
                        algorithms,
                    }
                };
                cell.validate(self.budget)?;
                Ok(cell)
            })
            .collect()
    }
}

/// One sweep point of a plan.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub sweep_value: Option<f64>,
    pub problem: Problem,
    pub algorithms: Vec<Algorithm>,
}

impl Cell {
    fn validate(&self, budget: u64) -> Result<()> {
        for a in &self.algorithms {
            HeuristicConfig::new(*a).with_budget(budget).validate(&self.problem)?;
        }
        Ok(())
    }
}

/// Aggregate of all trials of one (sweep value, algorithm) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub sweep_index: usize,
    pub sweep_value: Option<f64>,
    pub algorithm_index: usize,
    pub problem: Problem,
    pub algorithm: Algorithm,
    pub trials: u64,
    pub censored: u64,
    /// Mean over non-censored runs; absent if every run was censored.
    pub mean_iterations: Option<f64>,
    /// Sample standard deviation over `√(non-censored runs)`; needs two runs.
    pub stderr: Option<f64>,
    pub all_censored: bool,
    pub records: Vec<RunRecord>,
}

impl CellSummary {
    fn from_records(
        (sweep_index, cell): (usize, &Cell),
        algorithm_index: usize,
        records: Vec<RunRecord>,
    ) -> Self {
        let (mean, stderr) = mean_and_stderr(
            records
                .iter()
                .filter(|r| r.hit_optimum)
                .map(|r| r.iterations as f64),
        );
        let censored = records.iter().filter(|r| !r.hit_optimum).count() as u64;
        CellSummary {
            sweep_index,
            sweep_value: cell.sweep_value,
            algorithm_index,
            problem: cell.problem,
            algorithm: cell.algorithms[algorithm_index],
            trials: records.len() as u64,
            censored,
            mean_iterations: mean,
            stderr,
            all_censored: mean.is_none(),
            records,
        }
    }
}

/// Mean and standard error of the mean; Welford's update keeps the variance
/// accurate for large iteration counts.
pub fn mean_and_stderr<I: IntoIterator<Item = f64>>(values: I) -> (Option<f64>, Option<f64>) {
    let (mut count, mut mean, mut m2) = (0u64, 0.0f64, 0.0f64);
    for x in values {
        count += 1;
        let delta = x - mean;
        mean += delta / count as f64;
        m2 += delta * (x - mean);
    }
    match count {
        0 => (None, None),
        1 => (Some(mean), None),
        c => {
            let var = m2 / (c - 1) as f64;
            (Some(mean), Some((var / c as f64).sqrt()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub version: String,
    /// Seconds since the Unix epoch when the experiment finished.
    pub created_unix_secs: u64,
}

impl Provenance {
    fn now() -> Self {
        Provenance {
            version: env!("CARGO_PKG_VERSION").to_owned(),
            created_unix_secs: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub plan: ExperimentPlan,
    /// Ordered by sweep index, then algorithm index.
    pub rows: Vec<CellSummary>,
    pub warnings: Vec<String>,
    pub provenance: Provenance,
}

impl ExperimentResult {
    /// Flat CSV-shaped rows.
    pub fn summary_rows(&self) -> Vec<SummaryRow> {
        self.rows
            .iter()
            .map(|row| SummaryRow::from_summary(row, &self.plan))
            .collect()
    }

    pub fn row(&self, sweep_index: usize, algorithm_index: usize) -> Option<&CellSummary> {
        self.rows
            .iter()
            .find(|r| r.sweep_index == sweep_index && r.algorithm_index == algorithm_index)
    }
}

/// Run every trial of the plan. Trials run in parallel on the current rayon
/// pool; results do not depend on scheduling.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    run_experiment_with_progress(plan, |_, _| {})
}

/// Like [`run_experiment`], calling `progress(done, total)` after each trial.
pub fn run_experiment_with_progress<F>(plan: &ExperimentPlan, progress: F) -> Result<ExperimentResult>
where
    F: Fn(usize, usize) + Sync,
{
    let cells = plan.cells()?;
    let mut jobs = Vec::new();
    for (si, cell) in cells.iter().enumerate() {
        for ai in 0..cell.algorithms.len() {
            for t in 0..plan.trials {
                jobs.push((si, ai, t));
            }
        }
    }
    let total = jobs.len();
    let done = AtomicUsize::new(0);
    let records: Vec<RunRecord> = jobs
        .par_iter()
        .map(|&(si, ai, t)| {
            let cell = &cells[si];
            let config = HeuristicConfig::new(cell.algorithms[ai]).with_budget(plan.budget);
            let seed = derive_seed(plan.master_seed, &[si as u64, ai as u64, t]);
            let record = run(&config, &cell.problem, seed);
            progress(done.fetch_add(1, Ordering::Relaxed) + 1, total);
            record
        })
        .collect::<Result<_>>()?;

    let per_cell = plan.trials as usize;
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    let mut chunks = records.chunks(per_cell);
    for (si, cell) in cells.iter().enumerate() {
        for ai in 0..cell.algorithms.len() {
            let chunk = chunks.next().expect("one chunk per cell").to_vec();
            let summary = CellSummary::from_records((si, cell), ai, chunk);
            if summary.all_censored {
                warnings.push(format!(
                    "all {} runs of {} censored at budget {}{}",
                    summary.trials,
                    summary.algorithm,
                    plan.budget,
                    summary
                        .sweep_value
                        .map(|v| format!(" (sweep value {v})"))
                        .unwrap_or_default()
                ));
            } else if summary.censored > 0 {
                warnings.push(format!(
                    "{} of {} runs of {} censored{}",
                    summary.censored,
                    summary.trials,
                    summary.algorithm,
                    summary
                        .sweep_value
                        .map(|v| format!(" (sweep value {v})"))
                        .unwrap_or_default()
                ));
            }
            rows.push(summary);
        }
    }
    Ok(ExperimentResult {
        plan: plan.clone(),
        rows,
        warnings,
        provenance: Provenance::now(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_includes_stop() {
        let s = Sweep::range("m", 8.0, 32.0, 4.0).unwrap();
        assert_eq!(s.values, vec![8.0, 12.0, 16.0, 20.0, 24.0, 28.0, 32.0]);
        let s = Sweep::range("alpha", 1.5, 2.0, 0.1).unwrap();
        assert_eq!(s.values.len(), 6);
        assert!(Sweep::range("m", 8.0, 4.0, 1.0).is_err());
        assert!(Sweep::range("m", 8.0, 12.0, 0.0).is_err());
    }

    #[test]
    fn mean_and_stderr_values() {
        assert_eq!(mean_and_stderr([]), (None, None));
        assert_eq!(mean_and_stderr([4.0]), (Some(4.0), None));
        let (m, s) = mean_and_stderr([1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, Some(2.5));
        let var: f64 = 5.0 / 3.0;
        assert!((s.unwrap() - (var / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn invalid_plans_are_rejected() {
        let p = Problem::cliff(20, 5, 2.0).unwrap();
        let ma = Algorithm::metropolis(3.0).unwrap();
        assert!(ExperimentPlan::new(p, vec![ma], 0, 1).cells().is_err());
        assert!(ExperimentPlan::new(p, vec![], 1, 1).cells().is_err());
        let plan = ExperimentPlan::new(p, vec![ma], 1, 1);
        assert!(plan.clone().with_sweep(Sweep::new("m", vec![4.0, 4.0])).cells().is_err());
        assert!(plan.clone().with_sweep(Sweep::new("m", vec![])).cells().is_err());
        assert!(plan.clone().with_sweep(Sweep::new("m", vec![4.0, 25.0])).cells().is_err());
        assert!(plan.clone().with_sweep(Sweep::new("beta", vec![2.0])).cells().is_err());
        assert!(plan.clone().with_sweep(Sweep::new("alpha", vec![0.5])).cells().is_err());
        assert_eq!(plan.with_sweep(Sweep::new("alpha", vec![2.0, 4.0])).cells().unwrap().len(), 2);
    }

    #[test]
    fn algorithm_sweeps_leave_other_algorithms_alone() {
        let p = Problem::one_max(30).unwrap();
        let plan = ExperimentPlan::new(p, vec![Algorithm::metropolis(3.0).unwrap(), Algorithm::Rls], 1, 1)
            .with_sweep(Sweep::new("alpha", vec![5.0, 6.0]));
        let cells = plan.cells().unwrap();
        assert_eq!(cells[1].algorithms[0].alpha().unwrap().value(), 6.0);
        assert_eq!(cells[1].algorithms[1], Algorithm::Rls);
    }
}
