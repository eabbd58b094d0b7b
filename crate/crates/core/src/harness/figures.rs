//! Ready-made plans for the standard Cliff comparison figures.

use std::fmt;
use std::str::FromStr;

use super::{ExperimentPlan, Sweep};
use crate::benchmarks::Problem;
use crate::error::{invalid, Error, Result};
use crate::heuristics::{Algorithm, Alpha, Rate, DEFAULT_BETA, DEFAULT_BUDGET};

const DEFAULT_SEED: u64 = 0x00C1_1FF0;
const M_GRID: [f64; 7] = [8.0, 12.0, 16.0, 20.0, 24.0, 28.0, 32.0];
const ALPHA_GRID: [f64; 10] = [10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 50.0, 60.0, 80.0];
const ALPHA_SWEEP_SETTINGS: [(f64, usize); 4] = [(1.0, 8), (3.0, 8), (3.0, 12), (3.0, 16)];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigurePreset {
    /// Metropolis against (1+1) EA variants, `n = 150`, `d = 3`, growing `m`.
    Fig2,
    /// Metropolis with global mutation, `n = 100`, `α = 20`, `d = 3`.
    Fig3,
    /// Metropolis over a grid of `α` for several Cliff shapes, `n = 100`.
    AlphaSweep,
}

/// Optional replacements for a preset's defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FigureOverrides {
    pub n: Option<usize>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub budget: Option<u64>,
}

impl FigurePreset {
    pub const ALL: [FigurePreset; 3] = [FigurePreset::Fig2, FigurePreset::Fig3, FigurePreset::AlphaSweep];

    pub fn name(self) -> &'static str {
        match self {
            FigurePreset::Fig2 => "fig2",
            FigurePreset::Fig3 => "fig3",
            FigurePreset::AlphaSweep => "alpha-sweep",
        }
    }

    pub fn default_n(self) -> usize {
        match self {
            FigurePreset::Fig2 => 150,
            FigurePreset::Fig3 | FigurePreset::AlphaSweep => 100,
        }
    }

    pub fn default_trials(self) -> u64 {
        match self {
            FigurePreset::Fig2 | FigurePreset::AlphaSweep => 100,
            FigurePreset::Fig3 => 50,
        }
    }

    /// The plans whose rows make up the figure's CSV, in output order.
    pub fn plans(self, o: FigureOverrides) -> Result<Vec<ExperimentPlan>> {
        let n = o.n.unwrap_or(self.default_n());
        let trials = o.trials.unwrap_or(self.default_trials());
        let seed = o.seed.unwrap_or(DEFAULT_SEED);
        let budget = o.budget.unwrap_or(DEFAULT_BUDGET);
        let d = 3.0;
        let ma = |a: f64| Algorithm::Ma {
            alpha: Alpha::new(a).expect("preset alpha > 1"),
        };

        let plans = match self {
            FigurePreset::Fig2 => {
                let algorithms = vec![
                    ma(20.0),
                    ma(30.0),
                    ma(40.0),
                    Algorithm::Oea { p: Rate::ONE_OVER_N },
                    Algorithm::Oea {
                        p: Rate::PerN((d + 1.0f64).ceil()),
                    },
                    Algorithm::Fast { beta: DEFAULT_BETA },
                    Algorithm::Sd { r: None },
                ];
                vec![m_sweep_plan(n, d, algorithms, trials, seed)?]
            }
            FigurePreset::Fig3 => {
                let alpha = Alpha::new(20.0).expect("preset alpha > 1");
                let algorithms = vec![
                    Algorithm::Ma { alpha },
                    Algorithm::MaGstd {
                        alpha,
                        p: Rate::ONE_OVER_N,
                    },
                    Algorithm::MaGheavy {
                        alpha,
                        beta: DEFAULT_BETA,
                    },
                    Algorithm::Oea { p: Rate::ONE_OVER_N },
                ];
                vec![m_sweep_plan(n, d, algorithms, trials, seed)?]
            }
            FigurePreset::AlphaSweep => ALPHA_SWEEP_SETTINGS
                .iter()
                .filter(|&&(_, m)| m < n)
                .map(|&(d, m)| {
                    let problem = Problem::cliff(n, m, d)?;
                    Ok(ExperimentPlan::new(problem, vec![ma(ALPHA_GRID[0])], trials, seed)
                        .with_sweep(Sweep::new("alpha", ALPHA_GRID.to_vec())))
                })
                .collect::<Result<Vec<_>>>()?,
        };
        if plans.is_empty() {
            return Err(invalid("n", format!("n={n} is too small for preset {}", self.name())));
        }
        let plans: Vec<_> = plans.into_iter().map(|p| p.with_budget(budget)).collect();
        for p in &plans {
            p.cells()?;
        }
        Ok(plans)
    }
}

/// Cliff sweep over `m ∈ {8, 12, ..., 32}`, restricted to `m < n`.
fn m_sweep_plan(
    n: usize,
    d: f64,
    algorithms: Vec<Algorithm>,
    trials: u64,
    seed: u64,
) -> Result<ExperimentPlan> {
    let values: Vec<f64> = M_GRID.iter().copied().filter(|&m| (m as usize) < n).collect();
    let first = *values
        .first()
        .ok_or_else(|| invalid("n", format!("n={n} leaves no m value below n")))?;
    let problem = Problem::cliff(n, first as usize, d)?;
    Ok(ExperimentPlan::new(problem, algorithms, trials, seed).with_sweep(Sweep::new("m", values)))
}

impl fmt::Display for FigurePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigurePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigurePreset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| invalid("figure", format!("unknown preset `{s}` (expected fig2, fig3 or alpha-sweep)")))
    }
}
