//! Runtime analysis of the Metropolis algorithm and (1+1) EA variants on
//! OneMax and Cliff: simulation, exact Markov-chain expectations, closed-form
//! bounds and an experiment harness.

pub mod benchmarks;
pub mod bounds;
pub mod error;
pub mod harness;
pub mod heuristics;
pub mod numeric;
pub mod oracle;
pub mod rng;

pub use benchmarks::{Problem, SearchPoint};
pub use error::{Error, Result};
pub use harness::{ExperimentPlan, ExperimentResult, Sweep};
pub use heuristics::{run, Algorithm, Alpha, HeuristicConfig, Rate, RunRecord};
pub use numeric::Magnitude;
