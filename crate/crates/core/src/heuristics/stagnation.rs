//! SD-(1+1) EA: a (1+1) EA that raises its mutation strength after a long
//! run of unsuccessful steps.
//!
//! Strength `r` uses rate `r/n`. The failure counter `u` counts steps since the
//! last strict improvement or strength change. Once `u` exceeds
//! `(n/r)^r (n/(n-r))^{n-r} ln(enR)` the strength is raised by one, up to
//! `⌊n/2⌋`. A strict improvement resets `r = 1` and `u = 0`. Equal-fitness
//! offspring are accepted only at strength 1 and do not reset the counter.

use rand::Rng;

use super::mutation::{Offspring, RateLadder};
use super::steps::{elitist_k_flip, Step};
use crate::benchmarks::{Problem, SearchPoint};
use crate::error::{invalid, Result};

/// Failure threshold for strength `r`, in log space.
pub fn ln_threshold(n: usize, r: usize, big_r: f64) -> f64 {
    let (nf, rf) = (n as f64, r as f64);
    let rest = if r < n {
        (nf - rf) * (nf / (nf - rf)).ln()
    } else {
        0.0
    };
    rf * (nf / rf).ln() + rest + (1.0 + nf.ln() + big_r.ln()).ln()
}

pub fn threshold(n: usize, r: usize, big_r: f64) -> f64 {
    ln_threshold(n, r, big_r).exp()
}

/// Parameters and caches shared by all steps of one SD run.
#[derive(Debug, Clone)]
pub struct StagnationDetection {
    n: usize,
    max_strength: usize,
    thresholds: Vec<f64>,
    ladder: RateLadder,
    scratch: Offspring,
}

impl StagnationDetection {
    /// `big_r` is the `R` parameter; `n³` is the usual choice.
    pub fn new(n: usize, big_r: f64) -> Result<Self> {
        if n < 2 {
            return Err(invalid("n", format!("stagnation detection needs n >= 2, got {n}")));
        }
        if !(big_r >= 1.0 && big_r.is_finite()) {
            return Err(invalid("R", format!("must be a finite number >= 1, got {big_r}")));
        }
        let max_strength = n / 2;
        // thresholds[r] for r in 1..=max_strength; slot 0 unused
        let thresholds = (0..=max_strength)
            .map(|r| if r == 0 { 0.0 } else { threshold(n, r, big_r) })
            .collect();
        Ok(StagnationDetection {
            n,
            max_strength,
            thresholds,
            ladder: RateLadder::new(n),
            scratch: Offspring::default(),
        })
    }

    pub fn max_strength(&self) -> usize {
        self.max_strength
    }

    pub fn threshold(&self, r: usize) -> f64 {
        self.thresholds[r]
    }
}

/// Mutable state of an SD run.
#[derive(Debug, Clone, PartialEq)]
pub struct SdState {
    pub x: SearchPoint,
    pub fitness: f64,
    /// Current strength, `1 <= r <= ⌊n/2⌋`.
    pub strength: usize,
    /// Failures since the last reset.
    pub failures: u64,
}

impl SdState {
    pub fn new(x: SearchPoint, problem: &Problem) -> Result<Self> {
        let fitness = problem.evaluate(&x)?;
        Ok(SdState {
            x,
            fitness,
            strength: 1,
            failures: 0,
        })
    }
}

pub fn sd_oea_step<R: Rng + ?Sized>(
    state: &mut SdState,
    sd: &mut StagnationDetection,
    problem: &Problem,
    rng: &mut R,
) -> Step {
    debug_assert_eq!(state.x.len(), sd.n);
    let r = state.strength;
    let k = sd.ladder.table(r).sample(rng);
    state.failures += 1;

    let step = if r == 1 {
        let (step, improved) =
            elitist_k_flip(&mut state.x, state.fitness, problem, k, &mut sd.scratch, rng);
        if improved {
            state.failures = 0;
        }
        step
    } else if k == 0 {
        Step {
            fitness: state.fitness,
            sampled_optimum: false,
        }
    } else {
        // at r > 1 only strict improvements are kept
        sd.scratch.propose(&state.x, k, rng);
        let fy = problem.fitness_of_ones(sd.scratch.ones());
        let sampled_optimum = sd.scratch.ones() == sd.n;
        if fy > state.fitness {
            sd.scratch.apply(&mut state.x);
            state.strength = 1;
            state.failures = 0;
            Step {
                fitness: fy,
                sampled_optimum,
            }
        } else {
            Step {
                fitness: state.fitness,
                sampled_optimum,
            }
        }
    };
    state.fitness = step.fitness;

    if state.failures as f64 > sd.thresholds[state.strength] {
        state.strength = (state.strength + 1).min(sd.max_strength);
        state.failures = 0;
    }
    step
}
