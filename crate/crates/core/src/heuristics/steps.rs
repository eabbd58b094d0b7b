//! Single iterations of the trajectory-based heuristics.
//!
//! Every step mutates the current point in place, evaluates exactly one
//! offspring and reports the fitness of the point it keeps. `sampled_optimum`
//! is set whenever the evaluated offspring is `1^n`, whether or not it was
//! accepted, since runtime is the first time the optimum is sampled.

use rand::Rng;

use super::mutation::{FlipCountTable, GlobalMutation, Offspring};
use super::Alpha;
use crate::benchmarks::{Problem, SearchPoint};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    /// Fitness of the point kept after the step.
    pub fitness: f64,
    pub sampled_optimum: bool,
}

/// Metropolis rule: accept if `delta >= 0`, otherwise with probability
/// `α^{delta}`. No random number is consumed when the outcome is certain, so
/// `α = ∞` reproduces RLS draw for draw.
#[inline]
pub fn metropolis_accepts<R: Rng + ?Sized>(alpha: Alpha, delta: f64, rng: &mut R) -> bool {
    if delta >= 0.0 {
        return true;
    }
    let p = alpha.acceptance_probability(delta);
    p > 0.0 && rng.random::<f64>() < p
}

/// Metropolis algorithm: flip one uniformly chosen bit.
#[inline]
pub fn metropolis_step<R: Rng + ?Sized>(
    x: &mut SearchPoint,
    fx: f64,
    problem: &Problem,
    alpha: Alpha,
    rng: &mut R,
) -> Step {
    let n = x.len();
    let i = rng.random_range(0..n);
    let ones = if x.get(i) { x.count_ones() - 1 } else { x.count_ones() + 1 };
    let fy = problem.fitness_of_ones(ones);
    let sampled_optimum = ones == n;
    if metropolis_accepts(alpha, fy - fx, rng) {
        x.flip(i);
        Step {
            fitness: fy,
            sampled_optimum,
        }
    } else {
        Step {
            fitness: fx,
            sampled_optimum,
        }
    }
}

/// Randomized local search: flip one uniformly chosen bit, keep it if not
/// worse.
#[inline]
pub fn rls_step<R: Rng + ?Sized>(
    x: &mut SearchPoint,
    fx: f64,
    problem: &Problem,
    rng: &mut R,
) -> Step {
    let n = x.len();
    let i = rng.random_range(0..n);
    let ones = if x.get(i) { x.count_ones() - 1 } else { x.count_ones() + 1 };
    let fy = problem.fitness_of_ones(ones);
    let sampled_optimum = ones == n;
    if fy >= fx {
        x.flip(i);
        Step {
            fitness: fy,
            sampled_optimum,
        }
    } else {
        Step {
            fitness: fx,
            sampled_optimum,
        }
    }
}

/// Elitist step with an offspring that flips `k` uniformly chosen bits.
#[inline]
pub(crate) fn elitist_k_flip<R: Rng + ?Sized>(
    x: &mut SearchPoint,
    fx: f64,
    problem: &Problem,
    k: usize,
    scratch: &mut Offspring,
    rng: &mut R,
) -> (Step, bool) {
    if k == 0 {
        // y == x: accepted, nothing changes
        return (
            Step {
                fitness: fx,
                sampled_optimum: false,
            },
            false,
        );
    }
    scratch.propose(x, k, rng);
    let fy = problem.fitness_of_ones(scratch.ones());
    let sampled_optimum = scratch.ones() == x.len();
    if fy >= fx {
        scratch.apply(x);
        (
            Step {
                fitness: fy,
                sampled_optimum,
            },
            fy > fx,
        )
    } else {
        (
            Step {
                fitness: fx,
                sampled_optimum,
            },
            false,
        )
    }
}

/// (1+1) EA: standard bit mutation with the rate baked into `rate`, elitist
/// selection.
#[inline]
pub fn oea_step<R: Rng + ?Sized>(
    x: &mut SearchPoint,
    fx: f64,
    problem: &Problem,
    rate: &FlipCountTable,
    scratch: &mut Offspring,
    rng: &mut R,
) -> Step {
    let k = rate.sample(rng);
    elitist_k_flip(x, fx, problem, k, scratch, rng).0
}

/// Metropolis acceptance on an offspring produced by a global operator.
#[inline]
pub fn ma_global_step<R: Rng + ?Sized>(
    x: &mut SearchPoint,
    fx: f64,
    problem: &Problem,
    alpha: Alpha,
    mutation: &mut GlobalMutation,
    scratch: &mut Offspring,
    rng: &mut R,
) -> Step {
    let k = mutation.flip_count(rng);
    if k == 0 {
        return Step {
            fitness: fx,
            sampled_optimum: false,
        };
    }
    scratch.propose(x, k, rng);
    let fy = problem.fitness_of_ones(scratch.ones());
    let sampled_optimum = scratch.ones() == x.len();
    if metropolis_accepts(alpha, fy - fx, rng) {
        scratch.apply(x);
        Step {
            fitness: fy,
            sampled_optimum,
        }
    } else {
        Step {
            fitness: fx,
            sampled_optimum,
        }
    }
}
