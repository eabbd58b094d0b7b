//! Exact expected runtimes of the Metropolis algorithm on OneMax and Cliff.
//!
//! With one-bit flips both functions only see the number of zero-bits, so the
//! algorithm is a birth-death chain on the distance `i ∈ [0, n]`. `E_i` is the
//! expected time to go from distance `i` to `i - 1`; the one-step equation
//! gives `E_i = 1/p⁻_i + (p⁺_i/p⁻_i) E_{i+1}` with `E_n = 1/p⁻_n`.
//!
//! Every quantity is computed twice: directly in `f64` (which overflows for
//! small α) and in log space.

use serde::Serialize;

use crate::benchmarks::Problem;
use crate::error::{Error, Result};
use crate::heuristics::Alpha;
use crate::numeric::{ln_add_exp, ln_binomial_half_weights, ln_sum_exp, Magnitude};

/// Level-wise transition probabilities. Index `i` is the distance to the
/// optimum; the remaining mass `1 - p⁻_i - p⁺_i` is a self-loop.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelChain {
    pub problem: Problem,
    pub alpha: Alpha,
    /// `p_minus[i]`: probability of moving to distance `i - 1`. `p_minus[0] = 0`.
    pub p_minus: Vec<f64>,
    /// `p_plus[i]`: probability of moving to distance `i + 1`. `p_plus[n] = 0`.
    pub p_plus: Vec<f64>,
}

impl LevelChain {
    pub fn n(&self) -> usize {
        self.p_minus.len() - 1
    }

    /// One-step drift towards the optimum, `p⁻_i - p⁺_i`.
    pub fn drift(&self, i: usize) -> f64 {
        self.p_minus[i] - self.p_plus[i]
    }

    fn ln_ratio(&self, i: usize) -> f64 {
        self.p_plus[i].ln() - self.p_minus[i].ln()
    }
}

/// Transition probabilities of the Metropolis algorithm with parameter
/// `alpha` on `problem`.
pub fn build_level_chain(problem: &Problem, alpha: Alpha) -> LevelChain {
    let n = problem.n();
    let nf = n as f64;
    let inv_alpha = if alpha.is_infinite() { 0.0 } else { alpha.value().recip() };
    let mut p_minus = vec![0.0; n + 1];
    let mut p_plus = vec![0.0; n + 1];
    for i in 1..=n {
        p_minus[i] = i as f64 / nf;
    }
    for (i, p) in p_plus.iter_mut().enumerate().take(n) {
        *p = (n - i) as f64 / nf * inv_alpha;
    }
    if let Problem::Cliff { m, d, .. } = *problem {
        p_minus[m] = if alpha.is_infinite() {
            0.0
        } else {
            (-d * alpha.ln()).exp() * m as f64 / nf
        };
        // from m - 1 the step back to m climbs the cliff edge: always accepted
        p_plus[m - 1] = (n - m + 1) as f64 / nf;
    }
    LevelChain {
        problem: *problem,
        alpha,
        p_minus,
        p_plus,
    }
}

/// Expected upgrade times of a level chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HittingTimes {
    /// `e[i]` for `i ∈ [1, n]`, direct evaluation (may be `inf`). `e[0] = 0`.
    pub e: Vec<f64>,
    /// `ln e[i]`; `ln_e[0] = -inf`.
    pub ln_e: Vec<f64>,
    /// `total_from[k] = Σ_{l ≤ k} e[l]`, the expected time from distance `k`.
    pub total_from: Vec<f64>,
    pub ln_total_from: Vec<f64>,
    /// Expected runtime from a uniformly random start.
    pub expected_start: f64,
    pub ln_expected_start: f64,
}

impl HittingTimes {
    pub fn n(&self) -> usize {
        self.e.len() - 1
    }

    pub fn e_magnitude(&self, i: usize) -> Magnitude {
        Magnitude::from_ln(self.ln_e[i])
    }

    pub fn total_from_magnitude(&self, k: usize) -> Magnitude {
        Magnitude::from_ln(self.ln_total_from[k])
    }

    pub fn expected_start_magnitude(&self) -> Magnitude {
        Magnitude::from_ln(self.ln_expected_start)
    }
}

/// Solve the one-step recursion backwards from `E_n`.
pub fn expected_upgrade_times(chain: &LevelChain) -> Result<HittingTimes> {
    let n = chain.n();
    if let Some(level) = (1..=n).find(|&i| !(chain.p_minus[i] > 0.0)) {
        return Err(Error::UnreachableOptimum { level });
    }
    let mut e = vec![0.0; n + 1];
    let mut ln_e = vec![f64::NEG_INFINITY; n + 1];
    e[n] = chain.p_minus[n].recip();
    ln_e[n] = -chain.p_minus[n].ln();
    for i in (1..n).rev() {
        let (pm, pp) = (chain.p_minus[i], chain.p_plus[i]);
        e[i] = pm.recip() + pp / pm * e[i + 1];
        ln_e[i] = if pp > 0.0 {
            ln_add_exp(-pm.ln(), chain.ln_ratio(i) + ln_e[i + 1])
        } else {
            -pm.ln()
        };
    }

    let mut total_from = vec![0.0; n + 1];
    let mut ln_total_from = vec![f64::NEG_INFINITY; n + 1];
    for k in 1..=n {
        total_from[k] = total_from[k - 1] + e[k];
        ln_total_from[k] = ln_add_exp(ln_total_from[k - 1], ln_e[k]);
    }

    let weights = ln_binomial_half_weights(n);
    let ln_expected_start = ln_sum_exp((1..=n).map(|k| weights[k] + ln_total_from[k]));
    let direct: f64 = (1..=n).map(|k| weights[k].exp() * total_from[k]).sum();
    // the direct sum underflows its weights for large n; fall back to logs
    let expected_start = if direct.is_finite() && n <= 1000 {
        direct
    } else {
        ln_expected_start.exp()
    };

    Ok(HittingTimes {
        e,
        ln_e,
        total_from,
        ln_total_from,
        expected_start,
        ln_expected_start,
    })
}

/// Expected runtime of the Metropolis algorithm from a uniformly random start.
pub fn expected_runtime(problem: &Problem, alpha: Alpha) -> Result<f64> {
    Ok(expected_upgrade_times(&build_level_chain(problem, alpha))?.expected_start)
}

/// Expected first-passage times into one target level, indexed by start
/// level. `None` marks starts from which the target is not hit almost surely.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstPassageTimes {
    pub target: usize,
    pub times: Vec<Option<f64>>,
}

/// Independent check of [`expected_upgrade_times`]: builds the full
/// `(n+1)`-state transition matrix and solves `(I - Q) h = 1` over the
/// non-target states by dense elimination.
///
/// The elimination is the Grassmann-Taksar-Heyman variant: every pivot is the
/// total mass leaving a state (to later states or into the target) rather than
/// `1 - Q_kk`, so no subtraction ever occurs and the result stays accurate when
/// the self-loop probability is close to one.
///
/// Fails with [`Error::SingularSystem`] if some level at or above `target`
/// cannot reach it almost surely; lower levels that cannot are reported as
/// `None`.
pub fn solve_first_passage_linear(chain: &LevelChain, target: usize) -> Result<FirstPassageTimes> {
    let n = chain.n();
    if target > n {
        return Err(Error::LevelOrder {
            low: target,
            start: target,
            high: target,
            n,
        });
    }
    let size = n + 1;
    let mut p = vec![vec![0.0; size]; size];
    for i in 0..size {
        if i > 0 {
            p[i][i - 1] = chain.p_minus[i];
        }
        if i < n {
            p[i][i + 1] = chain.p_plus[i];
        }
    }

    // states that reach the target almost surely: those that cannot reach a
    // state from which the target is unreachable
    let reaches = backward_closure(&p, &[target], None);
    let traps: Vec<usize> = (0..size).filter(|&i| !reaches[i]).collect();
    let doomed = backward_closure(&p, &traps, Some(target));
    let good: Vec<bool> = (0..size).map(|i| reaches[i] && !doomed[i]).collect();
    if let Some(level) = (target..size).find(|&i| !good[i]) {
        return Err(Error::SingularSystem { target, level });
    }

    let states: Vec<usize> = (0..size).filter(|&i| good[i] && i != target).collect();
    let k = states.len();
    let mut q: Vec<Vec<f64>> = states
        .iter()
        .map(|&i| states.iter().map(|&j| p[i][j]).collect())
        .collect();
    let mut exit: Vec<f64> = states.iter().map(|&i| p[i][target]).collect();
    let mut rhs = vec![1.0; k];
    let mut pivot = vec![0.0; k];

    for s in 0..k {
        let out: f64 = (s + 1..k).map(|j| q[s][j]).sum::<f64>() + exit[s];
        pivot[s] = out;
        if !(out > 0.0) {
            return Err(Error::SingularSystem {
                target,
                level: states[s],
            });
        }
        for i in s + 1..k {
            let w = q[i][s];
            if w == 0.0 {
                continue;
            }
            let f = w / out;
            for j in s + 1..k {
                if j != i {
                    q[i][j] += f * q[s][j];
                }
            }
            exit[i] += f * exit[s];
            rhs[i] += f * rhs[s];
            q[i][s] = 0.0;
        }
    }

    let mut h = vec![0.0; k];
    for s in (0..k).rev() {
        let later: f64 = (s + 1..k).map(|j| q[s][j] * h[j]).sum();
        h[s] = (rhs[s] + later) / pivot[s];
    }

    let mut times = vec![None; size];
    times[target] = Some(0.0);
    for (idx, &state) in states.iter().enumerate() {
        times[state] = Some(h[idx]);
    }
    Ok(FirstPassageTimes { target, times })
}

/// States with a path into `seeds`, optionally never passing through `stop`.
fn backward_closure(p: &[Vec<f64>], seeds: &[usize], stop: Option<usize>) -> Vec<bool> {
    let size = p.len();
    let mut mark = vec![false; size];
    let mut stack = seeds.to_vec();
    for &s in seeds {
        mark[s] = true;
    }
    while let Some(j) = stack.pop() {
        if Some(j) == stop {
            continue;
        }
        for i in 0..size {
            if !mark[i] && Some(i) != stop && p[i][j] > 0.0 {
                mark[i] = true;
                stack.push(i);
            }
        }
    }
    mark
}

/// Probability that the chain started at `start` reaches `low` before `high`.
///
/// Gambler's-ruin formula with `w_i = Π_{k=i}^{high-1} p⁺_k/p⁻_k`:
/// `P = Σ_{i=start+1}^{high} w_i / Σ_{i=low+1}^{high} w_i`, evaluated with
/// cumulative log-ratios.
pub fn hitting_probability_before(
    chain: &LevelChain,
    start: usize,
    low: usize,
    high: usize,
) -> Result<f64> {
    let n = chain.n();
    if !(low < start && start < high && high <= n) {
        return Err(Error::LevelOrder {
            low,
            start,
            high,
            n,
        });
    }
    if let Some(level) = (low + 1..high).find(|&k| !(chain.p_minus[k] > 0.0)) {
        return Err(Error::Unsupported(format!(
            "no downward transition out of level {level}; the ruin formula is undefined"
        )));
    }
    // ln_w[i - low - 1] = ln w_i for i in low+1..=high; w_high = 1
    let len = high - low;
    let mut ln_w = vec![0.0; len];
    for i in (low + 1..high).rev() {
        ln_w[i - low - 1] = ln_w[i - low] + chain.ln_ratio(i);
    }
    let num = ln_sum_exp(ln_w[start - low..].iter().copied());
    let den = ln_sum_exp(ln_w.iter().copied());
    Ok((num - den).exp().clamp(0.0, 1.0))
}

/// Distance `n/(α+1)` at which the OneMax drift changes sign.
pub fn equilibrium_point(n: usize, alpha: Alpha) -> f64 {
    if alpha.is_infinite() {
        0.0
    } else {
        n as f64 / (alpha.value() + 1.0)
    }
}
