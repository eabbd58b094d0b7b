//! Single-trajectory search heuristics and the driver that runs them until
//! the optimum is sampled.

mod mutation;
mod stagnation;
mod steps;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::benchmarks::{Problem, SearchPoint};
use crate::error::{invalid, Error, Result};
use crate::rng::{trial_rng, TrialRng};

pub use mutation::{
    sample_heavy_tailed_rate, FlipCountTable, GlobalMutation, Offspring, PowerLawStrength,
    RateLadder,
};
pub use stagnation::{ln_threshold, sd_oea_step, threshold, SdState, StagnationDetection};
pub use steps::{
    ma_global_step, metropolis_accepts, metropolis_step, oea_step, rls_step, Step,
};

/// Default iteration budget.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// Default heavy-tail exponent.
pub const DEFAULT_BETA: f64 = 1.5;

/// Metropolis selection parameter `α = e^{1/T}`.
///
/// `α = ∞` (temperature zero) rejects every strictly worse offspring, which
/// turns the Metropolis algorithm into RLS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha {
    value: f64,
    ln: f64,
    inv: f64,
}

impl Alpha {
    pub const INFINITE: Alpha = Alpha {
        value: f64::INFINITY,
        ln: f64::INFINITY,
        inv: 0.0,
    };

    pub fn new(value: f64) -> Result<Self> {
        if value == f64::INFINITY {
            return Ok(Self::INFINITE);
        }
        if !(value > 1.0) {
            return Err(invalid("alpha", format!("must be > 1, got {value}")));
        }
        Ok(Alpha {
            value,
            ln: value.ln(),
            inv: value.recip(),
        })
    }

    /// `α = e^{1/T}`; `T = 0` gives `α = ∞`.
    pub fn from_temperature(t: f64) -> Result<Self> {
        if t == 0.0 {
            return Ok(Self::INFINITE);
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(invalid("temperature", format!("must be >= 0, got {t}")));
        }
        Alpha::new(t.recip().exp())
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.value
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.ln
    }

    pub fn is_infinite(self) -> bool {
        self.value.is_infinite()
    }

    /// `min(1, α^{delta})`.
    #[inline]
    pub fn acceptance_probability(self, delta: f64) -> f64 {
        if delta >= 0.0 {
            1.0
        } else if delta == -1.0 {
            self.inv
        } else if self.is_infinite() {
            0.0
        } else {
            (delta * self.ln).exp()
        }
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.value)
        }
    }
}

impl FromStr for Alpha {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "+inf" => Ok(Alpha::INFINITE),
            other => {
                let v: f64 = other
                    .parse()
                    .map_err(|_| invalid("alpha", format!("not a number: `{s}`")))?;
                Alpha::new(v)
            }
        }
    }
}

// JSON has no infinity, so `α = ∞` travels as the string "inf".
impl Serialize for Alpha {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.value)
        }
    }
}

impl<'de> Deserialize<'de> for Alpha {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        let parsed = match Repr::deserialize(d)? {
            Repr::Num(v) => Alpha::new(v),
            Repr::Text(t) => t.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// A mutation rate, either absolute or as a multiple of `1/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rate {
    Absolute(f64),
    /// `c/n`.
    PerN(f64),
}

impl Rate {
    pub const ONE_OVER_N: Rate = Rate::PerN(1.0);

    pub fn resolve(self, n: usize) -> f64 {
        match self {
            Rate::Absolute(p) => p,
            Rate::PerN(c) => c / n as f64,
        }
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rate::Absolute(p) => write!(f, "{p}"),
            Rate::PerN(c) => write!(f, "{c}/n"),
        }
    }
}

impl FromStr for Rate {
    type Err = Error;

    /// Accepts `0.01`, `4/n` or `/n` forms such as `1/n`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || invalid("p", format!("expected a number or `c/n`, got `{s}`"));
        if let Some(c) = s.strip_suffix("/n") {
            let c: f64 = c.trim().parse().map_err(|_| bad())?;
            return Ok(Rate::PerN(c));
        }
        s.parse().map(Rate::Absolute).map_err(|_| bad())
    }
}

/// The heuristic to run together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Algorithm {
    /// Metropolis algorithm with one-bit flips.
    Ma { alpha: Alpha },
    /// (1+1) EA with standard bit mutation.
    Oea { p: Rate },
    Rls,
    /// (1+1) EA with heavy-tailed mutation.
    Fast { beta: f64 },
    /// (1+1) EA with stagnation detection; `None` means `R = n³`.
    Sd { r: Option<u64> },
    /// Metropolis acceptance with standard bit mutation.
    MaGstd { alpha: Alpha, p: Rate },
    /// Metropolis acceptance with heavy-tailed mutation.
    MaGheavy { alpha: Alpha, beta: f64 },
}

impl Algorithm {
    pub fn metropolis(alpha: f64) -> Result<Self> {
        Ok(Algorithm::Ma {
            alpha: Alpha::new(alpha)?,
        })
    }

    /// Short identifier used in exports.
    pub fn id(&self) -> &'static str {
        match self {
            Algorithm::Ma { .. } => "ma",
            Algorithm::Oea { .. } => "oea",
            Algorithm::Rls => "rls",
            Algorithm::Fast { .. } => "fast",
            Algorithm::Sd { .. } => "sd",
            Algorithm::MaGstd { .. } => "ma-gstd",
            Algorithm::MaGheavy { .. } => "ma-gheavy",
        }
    }

    /// Selection parameter of the Metropolis family. RLS counts as `α = ∞`.
    pub fn alpha(&self) -> Option<Alpha> {
        match *self {
            Algorithm::Ma { alpha }
            | Algorithm::MaGstd { alpha, .. }
            | Algorithm::MaGheavy { alpha, .. } => Some(alpha),
            Algorithm::Rls => Some(Alpha::INFINITE),
            _ => None,
        }
    }

    /// The parameter that distinguishes configurations of this kind, resolved
    /// for size `n`. RLS has none.
    pub fn primary_param(&self, n: usize) -> Option<(&'static str, f64)> {
        match *self {
            Algorithm::Ma { alpha }
            | Algorithm::MaGstd { alpha, .. }
            | Algorithm::MaGheavy { alpha, .. } => Some(("alpha", alpha.value())),
            Algorithm::Oea { p } => Some(("p", p.resolve(n))),
            Algorithm::Rls => None,
            Algorithm::Fast { beta } => Some(("beta", beta)),
            Algorithm::Sd { r } => Some(("R", sd_param(r, n))),
        }
    }

    /// Whether `name` is a parameter of this algorithm.
    pub fn has_param(&self, name: &str) -> bool {
        matches!(
            (self, name),
            (Algorithm::Ma { .. }, "alpha")
                | (Algorithm::MaGstd { .. }, "alpha" | "p")
                | (Algorithm::MaGheavy { .. }, "alpha" | "beta")
                | (Algorithm::Oea { .. }, "p")
                | (Algorithm::Fast { .. }, "beta")
                | (Algorithm::Sd { .. }, "R")
        )
    }

    /// Copy with the parameter `name` replaced.
    pub fn with_param(&self, name: &str, value: f64) -> Result<Self> {
        let mut out = *self;
        match (&mut out, name) {
            (
                Algorithm::Ma { alpha }
                | Algorithm::MaGstd { alpha, .. }
                | Algorithm::MaGheavy { alpha, .. },
                "alpha",
            ) => *alpha = Alpha::new(value)?,
            (Algorithm::Oea { p } | Algorithm::MaGstd { p, .. }, "p") => {
                *p = Rate::Absolute(value)
            }
            (Algorithm::Fast { beta } | Algorithm::MaGheavy { beta, .. }, "beta") => *beta = value,
            (Algorithm::Sd { r }, "R") => {
                if !(value >= 1.0 && value.fract() == 0.0 && value < 2f64.powi(63)) {
                    return Err(invalid("R", format!("must be a positive integer, got {value}")));
                }
                *r = Some(value as u64)
            }
            _ => {
                return Err(Error::Unsupported(format!(
                    "algorithm `{}` has no parameter `{name}`",
                    self.id()
                )))
            }
        }
        Ok(out)
    }

    /// Check the parameters against an instance size.
    pub fn validate(&self, n: usize) -> Result<()> {
        let rate = |p: Rate| {
            let v = p.resolve(n);
            if v > 0.0 && v < 0.5 {
                Ok(())
            } else {
                Err(invalid("p", format!("rate {p} resolves to {v} for n={n}, need 0 < p < 1/2")))
            }
        };
        let beta = |b: f64| {
            if b > 1.0 && b.is_finite() {
                Ok(())
            } else {
                Err(invalid("beta", format!("must be a finite number > 1, got {b}")))
            }
        };
        let at_least_two = |what: &str| {
            if n >= 2 {
                Ok(())
            } else {
                Err(invalid("n", format!("{what} needs n >= 2, got n={n}")))
            }
        };
        match *self {
            Algorithm::Ma { .. } | Algorithm::Rls => Ok(()),
            Algorithm::Oea { p } | Algorithm::MaGstd { p, .. } => rate(p),
            Algorithm::Fast { beta: b } | Algorithm::MaGheavy { beta: b, .. } => {
                at_least_two(self.id())?;
                beta(b)
            }
            Algorithm::Sd { r } => {
                at_least_two("sd")?;
                if r == Some(0) {
                    return Err(invalid("R", "must be a positive integer"));
                }
                Ok(())
            }
        }
    }
}

fn sd_param(r: Option<u64>, n: usize) -> f64 {
    r.map_or_else(|| (n as f64).powi(3), |r| r as f64)
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Ma { alpha } => write!(f, "ma:alpha={alpha}"),
            Algorithm::Oea { p } => write!(f, "oea:p={p}"),
            Algorithm::Rls => f.write_str("rls"),
            Algorithm::Fast { beta } => write!(f, "fast:beta={beta}"),
            Algorithm::Sd { r: None } => f.write_str("sd"),
            Algorithm::Sd { r: Some(r) } => write!(f, "sd:R={r}"),
            Algorithm::MaGstd { alpha, p } => write!(f, "ma-gstd:alpha={alpha},p={p}"),
            Algorithm::MaGheavy { alpha, beta } => write!(f, "ma-gheavy:alpha={alpha},beta={beta}"),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    /// Parses `kind[:key=value,...]`, e.g. `ma:alpha=20`, `oea:p=4/n`,
    /// `fast`, `sd:R=1000000`, `ma-gheavy:alpha=20,beta=1.5`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut alpha = None;
        let mut p = None;
        let mut beta = None;
        let mut r = None;
        for pair in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| invalid("algorithm", format!("expected key=value, got `{pair}`")))?;
            let number = |name: &'static str| {
                value
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| invalid(name, format!("not a number: `{value}`")))
            };
            match key.trim() {
                "alpha" => alpha = Some(value.parse::<Alpha>()?),
                "p" => p = Some(value.parse::<Rate>()?),
                "beta" => beta = Some(number("beta")?),
                "R" | "r" => {
                    let v = number("R")?;
                    if !(v >= 1.0 && v.fract() == 0.0) {
                        return Err(invalid("R", format!("must be a positive integer, got {v}")));
                    }
                    r = Some(v as u64)
                }
                other => {
                    return Err(invalid("algorithm", format!("unknown parameter `{other}` in `{s}`")))
                }
            }
        }
        let need_alpha = || {
            alpha.ok_or_else(|| invalid("alpha", format!("`{kind}` requires alpha=<value>")))
        };
        let algo = match kind.trim().to_ascii_lowercase().as_str() {
            "ma" | "metropolis" => Algorithm::Ma { alpha: need_alpha()? },
            "oea" | "ea" => Algorithm::Oea {
                p: p.unwrap_or(Rate::ONE_OVER_N),
            },
            "rls" => Algorithm::Rls,
            "fast" | "fast-oea" => Algorithm::Fast {
                beta: beta.unwrap_or(DEFAULT_BETA),
            },
            "sd" | "sd-oea" => Algorithm::Sd { r },
            "ma-gstd" => Algorithm::MaGstd {
                alpha: need_alpha()?,
                p: p.unwrap_or(Rate::ONE_OVER_N),
            },
            "ma-gheavy" => Algorithm::MaGheavy {
                alpha: need_alpha()?,
                beta: beta.unwrap_or(DEFAULT_BETA),
            },
            other => {
                return Err(invalid(
                    "algorithm",
                    format!(
                        "unknown kind `{other}` (expected ma, oea, rls, fast, sd, ma-gstd or ma-gheavy)"
                    ),
                ))
            }
        };
        // reject parameters the kind does not use
        let unused = [
            ("alpha", alpha.is_some()),
            ("p", p.is_some()),
            ("beta", beta.is_some()),
            ("R", r.is_some()),
        ];
        if let Some((name, _)) = unused.iter().find(|(name, set)| *set && !algo.has_param(name)) {
            return Err(invalid(
                "algorithm",
                format!("`{}` does not take parameter `{name}`", algo.id()),
            ));
        }
        Ok(algo)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeuristicConfig {
    pub algorithm: Algorithm,
    pub budget: u64,
}

impl HeuristicConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        HeuristicConfig {
            algorithm,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn validate(&self, problem: &Problem) -> Result<()> {
        if self.budget == 0 {
            return Err(invalid("budget", "must be positive"));
        }
        self.algorithm.validate(problem.n())
    }
}

/// Outcome of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    /// Fitness evaluations until the optimum was first sampled, or the budget
    /// if it never was.
    pub iterations: u64,
    pub hit_optimum: bool,
    pub censored_at: Option<u64>,
    /// Distance of the final current point from the optimum.
    pub final_distance: usize,
}

/// Run one heuristic from a uniformly random start until it samples the
/// optimum or exhausts the budget.
pub fn run(config: &HeuristicConfig, problem: &Problem, seed: u64) -> Result<RunRecord> {
    config.validate(problem)?;
    let n = problem.n();
    let budget = config.budget;
    let mut rng = trial_rng(seed);
    let x = SearchPoint::random(n, &mut rng);

    let mut record = match config.algorithm {
        Algorithm::Ma { alpha } => drive(problem, x, budget, &mut rng, |x, fx, rng| {
            metropolis_step(x, fx, problem, alpha, rng)
        }),
        Algorithm::Rls => drive(problem, x, budget, &mut rng, |x, fx, rng| {
            rls_step(x, fx, problem, rng)
        }),
        Algorithm::Oea { p } => {
            let table = FlipCountTable::new(n, p.resolve(n));
            let mut scratch = Offspring::default();
            drive(problem, x, budget, &mut rng, |x, fx, rng| {
                oea_step(x, fx, problem, &table, &mut scratch, rng)
            })
        }
        Algorithm::Fast { beta } => {
            let strength = PowerLawStrength::new(n, beta);
            let mut ladder = RateLadder::new(n);
            let mut scratch = Offspring::default();
            drive(problem, x, budget, &mut rng, |x, fx, rng| {
                let r = strength.sample(rng);
                oea_step(x, fx, problem, ladder.table(r), &mut scratch, rng)
            })
        }
        Algorithm::MaGstd { alpha, p } => {
            let mut op = GlobalMutation::standard(n, p.resolve(n));
            let mut scratch = Offspring::default();
            drive(problem, x, budget, &mut rng, |x, fx, rng| {
                ma_global_step(x, fx, problem, alpha, &mut op, &mut scratch, rng)
            })
        }
        Algorithm::MaGheavy { alpha, beta } => {
            let mut op = GlobalMutation::heavy_tailed(n, beta);
            let mut scratch = Offspring::default();
            drive(problem, x, budget, &mut rng, |x, fx, rng| {
                ma_global_step(x, fx, problem, alpha, &mut op, &mut scratch, rng)
            })
        }
        Algorithm::Sd { r } => {
            let mut sd = StagnationDetection::new(n, sd_param(r, n))?;
            let mut state = SdState::new(x, problem)?;
            let mut outcome = None;
            if state.x.count_zeros() == 0 {
                outcome = Some(0);
            } else {
                for t in 1..=budget {
                    if sd_oea_step(&mut state, &mut sd, problem, &mut rng).sampled_optimum {
                        outcome = Some(t);
                        break;
                    }
                }
            }
            finish(outcome, budget, &state.x)
        }
    };
    record.seed = seed;
    Ok(record)
}

#[inline(always)]
fn drive<F>(
    problem: &Problem,
    mut x: SearchPoint,
    budget: u64,
    rng: &mut TrialRng,
    mut step: F,
) -> RunRecord
where
    F: FnMut(&mut SearchPoint, f64, &mut TrialRng) -> Step,
{
    if x.count_zeros() == 0 {
        return finish(Some(0), budget, &x);
    }
    let mut fx = problem.fitness_of_ones(x.count_ones());
    for t in 1..=budget {
        let s = step(&mut x, fx, rng);
        if s.sampled_optimum {
            return finish(Some(t), budget, &x);
        }
        fx = s.fitness;
    }
    finish(None, budget, &x)
}

fn finish(hit_at: Option<u64>, budget: u64, x: &SearchPoint) -> RunRecord {
    match hit_at {
        Some(t) => RunRecord {
            seed: 0,
            iterations: t,
            hit_optimum: true,
            censored_at: None,
            final_distance: 0,
        },
        None => RunRecord {
            seed: 0,
            iterations: budget,
            hit_optimum: false,
            censored_at: Some(budget),
            final_distance: x.count_zeros(),
        },
    }
}
