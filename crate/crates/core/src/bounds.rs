//! Closed-form runtime bounds and optimal parameter choices.
//!
//! All products of large factors are formed in log space through
//! [`Magnitude`]. Factors of the form `1 ± o(1)` or `1 + O(α/n)` are dropped;
//! reports that dropped any set `asymptotic_slack` so callers can apply an
//! explicit slack instead of treating the value as tight.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::numeric::{ln_binomial, ln_factorial, Magnitude};

/// Finite-n status of a hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisStatus {
    Holds,
    Violated,
    /// An asymptotic condition such as `α = ω(√n)`; not decidable at fixed n.
    Asymptotic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypothesis {
    pub statement: String,
    pub status: HypothesisStatus,
}

impl Hypothesis {
    fn check(statement: &str, holds: bool) -> Self {
        Hypothesis {
            statement: statement.to_owned(),
            status: if holds {
                HypothesisStatus::Holds
            } else {
                HypothesisStatus::Violated
            },
        }
    }

    fn asymptotic(statement: &str) -> Self {
        Hypothesis {
            statement: statement.to_owned(),
            status: HypothesisStatus::Asymptotic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub lower: Option<Magnitude>,
    pub upper: Option<Magnitude>,
    pub main_term: Magnitude,
    /// Intermediate quantities, e.g. `k_star` or `beta_hat`.
    pub derived: BTreeMap<String, f64>,
    pub validity: Vec<Hypothesis>,
    pub asymptotic_slack: bool,
    pub notes: Vec<String>,
}

impl BoundReport {
    fn new(name: &str, main_term: Magnitude) -> Self {
        BoundReport {
            name: name.to_owned(),
            lower: None,
            upper: None,
            main_term,
            derived: BTreeMap::new(),
            validity: Vec::new(),
            asymptotic_slack: false,
            notes: Vec::new(),
        }
    }

    fn derive(&mut self, key: &str, value: f64) {
        self.derived.insert(key.to_owned(), value);
    }

    fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Drop a lower bound that the dropped lower-order terms pushed above the
    /// upper bound.
    fn enforce_order(mut self) -> Self {
        if let (Some(lo), Some(hi)) = (self.lower, self.upper) {
            if lo.ln() > hi.ln() {
                self.lower = None;
                self.note("lower bound exceeds the upper bound at this n once lower-order terms are dropped; omitted");
            }
        }
        self
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(invalid("n", format!("need n >= 2, got {n}")));
    }
    Ok(())
}

/// `alpha > 1`; `+inf` allowed when `allow_inf`.
fn check_alpha(alpha: f64, allow_inf: bool) -> Result<()> {
    if alpha.is_nan() || alpha <= 1.0 || (!allow_inf && alpha.is_infinite()) {
        let range = if allow_inf { "> 1 (or inf)" } else { "finite and > 1" };
        return Err(invalid("alpha", format!("must be {range}, got {alpha}")));
    }
    Ok(())
}

/// `α e^{n/α}` in log space.
fn ln_alpha_exp(n: f64, alpha: f64) -> f64 {
    alpha.ln() + n / alpha
}

/// Expected runtime of the Metropolis algorithm on OneMax:
/// `n ln n + [α ≤ n] α e^{n/α}`.
pub fn onemax_ma_bound(n: usize, alpha: f64) -> Result<BoundReport> {
    check_n(n)?;
    check_alpha(alpha, true)?;
    let nf = n as f64;
    let coupon = Magnitude::from_value(nf * nf.ln());
    let main = if alpha <= nf {
        coupon.plus(Magnitude::from_ln(ln_alpha_exp(nf, alpha)))
    } else {
        coupon
    };
    let mut r = BoundReport::new("onemax_ma", main);
    r.asymptotic_slack = true;
    r.derive("n_ln_n", nf * nf.ln());
    if alpha <= nf {
        r.derive("alpha_exp_n_over_alpha", ln_alpha_exp(nf, alpha).exp());
    }
    r.validity.push(Hypothesis::asymptotic("alpha = omega(sqrt n)"));
    r.note("both terms carry a (1 ± o(1)) factor");
    Ok(r)
}

/// Time to reach distance `k = ⌈n/(α+1)⌉`: at most `α/(α+1) n (ln n + 1)`,
/// and at least `n ln(n/k)` when `k = o(n)`.
pub fn posdrift_bounds(n: usize, alpha: f64) -> Result<BoundReport> {
    check_n(n)?;
    check_alpha(alpha, true)?;
    let nf = n as f64;
    let frac = if alpha.is_infinite() { 1.0 } else { alpha / (alpha + 1.0) };
    let upper = Magnitude::from_value(frac * nf * (nf.ln() + 1.0));
    let k_star = if alpha.is_infinite() { 0.0 } else { nf / (alpha + 1.0) };
    let k = k_star.ceil();

    let mut r = BoundReport::new("posdrift", upper);
    r.upper = Some(upper);
    r.derive("k_star", k_star);
    r.derive("k", k);
    if k >= 1.0 {
        r.lower = Some(Magnitude::from_value(nf * (nf / k).ln()));
        r.asymptotic_slack = true;
        r.validity.push(Hypothesis::asymptotic("k = o(n) (lower bound only)"));
    } else {
        r.note("k = 0: the target distance is the optimum itself; no lower bound");
    }
    Ok(r.enforce_order())
}

/// `E_1^+ = n Σ_{i<ℓ} (n/α)^i/(i+1)! + (n/α)^ℓ/ℓ! · E_{ℓ+1}`, which brackets
/// the expected time to leave distance 1 given the exact `E_{ℓ+1}`.
pub fn e1_expansion(n: usize, alpha: f64, ell: usize, e_next: f64) -> Result<f64> {
    Ok(e1_expansion_magnitude(n, alpha, ell, Magnitude::from_value(e_next))?.value())
}

pub fn e1_expansion_magnitude(
    n: usize,
    alpha: f64,
    ell: usize,
    e_next: Magnitude,
) -> Result<Magnitude> {
    if n == 0 {
        return Err(invalid("n", "must be positive"));
    }
    if ell == 0 {
        return Err(invalid("ell", "must be at least 1"));
    }
    if !(alpha >= 1.0) {
        return Err(invalid("alpha", format!("must be >= 1, got {alpha}")));
    }
    let nf = n as f64;
    if alpha.is_infinite() {
        return Ok(Magnitude::from_value(nf));
    }
    let ln_ratio = (nf / alpha).ln();
    let mut sum = Magnitude::ZERO;
    for i in 0..ell {
        sum = sum.plus(Magnitude::from_ln(i as f64 * ln_ratio - ln_factorial(i as u64 + 1)));
    }
    let tail = Magnitude::from_ln(ell as f64 * ln_ratio - ln_factorial(ell as u64)).times(e_next);
    Ok(sum.scale(nf).plus(tail))
}

/// `E_1`, the expected time to leave distance 1 on OneMax:
/// `(1 - 2e^{-2n/(3α)}) α e^{n/α} ≤ E_1 ≤ α e^{n/α}`, and `E_1 ≤ 2n` once
/// `α ≥ 2n`.
pub fn e1_bounds(n: usize, alpha: f64) -> Result<BoundReport> {
    check_n(n)?;
    check_alpha(alpha, true)?;
    let nf = n as f64;
    let exp_form = if alpha.is_infinite() {
        Magnitude::from_ln(f64::INFINITY)
    } else {
        Magnitude::from_ln(ln_alpha_exp(nf, alpha))
    };
    let large_alpha = alpha >= 2.0 * nf;
    let upper = if large_alpha {
        let two_n = Magnitude::from_value(2.0 * nf);
        if two_n.ln() < exp_form.ln() {
            two_n
        } else {
            exp_form
        }
    } else {
        exp_form
    };
    let mut r = BoundReport::new("e1", upper);
    r.upper = Some(upper);
    r.asymptotic_slack = true;
    if let Some(v) = exp_form.finite_value() {
        r.derive("alpha_exp_n_over_alpha", v);
    }
    if large_alpha {
        r.derive("upper_2n", 2.0 * nf);
    }
    let factor = if alpha.is_infinite() {
        -1.0
    } else {
        1.0 - 2.0 * (-2.0 * nf / (3.0 * alpha)).exp()
    };
    r.derive("lower_factor", factor);
    if factor > 0.0 {
        r.lower = Some(exp_form.scale(factor));
    } else {
        r.note("lower-bound factor 1 - 2exp(-2n/(3 alpha)) is not positive here; no lower bound");
    }
    r.validity.push(Hypothesis::asymptotic("alpha = omega(sqrt n)"));
    r.validity.push(Hypothesis::check("alpha >= 2n (for E_1 <= 2n)", large_alpha));
    Ok(r.enforce_order())
}

/// `(k*, β̂)` with `k* = n/(α+1)` and `β̂ = 2.5/(1 + 2.5/α) · n/α`.
pub fn cliff_thresholds(n: usize, alpha: f64) -> (f64, f64) {
    let nf = n as f64;
    (nf / (alpha + 1.0), 2.5 / (1.0 + 2.5 / alpha) * (nf / alpha))
}

/// Runtime of the Metropolis algorithm on Cliff.
///
/// If `k* < m + 1` the bound is `(f + 1) E_lo ≤ E[T] ≤ (f + c) E_hi` where
/// `f = (n/α)^{m-2}/(m-2)!`, `c = 1` if `m - 2 ≤ β̂` and `5/3` otherwise, and
/// `E_lo`, `E_hi` sandwich the time to climb from distance `m - 1`. Otherwise
/// `α^{d+2} e^{n/α} / (√(2π) e^{α/(12n)} √(n/α)) ≤ E[T] ≤ α^{d+2} e^{n/α}`.
pub fn cliff_ma_bounds(n: usize, m: usize, d: f64, alpha: f64) -> Result<BoundReport> {
    crate::benchmarks::Problem::cliff(n, m, d)?;
    if d < 1.0 {
        return Err(invalid("d", format!("the bound needs d >= 1, got {d}")));
    }
    check_alpha(alpha, false)?;
    let (nf, mf) = (n as f64, m as f64);
    let (k_star, beta_hat) = cliff_thresholds(n, alpha);
    let ln_a = alpha.ln();

    let part1 = k_star < mf + 1.0;
    let mut r;
    if part1 {
        let ln_f = (mf - 2.0) * (nf / alpha).ln() - ln_factorial(m as u64 - 2);
        let f = Magnitude::from_ln(ln_f);
        let prefix = Magnitude::from_ln(2.0 * nf.ln() + (d - 1.0) * ln_a - (mf * (mf - 1.0)).ln());
        let e_lo = prefix.scale(alpha + nf / (mf + 1.0));
        // positive exactly when k* < m + 1
        let denom = (mf + 1.0) * (alpha + 1.0) / alpha - nf / alpha;
        let e_hi = prefix.scale(alpha + nf / denom);
        let c = if mf - 2.0 <= beta_hat { 1.0 } else { 5.0 / 3.0 };
        let lower = f.plus(Magnitude::from_value(1.0)).times(e_lo);
        let upper = f.plus(Magnitude::from_value(c)).times(e_hi);
        r = BoundReport::new("cliff_ma", upper);
        r.lower = Some(lower);
        r.upper = Some(upper);
        r.derive("part", 1.0);
        r.derive("leading_factor_log10", f.log10());
        r.derive("e_climb_lower_log10", e_lo.log10());
        r.derive("e_climb_upper_log10", e_hi.log10());
        r.derive("upper_constant", c);
        r.validity.push(Hypothesis::check("k* < m + 1", true));
        r.validity.push(Hypothesis::check("m - 2 <= beta_hat (upper constant 1, else 5/3)", c == 1.0));
    } else {
        let ln_upper = (d + 2.0) * ln_a + nf / alpha;
        let upper = Magnitude::from_ln(ln_upper);
        let ln_lower = ln_upper
            - 0.5 * (2.0 * std::f64::consts::PI).ln()
            - alpha / (12.0 * nf)
            - 0.5 * (nf / alpha).ln();
        r = BoundReport::new("cliff_ma", upper);
        r.lower = Some(Magnitude::from_ln(ln_lower));
        r.upper = Some(upper);
        r.derive("part", 2.0);
        r.validity.push(Hypothesis::check("m + 1 <= k*", true));
    }
    r.derive("k_star", k_star);
    r.derive("beta_hat", beta_hat);
    r.derive("alpha_over_sqrt_n", alpha / nf.sqrt());
    r.derive("m_over_sqrt_n", mf / nf.sqrt());
    r.asymptotic_slack = true;
    r.validity.push(Hypothesis::asymptotic("alpha = omega(sqrt n)"));
    r.validity.push(Hypothesis::asymptotic("m = o(sqrt n)"));
    r.validity.push(Hypothesis::check("d >= 1", true));
    r.note("(1 ± o(1)) and (1 + O(alpha/n)) factors dropped");
    Ok(r.enforce_order())
}

/// Upper bound on the (1+1) EA with rate `p` on Cliff:
/// `p^{-1}(1-p)^{-n+1}(1 + ln n) + C(m,k)^{-1} p^{-k} (1-p)^{-n+k}` with
/// `k = ⌊d⌋ + 2`.
pub fn cliff_ea_bound(n: usize, m: usize, d: f64, p: f64) -> Result<BoundReport> {
    crate::benchmarks::Problem::cliff(n, m, d)?;
    if d < 1.0 {
        return Err(invalid("d", format!("the bound needs 1 <= d < m - 1, got {d}")));
    }
    if !(p > 0.0 && p < 0.5) {
        return Err(invalid("p", format!("need 0 < p < 1/2, got {p}")));
    }
    let nf = n as f64;
    let k = d.floor() as u64 + 2;
    let kf = k as f64;
    let ln_q = (-p).ln_1p();
    let climb = Magnitude::from_ln(-p.ln() - (nf - 1.0) * ln_q + (1.0 + nf.ln()).ln());
    let ln_binom = ln_binomial(m as u64, k);
    let jump = Magnitude::from_ln(-ln_binom - kf * p.ln() - (nf - kf) * ln_q);
    let upper = climb.plus(jump);

    let lambda = p * nf;
    let ln_asym = lambda - kf * lambda.ln() - ln_binom + kf * nf.ln();

    let mut r = BoundReport::new("cliff_ea", upper);
    r.upper = Some(upper);
    r.derive("k", kf);
    r.derive("lambda", lambda);
    r.derive("climb_term_log10", climb.log10());
    r.derive("jump_term_log10", jump.log10());
    if let Some(v) = climb.finite_value() {
        r.derive("climb_term", v);
    }
    if let Some(v) = jump.finite_value() {
        r.derive("jump_term", v);
    }
    let asym = Magnitude::from_ln(ln_asym);
    r.derive("asymptotic_log10", asym.log10());
    if let Some(v) = asym.finite_value() {
        r.derive("asymptotic", v);
    }
    r.validity.push(Hypothesis::check("0 < p < 1/2", true));
    r.validity.push(Hypothesis::check("1 <= d < m - 1", true));
    r.validity.push(Hypothesis::check(
        "p = lambda/n with 0 < lambda <= floor(d) + 2 (asymptotic form)",
        lambda <= kf,
    ));
    r.validity.push(Hypothesis::asymptotic("m = O(sqrt n / log n) (asymptotic form)"));
    r.note("`asymptotic` is (e^lambda / lambda^k) C(m,k)^{-1} n^k with its (1 + o(1)) factor dropped");
    Ok(r)
}

/// Parameter choices minimizing the Cliff bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalParameters {
    /// `n((m-d-2)/(d (m-2)!))^{1/(m-2)}`; absent unless `m - d - 2 > 0`.
    pub alpha_star_case1_exact: Option<f64>,
    /// `e n/(m-2)`.
    pub alpha_star_case1_asym: f64,
    /// `n/(d + 5/2)`.
    pub alpha_star_case2: f64,
    /// `(⌊d⌋ + 2)/n`.
    pub p_star: f64,
    pub notes: Vec<String>,
}

pub fn optimal_parameters(n: usize, m: usize, d: f64) -> Result<OptimalParameters> {
    crate::benchmarks::Problem::cliff(n, m, d)?;
    let (nf, mf) = (n as f64, m as f64);
    let mut notes = Vec::new();
    // Cliff validation gives d < m - 1, hence m >= 3
    let alpha_star_case1_exact = if mf - d - 2.0 > 0.0 {
        let ln_inner = (mf - d - 2.0).ln() - d.ln() - ln_factorial(m as u64 - 2);
        Some(nf * (ln_inner / (mf - 2.0)).exp())
    } else {
        notes.push("m - d - 2 <= 0: the exact case-1 minimizer is undefined".to_owned());
        None
    };
    Ok(OptimalParameters {
        alpha_star_case1_exact,
        alpha_star_case1_asym: std::f64::consts::E * nf / (mf - 2.0),
        alpha_star_case2: nf / (d + 2.5),
        p_star: (d.floor() + 2.0) / nf,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn onemax_indicator() {
        let n = 100.0f64;
        let at_n = onemax_ma_bound(100, 100.0).unwrap();
        assert!(rel(at_n.main_term.value(), n * (n.ln() + std::f64::consts::E)) < 1e-12);
        let at_2n = onemax_ma_bound(100, 200.0).unwrap();
        assert!(rel(at_2n.main_term.value(), n * n.ln()) < 1e-12);
        let r = onemax_ma_bound(100, 20.0).unwrap();
        let direct = 100.0 * 100f64.ln() + 20.0 * 5f64.exp();
        assert!(rel(r.main_term.value(), direct) < 1e-12);
        assert!(rel(r.main_term.value(), 3428.780_200_650_341) < 1e-12);
    }

    #[test]
    fn posdrift_values() {
        let r = posdrift_bounds(100, 99.0).unwrap();
        assert_eq!(r.derived["k"], 1.0);
        assert!(rel(r.lower.unwrap().value(), 460.517_018_598_809_1) < 1e-12);
        assert!(rel(r.upper.unwrap().value(), 554.911_848_412_821_05) < 1e-12);
        let inf = posdrift_bounds(100, f64::INFINITY).unwrap();
        assert!(rel(inf.upper.unwrap().value(), 100.0 * (100f64.ln() + 1.0)) < 1e-12);
        assert!(inf.lower.is_none());
    }

    #[test]
    fn e1_expansion_edge_cases() {
        let n = 50;
        let e2 = 7.0;
        let one = e1_expansion(n, 10.0, 1, e2).unwrap();
        assert!(rel(one, 50.0 + 5.0 * e2) < 1e-13);
        assert!(rel(e1_expansion(n, f64::INFINITY, 3, e2).unwrap(), 50.0) < 1e-15);
        assert!(e1_expansion(n, 10.0, 0, e2).is_err());
    }

    #[test]
    fn e1_bound_values() {
        let r = e1_bounds(100, 50.0).unwrap();
        assert!(rel(r.upper.unwrap().value(), 369.452_804_946_532_5) < 1e-12);
        let r = e1_bounds(100, 200.0).unwrap();
        assert_eq!(r.derived["upper_2n"], 200.0);
        assert!(r.upper.unwrap().value() <= 200.0 + 1e-9);
    }

    #[test]
    fn cliff_ma_part_selection() {
        let r = cliff_ma_bounds(100, 8, 3.0, 20.0).unwrap();
        assert_eq!(r.derived["part"], 1.0);
        let r = cliff_ma_bounds(100, 30, 1.0, 2.2).unwrap();
        assert_eq!(r.derived["part"], 2.0);
        assert!((r.upper.unwrap().log10() - 20.767_926_310_796_246).abs() < 1e-9);
        assert!(cliff_ma_bounds(100, 8, 0.5, 20.0).is_err());
        assert!(cliff_ma_bounds(100, 8, 3.0, f64::INFINITY).is_err());
    }

    #[test]
    fn cliff_ma_boundary_is_finite_on_both_sides() {
        // k* = m + 1 at alpha = n/(m+1) - 1
        let (n, m) = (200, 9);
        let edge = n as f64 / (m as f64 + 1.0) - 1.0;
        for alpha in [edge * 0.999, edge * 1.001] {
            let r = cliff_ma_bounds(n, m, 1.5, alpha).unwrap();
            for b in [r.lower.unwrap(), r.upper.unwrap()] {
                assert!(b.ln().is_finite() && b.value() > 0.0);
            }
        }
        let below = cliff_ma_bounds(n, m, 1.5, edge * 0.999).unwrap();
        let above = cliff_ma_bounds(n, m, 1.5, edge * 1.001).unwrap();
        assert_eq!(below.derived["part"], 2.0);
        assert_eq!(above.derived["part"], 1.0);
    }

    #[test]
    fn cliff_ea_terms() {
        let r = cliff_ea_bound(100, 10, 3.0, 0.01).unwrap();
        assert!(rel(r.derived["climb_term"], 1516.018_629_617_758_4) < 1e-12);
        assert!(rel(r.derived["jump_term"], 103_099_360.732_955_98) < 1e-12);
        assert!(rel(r.upper.unwrap().value(), 103_100_876.751_585_6) < 1e-12);
        // direct evaluation of the jump term
        let direct = 1e10 / 252.0 * 0.99f64.powi(-95);
        assert!(rel(r.derived["jump_term"], direct) < 1e-9);
    }

    #[test]
    fn optimal_parameter_values() {
        let o = optimal_parameters(100, 22, 3.0).unwrap();
        assert!(rel(o.alpha_star_case1_asym, std::f64::consts::E * 100.0 / 20.0) < 1e-15);
        assert!(rel(o.alpha_star_case2, 100.0 / 5.5) < 1e-15);
        assert!(rel(o.p_star, 0.05) < 1e-15);
        assert!(o.alpha_star_case1_exact.is_some());
        let edge = optimal_parameters(100, 5, 3.5).unwrap();
        assert!(edge.alpha_star_case1_exact.is_none());
    }
}
