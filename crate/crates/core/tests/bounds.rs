use cliffwalk::bounds::{
    cliff_ea_bound, cliff_ma_bounds, cliff_thresholds, e1_bounds, e1_expansion, e1_expansion_magnitude,
    onemax_ma_bound, optimal_parameters, posdrift_bounds, BoundReport,
};
use cliffwalk::Magnitude;
use proptest::prelude::*;

fn ordered(r: &BoundReport) -> bool {
    match (r.lower, r.upper) {
        (Some(lo), Some(hi)) => lo.ln() <= hi.ln(),
        _ => true,
    }
}

#[test]
fn cliff_ma_case_boundary_stays_finite() {
    let (n, m, d) = (100, 10, 3.0);
    // k* = n/(α+1) = m + 1
    let boundary = n as f64 / (m as f64 + 1.0) - 1.0;
    for alpha in [boundary * (1.0 - 1e-6), boundary * (1.0 + 1e-6)] {
        let r = cliff_ma_bounds(n, m, d, alpha).unwrap();
        for v in [r.lower.unwrap(), r.upper.unwrap(), r.main_term] {
            assert!(v.ln().is_finite() && v.ln() > 0.0, "alpha={alpha}: {r:?}");
        }
    }
    let below = cliff_ma_bounds(n, m, d, boundary * (1.0 - 1e-6)).unwrap();
    let above = cliff_ma_bounds(n, m, d, boundary * (1.0 + 1e-6)).unwrap();
    assert_eq!(below.derived["part"], 2.0);
    assert_eq!(above.derived["part"], 1.0);
    assert!(cliff_thresholds(n, boundary).0 - (m as f64 + 1.0) < 1e-9);
}

#[test]
fn cliff_ea_grows_with_rate_past_its_minimizer() {
    for (n, m, d) in [(100, 10, 3.0f64), (150, 20, 1.5), (60, 8, 5.5)] {
        let k = d.floor() + 2.0;
        let start = k / n as f64;
        let mut last = cliff_ea_bound(n, m, d, start * 1.0001).unwrap().main_term.ln();
        let mut p = start * 1.01;
        while p < 0.49 {
            let v = cliff_ea_bound(n, m, d, p).unwrap().main_term.ln();
            assert!(v > last, "n={n} p={p}");
            last = v;
            p *= 1.05;
        }
    }
}

#[test]
fn optimal_rate_is_the_jump_size_over_n() {
    let opt = optimal_parameters(100, 10, 3.0).unwrap();
    assert!((opt.p_star - 0.05).abs() < 1e-15);
    let at = |p: f64| cliff_ea_bound(100, 10, 3.0, p).unwrap().main_term.ln();
    assert!(at(opt.p_star) < at(opt.p_star * 1.2));
}

#[test]
fn reports_serialize() {
    let r = cliff_ea_bound(100, 10, 3.0, 0.01).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["name"], "cliff_ea");
    assert!(v["derived"]["k"].is_number());
}

proptest! {
    #[test]
    fn lower_never_exceeds_upper(n in 10usize..2000, a in 1.01f64..5000.0) {
        for r in [onemax_ma_bound(n, a), posdrift_bounds(n, a), e1_bounds(n, a.max(1.0 + 1e-9))] {
            prop_assert!(ordered(&r.unwrap()));
        }
    }

    #[test]
    fn cliff_reports_are_ordered(n in 20usize..400, m in 4usize..18, frac in 0.0f64..1.0, a in 1.5f64..400.0) {
        prop_assume!(m < n);
        let d = 1.0 + (m as f64 - 2.0 - 1e-9) * frac;
        prop_assume!(d < m as f64 - 1.0);
        prop_assert!(ordered(&cliff_ma_bounds(n, m, d, a).unwrap()));
    }

    #[test]
    fn log_and_direct_evaluation_agree(n in 5usize..300, a in 1.0f64..200.0, ell in 1usize..40, e_next in 1.0f64..1e6) {
        prop_assume!(ell <= n);
        // plain left-to-right evaluation of the same series
        let ratio = n as f64 / a;
        let (mut term, mut sum) = (1.0, 0.0);
        for i in 0..ell {
            // term = ratio^i / i!
            sum += term / (i + 1) as f64;
            term *= ratio / (i + 1) as f64;
        }
        let direct = n as f64 * sum + term * e_next;
        prop_assume!(direct.is_finite());
        let logged = e1_expansion_magnitude(n, a, ell, Magnitude::from_value(e_next)).unwrap();
        prop_assert!(((logged.value() - direct) / direct).abs() <= 1e-9);
        prop_assert_eq!(e1_expansion(n, a, ell, e_next).unwrap(), logged.value());
    }

    #[test]
    fn cliff_ea_terms_match_their_logs(n in 20usize..200, m in 4usize..12, p in 0.001f64..0.3) {
        prop_assume!(m < n);
        let r = cliff_ea_bound(n, m, 1.5, p).unwrap();
        for key in ["climb_term", "jump_term"] {
            let direct = r.derived[key];
            let log10 = r.derived[&format!("{key}_log10")];
            if direct.is_finite() {
                prop_assert!((direct.log10() - log10).abs() <= 1e-9 * log10.abs().max(1.0));
            }
        }
    }
}
