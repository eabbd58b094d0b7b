//! Log-space arithmetic shared by the oracle and the bound evaluators.

use serde::{Serialize, Serializer};

/// `ln(e^a + e^b)` without overflow. Either argument may be `-inf`.
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ e^x` over the iterator; `-inf` for an empty input.
pub fn ln_sum_exp<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let terms: Vec<f64> = terms.into_iter().collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    if max == f64::INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln k!`.
pub fn ln_factorial(k: u64) -> f64 {
    ln_gamma(k as f64 + 1.0)
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// `ln C(n, k) - n ln 2` for every `k in 0..=n`, accumulated from the ratio
/// `C(n, k+1) / C(n, k) = (n - k) / (k + 1)` so no term is ever formed in
/// linear scale.
pub fn ln_binomial_half_weights(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = -(n as f64) * std::f64::consts::LN_2;
    out.push(acc);
    for k in 0..n {
        acc += ((n - k) as f64 / (k + 1) as f64).ln();
        out.push(acc);
    }
    out
}

/// A positive quantity carried by its natural logarithm, so that values far
/// outside the `f64` range (e.g. `α^{d+2} e^{n/α}` for small `α`) stay usable.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Magnitude {
    ln: f64,
}

impl Magnitude {
    pub const ZERO: Magnitude = Magnitude {
        ln: f64::NEG_INFINITY,
    };

    pub fn from_ln(ln: f64) -> Self {
        Magnitude { ln }
    }

    /// Panics in debug builds if `value` is negative or NaN.
    pub fn from_value(value: f64) -> Self {
        debug_assert!(value >= 0.0, "magnitude must be non-negative: {value}");
        Magnitude { ln: value.ln() }
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    pub fn log10(self) -> f64 {
        self.ln / std::f64::consts::LN_10
    }

    /// Linear value; `+inf` when it does not fit in an `f64`.
    pub fn value(self) -> f64 {
        self.ln.exp()
    }

    /// Linear value if it is representable as a finite `f64`.
    pub fn finite_value(self) -> Option<f64> {
        let v = self.value();
        v.is_finite().then_some(v)
    }

    pub fn scale(self, factor: f64) -> Self {
        Magnitude {
            ln: self.ln + factor.ln(),
        }
    }

    pub fn times(self, other: Magnitude) -> Self {
        Magnitude {
            ln: self.ln + other.ln,
        }
    }

    pub fn plus(self, other: Magnitude) -> Self {
        Magnitude {
            ln: ln_add_exp(self.ln, other.ln),
        }
    }
}

impl Serialize for Magnitude {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("Magnitude", 2)?;
        s.serialize_field("value", &self.finite_value())?;
        s.serialize_field("log10", &self.log10())?;
        s.end()
    }
}
