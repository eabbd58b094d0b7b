//! Pseudo-Boolean benchmark functions: OneMax and the generalized Cliff.
//!
//! Both functions depend on a search point only through its number of
//! one-bits, so every evaluation funnels through [`Problem::fitness_of_ones`].
//! The unique global optimum of both is the all-ones string.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Fixed-length bit string stored packed in 64-bit words.
///
/// The number of one-bits is maintained on every [`flip`](Self::flip), so
/// reading it is O(1).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SearchPoint {
    words: Vec<u64>,
    len: usize,
    ones: usize,
}

impl SearchPoint {
    pub fn zeros(len: usize) -> Self {
        SearchPoint {
            words: vec![0; len.div_ceil(64)],
            len,
            ones: 0,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut x = Self::zeros(len);
        for w in &mut x.words {
            *w = u64::MAX;
        }
        x.mask_tail();
        x.ones = len;
        x
    }

    /// Uniformly random point of `{0,1}^len`.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut x = Self::zeros(len);
        for w in &mut x.words {
            *w = rng.next_u64();
        }
        x.mask_tail();
        x.ones = x.recount();
        x
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut x = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                x.flip(i);
            }
        }
        x
    }

    /// A point whose first `ones` positions are set.
    pub fn with_ones(len: usize, ones: usize) -> Self {
        assert!(ones <= len, "cannot place {ones} ones in {len} bits");
        let mut x = Self::zeros(len);
        for i in 0..ones {
            x.flip(i);
        }
        x
    }

    fn mask_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn count_ones(&self) -> usize {
        self.ones
    }

    #[inline]
    pub fn count_zeros(&self) -> usize {
        self.len - self.ones
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i & 63);
        let w = &mut self.words[i >> 6];
        if *w & mask == 0 {
            self.ones += 1;
        } else {
            self.ones -= 1;
        }
        *w ^= mask;
    }

    /// Popcount from scratch; used to cross-check the maintained count.
    pub fn recount(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

/// A validated benchmark instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "lowercase")]
pub enum Problem {
    OneMax { n: usize },
    /// Fitness `|x|` up to `n - m` ones; past that point the value drops by
    /// `d + 1` and keeps climbing towards `1^n`.
    Cliff { n: usize, m: usize, d: f64 },
}

impl Problem {
    pub fn one_max(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "problem size must be positive"));
        }
        Ok(Problem::OneMax { n })
    }

    /// Requires `1 <= m < n` and `0 < d < m - 1`.
    pub fn cliff(n: usize, m: usize, d: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "problem size must be positive"));
        }
        if m < 1 || m >= n {
            return Err(invalid("m", format!("need 1 <= m < n, got m={m}, n={n}")));
        }
        if !(d.is_finite() && d > 0.0 && d < m as f64 - 1.0) {
            return Err(invalid("d", format!("need 0 < d < m - 1, got d={d}, m={m}")));
        }
        Ok(Problem::Cliff { n, m, d })
    }

    #[inline]
    pub fn n(&self) -> usize {
        match *self {
            Problem::OneMax { n } | Problem::Cliff { n, .. } => n,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Problem::OneMax { .. } => "onemax",
            Problem::Cliff { .. } => "cliff",
        }
    }

    /// `(m, d)` for Cliff, `None` for OneMax.
    pub fn cliff_params(&self) -> Option<(usize, f64)> {
        match *self {
            Problem::Cliff { m, d, .. } => Some((m, d)),
            Problem::OneMax { .. } => None,
        }
    }

    /// Fitness of any point with `ones` one-bits.
    #[inline]
    pub fn fitness_of_ones(&self, ones: usize) -> f64 {
        match *self {
            Problem::OneMax { .. } => ones as f64,
            Problem::Cliff { n, m, d } => {
                if ones <= n - m {
                    ones as f64
                } else {
                    ones as f64 - d - 1.0
                }
            }
        }
    }

    pub fn optimum_fitness(&self) -> f64 {
        self.fitness_of_ones(self.n())
    }

    fn check_len(&self, x: &SearchPoint) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                found: x.len(),
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &SearchPoint) -> Result<f64> {
        self.check_len(x)?;
        Ok(self.fitness_of_ones(x.count_ones()))
    }

    /// Hamming distance to the optimum `1^n`, i.e. the number of zero-bits.
    pub fn distance(&self, x: &SearchPoint) -> Result<usize> {
        self.check_len(x)?;
        Ok(x.count_zeros())
    }

    pub fn is_global_optimum(&self, x: &SearchPoint) -> Result<bool> {
        Ok(self.distance(x)? == 0)
    }

    /// Copy of `self` with one named parameter (`n`, `m` or `d`) replaced,
    /// revalidated.
    pub fn with_param(&self, name: &str, value: f64) -> Result<Self> {
        let as_count = |v: f64, what: &'static str| -> Result<usize> {
            if v.fract() != 0.0 || v < 0.0 || !v.is_finite() {
                return Err(invalid(what, format!("expected a non-negative integer, got {v}")));
            }
            Ok(v as usize)
        };
        match (*self, name) {
            (Problem::OneMax { .. }, "n") => Problem::one_max(as_count(value, "n")?),
            (Problem::Cliff { m, d, .. }, "n") => Problem::cliff(as_count(value, "n")?, m, d),
            (Problem::Cliff { n, d, .. }, "m") => Problem::cliff(n, as_count(value, "m")?, d),
            (Problem::Cliff { n, m, .. }, "d") => Problem::cliff(n, m, value),
            (p, other) => Err(Error::Unsupported(format!(
                "parameter `{other}` cannot be varied on {}",
                p.name()
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn cliff(n: usize, m: usize, d: f64) -> Problem {
        Problem::cliff(n, m, d).unwrap()
    }

    #[test]
    fn cliff_values() {
        let p = cliff(10, 3, 1.0);
        assert_eq!(p.evaluate(&SearchPoint::with_ones(10, 7)).unwrap(), 7.0);
        assert_eq!(p.evaluate(&SearchPoint::with_ones(10, 8)).unwrap(), 6.0);
        let p = cliff(10, 4, 1.5);
        assert_eq!(p.evaluate(&SearchPoint::ones(10)).unwrap(), 7.5);
    }

    #[test]
    fn onemax_optimum() {
        let p = Problem::one_max(5).unwrap();
        assert_eq!(p.evaluate(&SearchPoint::ones(5)).unwrap(), 5.0);
        assert!(p.is_global_optimum(&SearchPoint::ones(5)).unwrap());
        assert!(!p.is_global_optimum(&SearchPoint::zeros(5)).unwrap());
    }

    #[test]
    fn distances() {
        let p = cliff(10, 3, 1.0);
        assert_eq!(p.distance(&SearchPoint::ones(10)).unwrap(), 0);
        assert_eq!(p.distance(&SearchPoint::with_ones(10, 7)).unwrap(), 3);
        assert_eq!(p.distance(&SearchPoint::zeros(10)).unwrap(), 10);
        // the local optimum is not global
        assert!(!p.is_global_optimum(&SearchPoint::with_ones(10, 7)).unwrap());
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let p = Problem::one_max(8).unwrap();
        let err = p.evaluate(&SearchPoint::zeros(7)).unwrap_err();
        assert!(matches!(err, Error::LengthMismatch { expected: 8, found: 7 }));
        assert!(p.distance(&SearchPoint::zeros(9)).is_err());
        assert!(p.is_global_optimum(&SearchPoint::zeros(9)).is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(Problem::cliff(10, 3, 2.0).is_err()); // d must be < m - 1
        assert!(Problem::cliff(10, 3, 1.99).is_ok());
        assert!(Problem::cliff(10, 10, 1.0).is_err());
        assert!(Problem::cliff(10, 2, 0.5).is_ok()); // d < 1 is allowed here
        assert!(Problem::cliff(10, 2, 1.0).is_err());
        assert!(Problem::cliff(10, 5, 0.0).is_err());
        assert!(Problem::cliff(10, 5, f64::NAN).is_err());
        assert!(Problem::one_max(0).is_err());
    }

    #[test]
    fn with_param_revalidates() {
        let p = cliff(100, 8, 3.0);
        assert_eq!(p.with_param("m", 12.0).unwrap(), cliff(100, 12, 3.0));
        assert!(p.with_param("m", 4.0).is_err());
        assert!(p.with_param("m", 8.5).is_err());
        assert!(Problem::one_max(5).unwrap().with_param("m", 2.0).is_err());
    }

    #[test]
    fn packed_bits_track_ones() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
        for len in [1usize, 63, 64, 65, 150] {
            let mut x = SearchPoint::random(len, &mut rng);
            assert_eq!(x.count_ones(), x.recount());
            for i in (0..len).step_by(7) {
                x.flip(i);
                assert_eq!(x.count_ones(), x.recount());
            }
            assert_eq!(SearchPoint::ones(len).recount(), len);
        }
    }

    proptest! {
        #[test]
        fn fitness_is_permutation_invariant(bits in proptest::collection::vec(any::<bool>(), 12), seed in any::<u64>()) {
            let p = cliff(12, 4, 1.5);
            let mut shuffled = bits.clone();
            shuffled.shuffle(&mut Xoshiro256PlusPlus::seed_from_u64(seed));
            prop_assert_eq!(
                p.evaluate(&SearchPoint::from_bits(&bits)).unwrap(),
                p.evaluate(&SearchPoint::from_bits(&shuffled)).unwrap()
            );
        }

        #[test]
        fn cliff_shape(n in 4usize..200, m_frac in 0.0f64..1.0, d_frac in 0.01f64..0.99) {
            let m = 3 + ((n - 4) as f64 * m_frac) as usize;
            prop_assume!(m < n);
            let d = d_frac * (m as f64 - 1.0);
            let p = cliff(n, m, d);
            for k in 0..n {
                let step = p.fitness_of_ones(k + 1) - p.fitness_of_ones(k);
                if k == n - m {
                    prop_assert!((step + d).abs() < 1e-9);
                } else {
                    prop_assert!(step > 0.0);
                }
            }
            for k in (n - m + 1)..=n {
                prop_assert_eq!(p.fitness_of_ones(k), k as f64 - d - 1.0);
            }
            // unique global maximum at 1^n
            let best = p.fitness_of_ones(n);
            prop_assert!((0..n).all(|k| p.fitness_of_ones(k) < best));
            prop_assert!(best > (n - m) as f64);
        }
    }
}
