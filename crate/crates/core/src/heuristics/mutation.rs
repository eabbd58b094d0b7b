//! Mutation operators on [`SearchPoint`]s.
//!
//! Standard bit mutation flips every bit independently with rate `p`. It is
//! sampled as "draw the number of flipped bits `K ~ Bin(n, p)`, then pick a
//! uniformly random `K`-subset of positions", which has exactly the same
//! distribution and costs O(1 + K) per offspring instead of O(n).

use rand::distr::{Distribution, Uniform};
use rand::Rng;

use crate::benchmarks::SearchPoint;

/// Inverse-CDF sampler for `Bin(n, p)`.
#[derive(Debug, Clone)]
pub struct FlipCountTable {
    cdf: Vec<f64>,
}

impl FlipCountTable {
    pub fn new(n: usize, p: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&p));
        let mut cdf = Vec::with_capacity(n + 1);
        if p <= 0.0 {
            cdf.resize(n + 1, 1.0);
            return FlipCountTable { cdf };
        }
        // pmf in log space: ln P(k+1) = ln P(k) + ln((n-k)/(k+1)) + ln(p/(1-p))
        let ln_odds = p.ln() - (-p).ln_1p();
        let mut ln_pmf = n as f64 * (-p).ln_1p();
        let mut acc = 0.0;
        for k in 0..=n {
            acc += ln_pmf.exp();
            cdf.push(acc);
            if k < n {
                ln_pmf += ((n - k) as f64 / (k + 1) as f64).ln() + ln_odds;
            }
        }
        let last = cdf.len() - 1;
        cdf[last] = f64::INFINITY;
        FlipCountTable { cdf }
    }

    /// Probability that no bit flips.
    pub fn p_zero(&self) -> f64 {
        self.cdf[0].min(1.0)
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        // the mass sits at small k for every rate we use, so scan first
        let head = self.cdf.len().min(8);
        if let Some(k) = self.cdf[..head].iter().position(|&c| u < c) {
            return k;
        }
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }
}

/// Inverse-CDF sampler for the power-law strength `r ∈ {1, …, ⌊n/2⌋}` with
/// `P(r) ∝ r^{-β}` used by heavy-tailed mutation.
#[derive(Debug, Clone)]
pub struct PowerLawStrength {
    cdf: Vec<f64>,
}

impl PowerLawStrength {
    /// Requires `n >= 2`.
    pub fn new(n: usize, beta: f64) -> Self {
        let max = (n / 2).max(1);
        let weights: Vec<f64> = (1..=max).map(|r| (r as f64).powf(-beta)).collect();
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        *cdf.last_mut().expect("non-empty support") = f64::INFINITY;
        PowerLawStrength { cdf }
    }

    pub fn max_strength(&self) -> usize {
        self.cdf.len()
    }

    /// Exact probability mass of strength `r`.
    pub fn probability(&self, r: usize) -> f64 {
        if r == 0 || r > self.cdf.len() {
            return 0.0;
        }
        let hi = self.cdf[r - 1].min(1.0);
        let lo = if r >= 2 { self.cdf[r - 2] } else { 0.0 };
        hi - lo
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1) + 1
    }
}

/// Draw a strength `r` with mass proportional to `r^{-β}` on `[1, ⌊n/2⌋]`.
pub fn sample_heavy_tailed_rate<R: Rng + ?Sized>(n: usize, beta: f64, rng: &mut R) -> usize {
    PowerLawStrength::new(n, beta).sample(rng)
}

/// Flip-count tables for the rates `r/n`, built on first use.
#[derive(Debug, Clone)]
pub struct RateLadder {
    n: usize,
    tables: Vec<Option<FlipCountTable>>,
}

impl RateLadder {
    pub fn new(n: usize) -> Self {
        RateLadder {
            n,
            tables: vec![None; n / 2 + 2],
        }
    }

    #[inline]
    pub fn table(&mut self, r: usize) -> &FlipCountTable {
        if r >= self.tables.len() {
            self.tables.resize(r + 1, None);
        }
        let n = self.n;
        self.tables[r].get_or_insert_with(|| FlipCountTable::new(n, r as f64 / n as f64))
    }
}

/// A proposed offspring, described by the positions in which it differs from
/// its parent. The parent is only modified by [`Offspring::apply`].
#[derive(Debug, Default, Clone)]
pub struct Offspring {
    positions: Vec<usize>,
    ones: usize,
    /// Position sampler for the last parent length, built once per run.
    uniform: Option<(usize, Uniform<usize>)>,
}

impl Offspring {
    /// Number of one-bits of the offspring.
    #[inline]
    pub fn ones(&self) -> usize {
        self.ones
    }

    #[inline]
    pub fn flips(&self) -> &[usize] {
        &self.positions
    }

    #[inline]
    pub fn apply(&self, x: &mut SearchPoint) {
        for &i in &self.positions {
            x.flip(i);
        }
        debug_assert_eq!(x.count_ones(), self.ones);
        debug_assert_eq!(x.count_ones(), x.recount());
    }

    /// Fill `self` with a uniformly random `k`-subset of `0..x.len()`.
    pub fn propose<R: Rng + ?Sized>(&mut self, x: &SearchPoint, k: usize, rng: &mut R) {
        let n = x.len();
        debug_assert!(k <= n);
        self.positions.clear();
        if k <= 16 {
            let uniform = match self.uniform {
                Some((len, u)) if len == n => u,
                _ => {
                    let u = Uniform::new(0, n).expect("search points are non-empty");
                    self.uniform = Some((n, u));
                    u
                }
            };
            while self.positions.len() < k {
                let i = uniform.sample(rng);
                if !self.positions.contains(&i) {
                    self.positions.push(i);
                }
            }
        } else {
            self.positions
                .extend(rand::seq::index::sample(rng, n, k).into_iter());
        }
        let flipped_zeros = self.positions.iter().filter(|&&i| !x.get(i)).count();
        self.ones = x.count_ones() + flipped_zeros - (k - flipped_zeros);
    }
}

/// Global mutation operator used by the Metropolis variants.
#[derive(Debug, Clone)]
pub enum GlobalMutation {
    Standard(FlipCountTable),
    HeavyTailed {
        strength: PowerLawStrength,
        ladder: RateLadder,
    },
}

impl GlobalMutation {
    pub fn standard(n: usize, p: f64) -> Self {
        GlobalMutation::Standard(FlipCountTable::new(n, p))
    }

    pub fn heavy_tailed(n: usize, beta: f64) -> Self {
        GlobalMutation::HeavyTailed {
            strength: PowerLawStrength::new(n, beta),
            ladder: RateLadder::new(n),
        }
    }

    /// Number of bits the next offspring flips.
    #[inline]
    pub fn flip_count<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        match self {
            GlobalMutation::Standard(table) => table.sample(rng),
            GlobalMutation::HeavyTailed { strength, ladder } => {
                let r = strength.sample(rng);
                ladder.table(r).sample(rng)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;

    #[test]
    fn heavy_tail_support_and_mass() {
        // n=4, β=1.5: support {1, 2}, P(1) = 1 / (1 + 2^{-1.5})
        let dist = PowerLawStrength::new(4, 1.5);
        assert_eq!(dist.max_strength(), 2);
        let unnormalized = [1.0f64, 2f64.powf(-1.5)];
        let oracle = unnormalized[0] / unnormalized.iter().sum::<f64>();
        assert!((oracle - 0.738_796_125_036_258_6).abs() < 1e-15);
        assert!((dist.probability(1) - oracle).abs() < 1e-15);
        assert!((dist.probability(2) - (1.0 - oracle)).abs() < 1e-15);
    }

    #[test]
    fn heavy_tail_singleton_support() {
        let mut rng = trial_rng(1);
        for _ in 0..1000 {
            assert_eq!(sample_heavy_tailed_rate(2, 1.5, &mut rng), 1);
            assert_eq!(sample_heavy_tailed_rate(3, 1.5, &mut rng), 1);
        }
    }

    #[test]
    fn heavy_tail_monte_carlo() {
        let dist = PowerLawStrength::new(100, 1.5);
        let p1: f64 = 1.0 / (1..=50).map(|r| (r as f64).powf(-1.5)).sum::<f64>();
        let mut rng = trial_rng(7);
        let trials = 1_000_000;
        let mut hits = 0usize;
        let mut max_seen = 0;
        for _ in 0..trials {
            let r = dist.sample(&mut rng);
            max_seen = max_seen.max(r);
            assert!((1..=50).contains(&r));
            hits += usize::from(r == 1);
        }
        let se = (p1 * (1.0 - p1) / trials as f64).sqrt();
        let freq = hits as f64 / trials as f64;
        assert!((freq - p1).abs() <= 3.0 * se, "freq={freq} exact={p1} se={se}");
        assert!(max_seen > 40);
    }

    #[test]
    fn flip_count_matches_binomial() {
        let n = 30;
        let p = 0.1;
        let table = FlipCountTable::new(n, p);
        assert!((table.p_zero() - 0.9f64.powi(30)).abs() < 1e-15);
        let mut rng = trial_rng(11);
        let trials = 400_000;
        let mut hist = vec![0usize; n + 1];
        for _ in 0..trials {
            hist[table.sample(&mut rng)] += 1;
        }
        let mut pmf = 0.9f64.powi(30);
        for (k, &count) in hist.iter().enumerate().take(10) {
            let se = (pmf * (1.0 - pmf) / trials as f64).sqrt();
            let freq = count as f64 / trials as f64;
            assert!((freq - pmf).abs() <= 4.0 * se + 1e-9, "k={k}: {freq} vs {pmf}");
            pmf *= (n - k) as f64 / (k + 1) as f64 * p / (1.0 - p);
        }
    }

    #[test]
    fn flip_count_extremes() {
        let mut rng = trial_rng(5);
        let half = FlipCountTable::new(2000, 0.5);
        let mean: f64 = (0..10_000).map(|_| half.sample(&mut rng) as f64).sum::<f64>() / 1e4;
        assert!((mean - 1000.0).abs() < 5.0);
        let none = FlipCountTable::new(10, 0.0);
        assert_eq!(none.sample(&mut rng), 0);
    }

    #[test]
    fn offspring_positions_are_distinct() {
        let mut rng = trial_rng(9);
        let x = SearchPoint::random(40, &mut rng);
        let mut y = Offspring::default();
        for k in [0, 1, 5, 16, 17, 40] {
            y.propose(&x, k, &mut rng);
            let mut pos = y.flips().to_vec();
            pos.sort_unstable();
            pos.dedup();
            assert_eq!(pos.len(), k);
            let mut z = x.clone();
            y.apply(&mut z);
            assert_eq!(z.count_ones(), y.ones());
        }
    }
}
