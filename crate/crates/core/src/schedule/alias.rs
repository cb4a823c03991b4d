use std::collections::VecDeque;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AliasError {
    #[error("weights must be finite and nonnegative with a positive sum")]
    InvalidWeights,
}

/// Walker/Vose alias table: O(n) construction, O(1) sampling.
#[derive(Debug, Clone)]
pub struct AliasTable {
    threshold: Vec<f64>,
    alias: Vec<usize>,
}

impl AliasTable {
    /// Builds the table with the two-worklist method. Both worklists are
    /// consumed lowest index first, so the table is a pure function of the
    /// weights.
    pub fn new(weights: &[f64]) -> Result<Self, AliasError> {
        let n = weights.len();
        let total: f64 = weights.iter().sum();
        if n == 0 || !total.is_finite() || total <= 0.0 || weights.iter().any(|w| w.is_nan() || *w < 0.0) {
            return Err(AliasError::InvalidWeights);
        }

        let mut threshold: Vec<f64> = weights.iter().map(|w| w * n as f64 / total).collect();
        let mut alias: Vec<usize> = (0..n).collect();
        let mut small = VecDeque::new();
        let mut large = VecDeque::new();
        for (i, &t) in threshold.iter().enumerate() {
            if t < 1.0 {
                small.push_back(i);
            } else {
                large.push_back(i);
            }
        }

        while let (Some(&s), Some(&l)) = (small.front(), large.front()) {
            small.pop_front();
            alias[s] = l;
            threshold[l] -= 1.0 - threshold[s];
            if threshold[l] < 1.0 {
                large.pop_front();
                small.push_back(l);
            }
        }
        // Leftovers are 1 up to rounding.
        for i in small.into_iter().chain(large) {
            threshold[i] = 1.0;
            alias[i] = i;
        }

        Ok(AliasTable { threshold, alias })
    }

    pub fn len(&self) -> usize {
        self.threshold.len()
    }

    pub fn is_empty(&self) -> bool {
        self.threshold.is_empty()
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let i = rng.random_range(0..self.threshold.len());
        if rng.random::<f64>() < self.threshold[i] {
            i
        } else {
            self.alias[i]
        }
    }

    /// The distribution the table encodes, reconstructed from its slots.
    pub fn implied_distribution(&self) -> Vec<f64> {
        let n = self.len() as f64;
        let mut out = vec![0.0; self.len()];
        for (i, (&t, &a)) in self.threshold.iter().zip(&self.alias).enumerate() {
            out[i] += t / n;
            out[a] += (1.0 - t) / n;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_weight_always_zero() {
        let t = AliasTable::new(&[1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..1000).all(|_| t.sample(&mut rng) == 0));
    }

    #[test]
    fn two_equal_weights() {
        let t = AliasTable::new(&[1.0, 1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 100_000;
        let ones = (0..n).filter(|_| t.sample(&mut rng) == 1).count() as f64;
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((ones - n as f64 / 2.0).abs() <= 3.0 * sigma);
    }

    #[test]
    fn rejects_bad_weights() {
        assert_eq!(AliasTable::new(&[]).unwrap_err(), AliasError::InvalidWeights);
        assert_eq!(AliasTable::new(&[0.0, 0.0]).unwrap_err(), AliasError::InvalidWeights);
        assert_eq!(AliasTable::new(&[1.0, -0.5]).unwrap_err(), AliasError::InvalidWeights);
        assert_eq!(AliasTable::new(&[1.0, f64::NAN]).unwrap_err(), AliasError::InvalidWeights);
    }

    #[test]
    fn implied_distribution_matches_weights() {
        let w = [0.1, 0.0, 0.5, 0.25, 0.15];
        let t = AliasTable::new(&w).unwrap();
        for (a, b) in t.implied_distribution().iter().zip(w) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
