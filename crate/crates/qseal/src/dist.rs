//! Discrete probability distributions over decode outcomes.

use crate::error::{Error, Result};

/// Tolerance on the total mass of a distribution or matrix row.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Entries below this are treated as exact zeros in entropy sums, so the
/// 0·log 0 = 0 convention never produces negative-zero artifacts.
const ENTROPY_ZERO_CUTOFF: f64 = 1e-15;

/// A probability vector: non-negative entries summing to 1 within
/// [`NORMALIZATION_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let mut sum = 0.0;
        for (index, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < -1e-12 {
                return Err(Error::NegativeProbability { index, value: p });
            }
            sum += p;
        }
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { sum });
        }
        // Rounding can leave entries a hair below zero; clamp them.
        let probs = probs.into_iter().map(|p| p.max(0.0)).collect();
        Ok(Self { probs })
    }

    pub fn uniform(len: usize) -> Self {
        assert!(len > 0, "empty distribution");
        Self {
            probs: vec![1.0 / len as f64; len],
        }
    }

    pub fn point_mass(len: usize, at: usize) -> Self {
        assert!(at < len, "point mass index out of range");
        let mut probs = vec![0.0; len];
        probs[at] = 1.0;
        Self { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, index: usize) -> f64 {
        self.probs[index]
    }

    /// Shannon entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        entropy_bits(&self.probs)
    }
}

/// Shannon entropy of a probability vector, in bits, with 0·log 0 = 0.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    let mut h = 0.0;
    for &p in probs {
        if p > ENTROPY_ZERO_CUTOFF {
            h -= p * p.log2();
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_entropy_is_log2_n() {
        let d = Distribution::uniform(8);
        assert!((d.entropy_bits() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn point_mass_entropy_is_zero() {
        let d = Distribution::point_mass(16, 3);
        assert_eq!(d.entropy_bits(), 0.0);
        assert_eq!(d.get(3), 1.0);
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(Distribution::new(vec![0.5, 0.4]).is_err());
        assert!(Distribution::new(vec![0.5, 0.5]).is_ok());
    }

    #[test]
    fn rejects_negative_entries() {
        assert!(Distribution::new(vec![1.1, -0.1]).is_err());
    }

    #[test]
    fn clamps_rounding_noise() {
        let d = Distribution::new(vec![1.0 + 5e-13, -5e-13]).unwrap();
        assert_eq!(d.get(1), 0.0);
    }
}
