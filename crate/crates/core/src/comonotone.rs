//! Comonotone pairs `L1 = f1(X)`, `L2 = f2(X)` over a common discrete factor.

use crate::distribution::DiscreteDistribution;
use crate::error::{Result, RiskError};

/// Two nondecreasing maps of a shared discrete risk factor, stored as the
/// image of each factor atom.
#[derive(Debug, Clone, PartialEq)]
pub struct ComonotonePair {
    factor: DiscreteDistribution,
    f1: Vec<f64>,
    f2: Vec<f64>,
}

/// Laws of `L1`, `L2` and `L1 + L2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComonotoneLaws {
    pub first: DiscreteDistribution,
    pub second: DiscreteDistribution,
    pub sum: DiscreteDistribution,
}

impl ComonotonePair {
    pub fn new(factor: DiscreteDistribution, f1: Vec<f64>, f2: Vec<f64>) -> Result<Self> {
        for f in [&f1, &f2] {
            if f.len() != factor.len() {
                return Err(RiskError::ShapeMismatch { expected: factor.len(), actual: f.len() });
            }
            if f.windows(2).any(|p| p[0] > p[1]) {
                return Err(RiskError::InvalidInput(
                    "comonotone maps must be nondecreasing along the factor atoms".into(),
                ));
            }
        }
        Ok(Self { factor, f1, f2 })
    }

    pub fn factor(&self) -> &DiscreteDistribution {
        &self.factor
    }

    pub fn f1(&self) -> &[f64] {
        &self.f1
    }

    pub fn f2(&self) -> &[f64] {
        &self.f2
    }

    /// Exact joint construction: the sum is formed atom by atom on the factor.
    pub fn laws(&self) -> ComonotoneLaws {
        let sum: Vec<f64> = self.f1.iter().zip(&self.f2).map(|(a, b)| a + b).collect();
        // lengths are validated at construction
        ComonotoneLaws {
            first: self.factor.pushforward(&self.f1).expect("validated"),
            second: self.factor.pushforward(&self.f2).expect("validated"),
            sum: self.factor.pushforward(&sum).expect("validated"),
        }
    }
}

/// Laws of `f1(X)`, `f2(X)` and `f1(X) + f2(X)`.
pub fn comonotone_sum(pair: &ComonotonePair) -> ComonotoneLaws {
    pair.laws()
}
