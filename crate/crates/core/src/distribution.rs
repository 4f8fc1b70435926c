//! Finite discrete loss distributions and the quantile machinery shared by
//! every other module.
//!
//! A [`DiscreteDistribution`] stores strictly increasing atoms together with
//! their probabilities and the running cumulative weights. All lookups
//! (`cdf`, `cdf_left`, `quantile`) read the stored cumulative array, so
//! `cdf(quantile(u)) >= u` holds bit-exactly. Distributions built from
//! samples compute the cumulative weights as `count / n`, which makes levels
//! such as `0.95` land exactly on `95 / 100`.

use serde::Serialize;

use crate::error::{Result, RiskError};

/// Maximum allowed deviation of the total weight from one.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Rounding allowance when comparing cumulative weights with a level.
pub const CUMULATIVE_SLACK: f64 = 8.0 * f64::EPSILON;

/// Role of a probability level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LevelKind {
    QuantileAlpha,
    ExpectileTau,
}

/// A probability parameter in the open unit interval, tagged with its role.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Level {
    value: f64,
    kind: LevelKind,
}

impl Level {
    pub fn new(value: f64, kind: LevelKind) -> Result<Self> {
        if !(value > 0.0 && value < 1.0) {
            return Err(RiskError::InvalidLevel(value));
        }
        Ok(Self { value, kind })
    }

    /// Confidence level for VaR and ES.
    pub fn quantile(alpha: f64) -> Result<Self> {
        Self::new(alpha, LevelKind::QuantileAlpha)
    }

    /// Asymmetry level for expectiles.
    pub fn expectile(tau: f64) -> Result<Self> {
        Self::new(tau, LevelKind::ExpectileTau)
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn kind(&self) -> LevelKind {
        self.kind
    }

    pub(crate) fn expect_kind(&self, kind: LevelKind) -> Result<f64> {
        if self.kind != kind {
            return Err(RiskError::WrongLevelKind(match kind {
                LevelKind::QuantileAlpha => "expected a quantile level (alpha)",
                LevelKind::ExpectileTau => "expected an expectile level (tau)",
            }));
        }
        Ok(self.value)
    }
}

/// Finite distribution on the real line with strictly increasing atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    atoms: Vec<f64>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

impl DiscreteDistribution {
    /// Empirical law of a sample: every value gets weight `1/n`, equal values
    /// are merged.
    pub fn from_sample(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(RiskError::EmptySample);
        }
        check_finite(values)?;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);

        let n = sorted.len() as f64;
        let mut atoms = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for &v in &sorted {
            match atoms.last() {
                Some(&last) if last == v => *counts.last_mut().unwrap() += 1,
                _ => {
                    atoms.push(v);
                    counts.push(1);
                }
            }
        }
        let weights = counts.iter().map(|&c| c as f64 / n).collect();
        let mut running = 0usize;
        let cumulative = counts
            .iter()
            .map(|&c| {
                running += c;
                running as f64 / n
            })
            .collect();
        Ok(Self { atoms, weights, cumulative })
    }

    /// Distribution from explicit atoms and probabilities. Atoms need not be
    /// sorted; exact duplicates are merged and their weights summed.
    pub fn from_weighted(atoms: &[f64], weights: &[f64]) -> Result<Self> {
        if atoms.is_empty() {
            return Err(RiskError::EmptySample);
        }
        if atoms.len() != weights.len() {
            return Err(RiskError::ShapeMismatch { expected: atoms.len(), actual: weights.len() });
        }
        check_finite(atoms)?;
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(RiskError::InvalidWeights(format!("weight {w} is not strictly positive")));
        }
        let total = compensated_sum(weights.iter().copied());
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(RiskError::InvalidWeights(format!("weights sum to {total}, expected 1")));
        }

        let mut pairs: Vec<(f64, f64)> = atoms.iter().copied().zip(weights.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged_atoms: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut merged_weights: Vec<f64> = Vec::with_capacity(pairs.len());
        for (a, w) in pairs {
            match merged_atoms.last() {
                Some(&last) if last == a => *merged_weights.last_mut().unwrap() += w,
                _ => {
                    merged_atoms.push(a);
                    merged_weights.push(w);
                }
            }
        }
        Ok(Self::from_sorted_parts(merged_atoms, merged_weights))
    }

    /// Point mass at `c`.
    pub fn point_mass(c: f64) -> Self {
        Self { atoms: vec![c], weights: vec![1.0], cumulative: vec![1.0] }
    }

    fn from_sorted_parts(atoms: Vec<f64>, weights: Vec<f64>) -> Self {
        // Neumaier summation; the last entry is pinned to one.
        let mut cumulative = Vec::with_capacity(weights.len());
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        let mut prev = 0.0f64;
        for &w in &weights {
            let t = sum + w;
            if sum.abs() >= w.abs() {
                comp += (sum - t) + w;
            } else {
                comp += (w - t) + sum;
            }
            sum = t;
            let c = (sum + comp).clamp(prev, 1.0);
            cumulative.push(c);
            prev = c;
        }
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        Self { atoms, weights, cumulative }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Cumulative weights `F(atom_i)`; the last entry is exactly one.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.atoms[0]
    }

    pub fn max(&self) -> f64 {
        self.atoms[self.atoms.len() - 1]
    }

    /// `P(L <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let idx = self.atoms.partition_point(|&a| a <= x);
        if idx == 0 {
            0.0
        } else {
            self.cumulative[idx - 1]
        }
    }

    /// `P(L < x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let idx = self.atoms.partition_point(|&a| a < x);
        if idx == 0 {
            0.0
        } else {
            self.cumulative[idx - 1]
        }
    }

    /// `P(L = x)`, read off the cumulative array.
    pub fn mass_at(&self, x: f64) -> f64 {
        self.cdf(x) - self.cdf_left(x)
    }

    /// Index of the smallest atom whose cumulative weight reaches `u`.
    /// Cumulative sums of rounded weights can land a few ulps short of the
    /// intended value (e.g. `1/22 + 20/22` vs `21/22`), so they count as
    /// reaching `u` within [`CUMULATIVE_SLACK`].
    pub(crate) fn quantile_index(&self, u: f64) -> usize {
        let idx = self.cumulative.partition_point(|&c| c < u - CUMULATIVE_SLACK);
        idx.min(self.atoms.len() - 1)
    }

    /// Left-continuous generalized inverse `inf{x : F(x) >= u}`.
    ///
    /// # Panics
    ///
    /// If `u` is not in `(0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        assert!(u > 0.0 && u < 1.0, "quantile level {u} outside (0, 1)");
        self.atoms[self.quantile_index(u)]
    }

    /// `E[f(L)]`.
    pub fn expectation(&self, f: impl Fn(f64) -> f64) -> f64 {
        compensated_sum(self.atoms.iter().zip(&self.weights).map(|(&a, &w)| w * f(a)))
    }

    /// Law of `L + a`.
    pub fn shift(&self, a: f64) -> Self {
        let atoms: Vec<f64> = self.atoms.iter().map(|x| x + a).collect();
        if atoms.windows(2).all(|p| p[0] < p[1]) {
            return Self { atoms, weights: self.weights.clone(), cumulative: self.cumulative.clone() };
        }
        self.rebuild(atoms)
    }

    /// Law of `h * L` for `h >= 0`.
    pub fn scale(&self, h: f64) -> Result<Self> {
        if !(h >= 0.0 && h.is_finite()) {
            return Err(RiskError::InvalidInput(format!("scale factor must be finite and nonnegative, got {h}")));
        }
        let atoms: Vec<f64> = self.atoms.iter().map(|x| x * h).collect();
        if atoms.windows(2).all(|p| p[0] < p[1]) {
            return Ok(Self { atoms, weights: self.weights.clone(), cumulative: self.cumulative.clone() });
        }
        Ok(self.rebuild(atoms))
    }

    /// Law of `-L`.
    pub fn negate(&self) -> Self {
        let mut atoms: Vec<f64> = self.atoms.iter().rev().map(|x| -x).collect();
        // -0.0 == 0.0, keep a single representation
        for a in atoms.iter_mut() {
            if *a == 0.0 {
                *a = 0.0;
            }
        }
        let weights: Vec<f64> = self.weights.iter().rev().copied().collect();
        Self::from_sorted_parts(atoms, weights)
    }

    /// Pushforward of the law through per-atom values: `values[i]` is the
    /// image of `atoms()[i]`.
    pub fn pushforward(&self, values: &[f64]) -> Result<Self> {
        if values.len() != self.len() {
            return Err(RiskError::ShapeMismatch { expected: self.len(), actual: values.len() });
        }
        check_finite(values)?;
        Ok(self.rebuild(values.to_vec()))
    }

    fn rebuild(&self, atoms: Vec<f64>) -> Self {
        let mut pairs: Vec<(f64, f64)> = atoms.into_iter().zip(self.weights.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged_atoms: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut merged_weights: Vec<f64> = Vec::with_capacity(pairs.len());
        for (a, w) in pairs {
            match merged_atoms.last() {
                Some(&last) if last == a => *merged_weights.last_mut().unwrap() += w,
                _ => {
                    merged_atoms.push(a);
                    merged_weights.push(w);
                }
            }
        }
        Self::from_sorted_parts(merged_atoms, merged_weights)
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(RiskError::InvalidInput(format!("non-finite value {v}"))),
        None => Ok(()),
    }
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
