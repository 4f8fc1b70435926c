//! Probability integral transform of scenario-based distribution forecasts
//! and tests of the resulting series against iid U(0,1).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::tests::TestResult;
use crate::error::{check_len, Result, RiskError};
use crate::scoring::ForecastRecord;

pub const DEFAULT_PIT_BINS: usize = 10;
pub const DEFAULT_PIT_MAX_LAG: usize = 10;
pub const DEFAULT_PIT_POWERS: [u32; 3] = [1, 2, 3];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PitSeries {
    pub z: Vec<f64>,
    pub randomized: bool,
    pub rng_seed: Option<u64>,
}

impl PitSeries {
    pub fn new(z: Vec<f64>, randomized: bool, rng_seed: Option<u64>) -> Result<Self> {
        if let Some(v) = z.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(RiskError::InvalidInput(format!("PIT value {v} outside [0, 1]")));
        }
        Ok(Self { z, randomized, rng_seed })
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }
}

/// Randomized PIT `F(x-) + v (F(x) - F(x-))` under the empirical law of the
/// scenarios, for a given `v ∈ [0,1]`.
pub fn pit_transform_with(scenarios: &[f64], x: f64, v: f64) -> Result<f64> {
    if scenarios.is_empty() {
        return Err(RiskError::EmptyScenarioSet);
    }
    let n = scenarios.len() as f64;
    let below = scenarios.iter().filter(|&&s| s < x).count() as f64;
    let at = scenarios.iter().filter(|&&s| s == x).count() as f64;
    Ok(((below + v * at) / n).clamp(0.0, 1.0))
}

/// Randomized PIT of one realization with `v` drawn from a generator seeded
/// by `rng_seed`.
pub fn pit_transform(forecast: &ForecastRecord, realization: f64, rng_seed: u64) -> Result<f64> {
    let scenarios = forecast.scenario_set.as_deref().ok_or(RiskError::EmptyScenarioSet)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    pit_transform_with(scenarios, realization, rng.random())
}

/// PIT series over aligned forecast records; one generator, one draw per
/// period in order.
pub fn pit_series(records: &[ForecastRecord], realizations: &[f64], rng_seed: u64) -> Result<PitSeries> {
    check_len(records.len(), realizations.len())?;
    let sets = records
        .iter()
        .map(|r| r.scenario_set.as_deref().ok_or(RiskError::EmptyScenarioSet))
        .collect::<Result<Vec<_>>>()?;
    pit_series_from_sets(&sets, realizations, rng_seed)
}

pub fn pit_series_from_sets<S: AsRef<[f64]>>(sets: &[S], realizations: &[f64], rng_seed: u64) -> Result<PitSeries> {
    check_len(sets.len(), realizations.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let z = sets
        .iter()
        .zip(realizations)
        .map(|(s, &x)| pit_transform_with(s.as_ref(), x, rng.random()))
        .collect::<Result<Vec<_>>>()?;
    PitSeries::new(z, true, Some(rng_seed))
}

/// Pearson χ² test of equal bin frequencies, `bins - 1` degrees of freedom.
pub fn pit_uniformity_test(p: &PitSeries, bins: usize) -> Result<TestResult> {
    if bins < 2 {
        return Err(RiskError::InvalidInput(format!("need at least 2 bins, got {bins}")));
    }
    let needed = 5 * bins;
    if p.len() < needed {
        return Err(RiskError::InsufficientData { needed, got: p.len() });
    }
    let mut counts = vec![0usize; bins];
    for &z in &p.z {
        let b = ((z * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let expected = p.len() as f64 / bins as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    let chi2 = ChiSquared::new((bins - 1) as f64).expect("positive dof");
    Ok(TestResult::new("pit-chi2-uniformity", stat, chi2.sf(stat)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortmanteauComponent {
    pub power: u32,
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortmanteauReport {
    /// Bonferroni combination over powers; statistic of the smallest p-value
    pub result: TestResult,
    pub components: Vec<PortmanteauComponent>,
}

/// Shifted Legendre polynomial of degree `k` on [0,1]: orthogonal under
/// U(0,1), so the power series are uncorrelated under the null.
fn shifted_legendre(k: u32, z: f64) -> f64 {
    let u = 2.0 * z - 1.0;
    let (mut prev, mut cur) = (1.0, u);
    if k == 0 {
        return prev;
    }
    for n in 1..k {
        let n = f64::from(n);
        let next = ((2.0 * n + 1.0) * u * cur - n * prev) / (n + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

fn ljung_box(x: &[f64], max_lag: usize) -> Option<f64> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let c: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let denom: f64 = c.iter().map(|v| v * v).sum();
    let raw: f64 = x.iter().map(|v| v * v).sum();
    if denom.is_nan() || denom <= 1e-20 * raw {
        return None;
    }
    let mut q = 0.0;
    for lag in 1..=max_lag {
        let r: f64 = c[lag..].iter().zip(&c[..n - lag]).map(|(a, b)| a * b).sum::<f64>() / denom;
        q += r * r / (n - lag) as f64;
    }
    Some(n as f64 * (n as f64 + 2.0) * q)
}

/// Ljung–Box portmanteau tests on the degree-`k` orthogonal polynomial
/// transforms of the PIT series (degree 1 is the centered series itself),
/// each against χ²(max_lag), combined by Bonferroni.
pub fn pit_independence_test(p: &PitSeries, max_lag: usize, powers: &[u32]) -> Result<PortmanteauReport> {
    if max_lag == 0 {
        return Err(RiskError::InvalidInput("max_lag must be at least 1".into()));
    }
    if powers.is_empty() || powers.contains(&0) {
        return Err(RiskError::InvalidInput("powers must be a non-empty set of positive integers".into()));
    }
    let needed = max_lag + 2;
    if p.len() < needed {
        return Err(RiskError::InsufficientData { needed, got: p.len() });
    }
    let chi2 = ChiSquared::new(max_lag as f64).expect("positive dof");
    let components: Vec<PortmanteauComponent> = powers
        .iter()
        .map(|&k| {
            let x: Vec<f64> = p.z.iter().map(|&z| shifted_legendre(k, z)).collect();
            match ljung_box(&x, max_lag) {
                Some(q) => PortmanteauComponent { power: k, statistic: q, p_value: chi2.sf(q) },
                None => PortmanteauComponent { power: k, statistic: 0.0, p_value: 1.0 },
            }
        })
        .collect();
    let best = components.iter().min_by(|a, b| a.p_value.total_cmp(&b.p_value)).expect("non-empty");
    let combined = (best.p_value * components.len() as f64).min(1.0);
    let mut result = TestResult::new("pit-ljung-box-bonferroni", best.statistic, combined);
    result.approximate = true;
    Ok(PortmanteauReport { result, components })
}
