//! ES backtest through VaR backtests at several supporting levels.
//!
//! `ES_α ≈ (1/n) Σ_k q_{α + k(1-α)/n}` for `k = 0..n`; with `n = 4` the
//! levels are `α, 0.75α+0.25, 0.5α+0.5, 0.25α+0.75`. This is a left-endpoint
//! Riemann sum of the nondecreasing quantile function, so it never exceeds
//! the exact ES.

use serde::Serialize;

use super::tests::{independence_test, unconditional_coverage_test, TestResult};
use super::violation::violation_process;
use crate::distribution::{compensated_sum, Level, LevelKind};
use crate::error::{check_len, Result, RiskError};

pub const DEFAULT_SUPPORT_POINTS: usize = 4;

const MIN_SUPPORT_POINTS: usize = 2;
const MAX_SUPPORT_POINTS: usize = 16;

// Share of the realized sample surfaced for manual tail inspection.
const TAIL_INSPECTION_SHARE: f64 = 0.0025;

/// Supporting quantile levels `α + k(1-α)/n`, `k = 0..n`.
pub fn es_support_levels(alpha: f64, points: usize) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(RiskError::InvalidLevel(alpha));
    }
    if !(MIN_SUPPORT_POINTS..=MAX_SUPPORT_POINTS).contains(&points) {
        return Err(RiskError::InvalidInput(format!(
            "number of supporting points must be in {MIN_SUPPORT_POINTS}..={MAX_SUPPORT_POINTS}, got {points}"
        )));
    }
    let step = (1.0 - alpha) / points as f64;
    Ok((0..points).map(|k| alpha + k as f64 * step).collect())
}

/// Average of the quantile function at the supporting levels.
pub fn es_quantile_approximation(quantile: impl Fn(f64) -> f64, alpha: f64, points: usize) -> Result<f64> {
    let levels = es_support_levels(alpha, points)?;
    Ok(compensated_sum(levels.iter().map(|&u| quantile(u))) / points as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EsBacktestLeg {
    pub level: f64,
    pub violations: usize,
    pub coverage: TestResult,
    pub independence: TestResult,
    /// coverage passes at the Bonferroni-adjusted level
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailObservation {
    pub index: usize,
    pub realization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EsBacktestReport {
    pub alpha: f64,
    pub significance: f64,
    /// significance / number of legs
    pub per_test_level: f64,
    pub legs: Vec<EsBacktestLeg>,
    /// per period, mean of the quantile forecasts
    pub approximation: Vec<f64>,
    /// mean of `approximation - es_forecast`
    pub mean_gap: f64,
    pub max_abs_gap: f64,
    pub pass: bool,
    /// largest realizations, for manual inspection; no automated verdict
    pub tail_observations: Vec<TailObservation>,
}

/// Backtests ES through its supporting quantiles. `quantile_forecasts[k]`
/// is the forecast series for level `α + k(1-α)/n`. The joint verdict
/// passes iff every coverage test passes at `significance / n`.
pub fn es_quantile_backtest(
    es_forecasts: &[f64],
    quantile_forecasts: &[Vec<f64>],
    realizations: &[f64],
    alpha: Level,
    significance: f64,
) -> Result<EsBacktestReport> {
    let a = alpha.expect_kind(LevelKind::QuantileAlpha)?;
    if !(significance > 0.0 && significance <= 0.5) {
        return Err(RiskError::InvalidInput(format!("significance must lie in (0, 0.5], got {significance}")));
    }
    let levels = es_support_levels(a, quantile_forecasts.len())?;
    let t = realizations.len();
    check_len(t, es_forecasts.len())?;
    for q in quantile_forecasts {
        check_len(t, q.len())?;
    }
    let per_test_level = significance / levels.len() as f64;

    let mut legs = Vec::with_capacity(levels.len());
    for (&level, forecasts) in levels.iter().zip(quantile_forecasts) {
        let v = violation_process(forecasts, realizations, Level::quantile(level)?)?;
        let coverage = unconditional_coverage_test(&v);
        let independence = if v.len() >= 2 { independence_test(&v)? } else { TestResult::degenerate("markov-lr-chi2") };
        legs.push(EsBacktestLeg {
            level,
            violations: v.count(),
            pass: !coverage.rejects(per_test_level),
            coverage,
            independence,
        });
    }

    let n = levels.len() as f64;
    let approximation: Vec<f64> =
        (0..t).map(|i| compensated_sum(quantile_forecasts.iter().map(|q| q[i])) / n).collect();
    let gaps: Vec<f64> = approximation.iter().zip(es_forecasts).map(|(a, e)| a - e).collect();
    let mean_gap = compensated_sum(gaps.iter().copied()) / t as f64;
    let max_abs_gap = gaps.iter().fold(0.0f64, |m, g| m.max(g.abs()));

    let tail_count = ((t as f64 * TAIL_INSPECTION_SHARE).ceil() as usize).max(1);
    let mut order: Vec<usize> = (0..t).collect();
    order.sort_by(|&i, &j| realizations[j].total_cmp(&realizations[i]).then(i.cmp(&j)));
    let tail_observations = order
        .into_iter()
        .take(tail_count)
        .map(|index| TailObservation { index, realization: realizations[index] })
        .collect();

    Ok(EsBacktestReport {
        alpha: a,
        significance,
        per_test_level,
        pass: legs.iter().all(|l| l.pass),
        legs,
        approximation,
        mean_gap,
        max_abs_gap,
        tail_observations,
    })
}
