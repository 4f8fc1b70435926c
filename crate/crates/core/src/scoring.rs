//! Scoring functions, empirical elicitation and forecast comparison.

use serde::Serialize;

use crate::distribution::{compensated_sum, DiscreteDistribution, Level, LevelKind};
use crate::error::{check_len, Result, RiskError};

/// Point-forecast scores `s(x, y)` for forecast `x` and realization `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ScoringFunction {
    /// `(x - y)²`, elicits the mean.
    SquaredError,
    /// `(1{x>=y} - τ)(x - y)² sgn(x - y)`, elicits the τ-expectile.
    WeightedSquaredError(f64),
    /// `|x - y|`, elicits the median.
    AbsoluteError,
    /// `(1{x>=y} - α)(x - y)`, elicits the α-quantile.
    WeightedAbsoluteError(f64),
    /// Bregman score of `φ(x) = x²/(1+|x|)` switched on for `x >= c`;
    /// elicits the tail mean `E[L | L >= c]`.
    TailMeanScore(f64),
}

impl ScoringFunction {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::WeightedSquaredError(l) | Self::WeightedAbsoluteError(l) => {
                if !(l > 0.0 && l < 1.0) {
                    return Err(RiskError::InvalidLevel(l));
                }
            }
            Self::TailMeanScore(c) if !c.is_finite() => {
                return Err(RiskError::InvalidInput(format!("threshold {c} is not finite")));
            }
            _ => {}
        }
        Ok(())
    }
}

fn phi(x: f64) -> f64 {
    x * x / (1.0 + x.abs())
}

fn phi_prime(x: f64) -> f64 {
    let a = 1.0 + x.abs();
    x * (2.0 + x.abs()) / (a * a)
}

/// Evaluates the score; nonnegative, and zero at `x == y` for the error
/// families.
pub fn score(s: ScoringFunction, x: f64, y: f64) -> f64 {
    let ind = if x >= y { 1.0 } else { 0.0 };
    match s {
        ScoringFunction::SquaredError => (x - y) * (x - y),
        ScoringFunction::WeightedSquaredError(tau) => {
            let d = x - y;
            (ind - tau) * d * d * d.signum()
        }
        ScoringFunction::AbsoluteError => (x - y).abs(),
        ScoringFunction::WeightedAbsoluteError(alpha) => (ind - alpha) * (x - y),
        ScoringFunction::TailMeanScore(c) => {
            if x >= c {
                phi(y) - phi(x) - phi_prime(x) * (y - x)
            } else {
                0.0
            }
        }
    }
}

/// Mean score of a constant forecast `x` over a sample.
pub fn mean_score(s: ScoringFunction, x: f64, sample: &[f64]) -> f64 {
    compensated_sum(sample.iter().map(|&y| score(s, x, y))) / sample.len() as f64
}

// Scores within this relative distance count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

/// Minimizer of the empirical mean score (generalized regression on a
/// constant). Ties resolve to the smallest minimizer.
///
/// * piecewise-linear scores: exhaustive search over sample points and
///   midpoints of consecutive distinct points;
/// * asymmetric squared scores: exact vertex of the convex quadratic on each
///   inter-point piece;
/// * tail-mean score: the sample is restricted to `y >= c` and the strictly
///   convex Bregman objective is minimized on `[c, max y]` by bisection on
///   its derivative.
pub fn elicit(s: ScoringFunction, sample: &[f64]) -> Result<f64> {
    if sample.is_empty() {
        return Err(RiskError::EmptySample);
    }
    s.validate()?;
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    match s {
        ScoringFunction::AbsoluteError | ScoringFunction::WeightedAbsoluteError(_) => {
            Ok(minimize_over_candidates(s, sample, &sorted))
        }
        ScoringFunction::SquaredError => Ok(minimize_asymmetric_quadratic(0.5, sample, &sorted)),
        ScoringFunction::WeightedSquaredError(tau) => Ok(minimize_asymmetric_quadratic(tau, sample, &sorted)),
        ScoringFunction::TailMeanScore(c) => {
            let tail: Vec<f64> = sample.iter().copied().filter(|&y| y >= c).collect();
            if tail.is_empty() {
                return Err(RiskError::EmptyTail);
            }
            let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            // d/dx s(x, y) = -φ''(x)(y - x) for x >= c
            let derivative =
                |x: f64| -> f64 { -phi_second(x) * compensated_sum(tail.iter().map(|&y| y - x)) / tail.len() as f64 };
            Ok(bisect_derivative(derivative, c, hi))
        }
    }
}

fn minimize_over_candidates(s: ScoringFunction, sample: &[f64], sorted: &[f64]) -> f64 {
    let mut candidates = Vec::with_capacity(2 * sorted.len());
    for (i, &v) in sorted.iter().enumerate() {
        candidates.push(v);
        if let Some(&next) = sorted.get(i + 1) {
            candidates.push(0.5 * (v + next));
        }
    }
    let mut best = candidates[0];
    let mut best_score = mean_score(s, best, sample);
    for &x in &candidates[1..] {
        let sc = mean_score(s, x, sample);
        if sc < best_score - TIE_TOLERANCE * best_score.abs().max(1e-300) {
            best = x;
            best_score = sc;
        }
    }
    best
}

/// Minimizes `Σ τ (x-y)² 1{x<y} + (1-τ)(x-y)² 1{x>=y}` exactly. On each piece
/// between consecutive distinct sample points the objective is quadratic,
/// so its minimizer is the clamped vertex.
fn minimize_asymmetric_quadratic(tau: f64, sample: &[f64], sorted: &[f64]) -> f64 {
    if sorted.len() == 1 {
        return sorted[0];
    }
    let mut values = sample.to_vec();
    values.sort_by(f64::total_cmp);
    let total: f64 = compensated_sum(values.iter().copied());
    let n = values.len();
    let mut below_count = 0usize;
    let mut below_sum = 0.0f64;
    let mut best: Option<(f64, f64)> = None;
    let mut idx = 0usize;
    for piece in sorted.windows(2) {
        let (left, right) = (piece[0], piece[1]);
        while idx < n && values[idx] <= left {
            below_sum += values[idx];
            below_count += 1;
            idx += 1;
        }
        let above_sum = total - below_sum;
        let above_count = (n - below_count) as f64;
        let x = ((1.0 - tau) * below_sum + tau * above_sum) / ((1.0 - tau) * below_count as f64 + tau * above_count);
        let x = x.clamp(left, right);
        let sc = mean_score(ScoringFunction::WeightedSquaredError(tau), x, sample);
        match best {
            Some((_, b)) if sc >= b - TIE_TOLERANCE * b.abs() => {}
            _ => best = Some((x, sc)),
        }
    }
    best.expect("at least one piece").0
}

/// Bisection on the sign of the objective's derivative over `[a, b]`,
/// for a convex objective.
fn bisect_derivative(derivative: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    if derivative(a) >= 0.0 {
        return a;
    }
    if derivative(b) <= 0.0 {
        return b;
    }
    loop {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            return a;
        }
        let d = derivative(mid);
        if d == 0.0 {
            return mid;
        }
        if d < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
}

fn phi_second(x: f64) -> f64 {
    let a = 1.0 + x.abs();
    2.0 / (a * a * a)
}

/// Result of the quantile-then-tail-mean ES forecast.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoStepEsForecast {
    pub q_hat: f64,
    pub es_hat: f64,
}

/// Two-step ES forecast: elicit the α-quantile with the pinball score, then
/// take the squared-error minimizer (the mean) over sample points
/// `y >= q_hat`.
///
/// On discrete samples this omits the correction for a probability atom at
/// the quantile, so it can differ from [`crate::measures::expected_shortfall`].
pub fn two_step_es_forecast(sample: &[f64], alpha: Level) -> Result<TwoStepEsForecast> {
    let a = alpha.expect_kind(LevelKind::QuantileAlpha)?;
    let q_hat = elicit(ScoringFunction::WeightedAbsoluteError(a), sample)?;
    let tail: Vec<f64> = sample.iter().copied().filter(|&y| y >= q_hat).collect();
    if tail.is_empty() {
        return Err(RiskError::EmptyTail);
    }
    let es_hat = elicit(ScoringFunction::SquaredError, &tail)?;
    Ok(TwoStepEsForecast { q_hat, es_hat })
}

/// Two-step forecast evaluated on a full population law rather than a sample.
pub fn two_step_es_population(d: &DiscreteDistribution, alpha: Level) -> Result<TwoStepEsForecast> {
    let a = alpha.expect_kind(LevelKind::QuantileAlpha)?;
    let k = d.quantile_index(a);
    let q_hat = d.atoms()[k];
    let mass = compensated_sum(d.weights()[k..].iter().copied());
    let es_hat = compensated_sum(d.atoms()[k..].iter().zip(&d.weights()[k..]).map(|(x, w)| x * w)) / mass;
    Ok(TwoStepEsForecast { q_hat, es_hat })
}

/// Which forecast series scored better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Winner {
    A,
    B,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForecastComparison {
    pub mean_score_a: f64,
    pub mean_score_b: f64,
    pub winner: Winner,
}

/// Mean-score comparison of two forecast series against the same
/// realizations. The strictly smaller mean score wins.
pub fn compare_forecasts(
    s: ScoringFunction,
    forecasts_a: &[f64],
    forecasts_b: &[f64],
    realizations: &[f64],
) -> Result<ForecastComparison> {
    s.validate()?;
    if realizations.is_empty() {
        return Err(RiskError::EmptySample);
    }
    check_len(realizations.len(), forecasts_a.len())?;
    check_len(realizations.len(), forecasts_b.len())?;
    let n = realizations.len() as f64;
    let mean_of = |f: &[f64]| compensated_sum(f.iter().zip(realizations).map(|(&x, &y)| score(s, x, y))) / n;
    let mean_score_a = mean_of(forecasts_a);
    let mean_score_b = mean_of(forecasts_b);
    let winner = if mean_score_a < mean_score_b {
        Winner::A
    } else if mean_score_b < mean_score_a {
        Winner::B
    } else {
        Winner::Neither
    };
    Ok(ForecastComparison { mean_score_a, mean_score_b, winner })
}

/// One period of forecasts: point forecasts and/or a scenario set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForecastRecord {
    pub period: i64,
    pub var_forecast: Option<f64>,
    pub es_forecast: Option<f64>,
    pub scenario_set: Option<Vec<f64>>,
}

impl ForecastRecord {
    pub fn new(
        period: i64,
        var_forecast: Option<f64>,
        es_forecast: Option<f64>,
        scenario_set: Option<Vec<f64>>,
    ) -> Result<Self> {
        if var_forecast.is_none() && es_forecast.is_none() && scenario_set.is_none() {
            return Err(RiskError::InvalidInput(format!("period {period}: forecast record carries no forecast")));
        }
        if matches!(&scenario_set, Some(s) if s.is_empty()) {
            return Err(RiskError::EmptyScenarioSet);
        }
        Ok(Self { period, var_forecast, es_forecast, scenario_set })
    }
}
