use serde::Serialize;

use crate::distribution::{Level, LevelKind};
use crate::error::{check_len, Result, RiskError};

/// Per-period VaR violation indicators `1{L_t > VaR_t}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationSeries {
    indicators: Vec<u8>,
    alpha: Level,
    count: usize,
}

impl ViolationSeries {
    pub fn new(indicators: Vec<u8>, alpha: Level) -> Result<Self> {
        alpha.expect_kind(LevelKind::QuantileAlpha)?;
        if indicators.is_empty() {
            return Err(RiskError::EmptySample);
        }
        if indicators.iter().any(|&i| i > 1) {
            return Err(RiskError::InvalidInput("violation indicators must be 0 or 1".into()));
        }
        let count = indicators.iter().map(|&i| usize::from(i)).sum();
        Ok(Self { indicators, alpha, count })
    }

    pub fn indicators(&self) -> &[u8] {
        &self.indicators
    }

    pub fn alpha(&self) -> Level {
        self.alpha
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn len(&self) -> usize {
        self.indicators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indicators.is_empty()
    }
}

/// A violation is a realization strictly above its VaR forecast.
pub fn violation_process(var_forecasts: &[f64], realizations: &[f64], alpha: Level) -> Result<ViolationSeries> {
    check_len(var_forecasts.len(), realizations.len())?;
    let indicators = var_forecasts.iter().zip(realizations).map(|(v, l)| u8::from(l > v)).collect();
    ViolationSeries::new(indicators, alpha)
}
