//! Euler risk contributions and diversification indices on a loss panel.
//!
//! ES contributions weight each joint scenario by its share of the tail
//! `∫_α^1 q_u du`: rows strictly above the portfolio VaR get `1/(1-α)`, rows
//! sitting exactly at the VaR share the leftover tail mass in proportion to
//! their probability. This extends the smooth-case tail conditional mean to
//! discrete laws while keeping the contributions summing exactly to the
//! portfolio ES.

use serde::Serialize;

use crate::distribution::{compensated_sum, DiscreteDistribution, Level, LevelKind};
use crate::error::{check_len, Result, RiskError};
use crate::measures::{self, ExpectileSolverConfig, MeasureKind};

/// Joint observations of `m` position losses over `T` scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct LossPanel {
    names: Vec<String>,
    /// row-major, `T * m`
    values: Vec<f64>,
    /// `None` means equal weights `1/T`
    weights: Option<Vec<f64>>,
    rows: usize,
}

impl LossPanel {
    /// Panel with equal row weights.
    pub fn new(names: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = names.len();
        if m == 0 {
            return Err(RiskError::InvalidInput("panel needs at least one position".into()));
        }
        if rows.is_empty() {
            return Err(RiskError::EmptySample);
        }
        let mut values = Vec::with_capacity(rows.len() * m);
        for row in &rows {
            check_len(m, row.len())?;
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(RiskError::InvalidInput(format!("non-finite loss {v}")));
            }
            values.extend_from_slice(row);
        }
        Ok(Self { names, values, weights: None, rows: rows.len() })
    }

    /// Panel with explicit joint probabilities per row.
    pub fn with_weights(names: Vec<String>, rows: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        check_len(rows.len(), weights.len())?;
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(RiskError::InvalidWeights("row weights must be positive".into()));
        }
        let total = compensated_sum(weights.iter().copied());
        if (total - 1.0).abs() > crate::distribution::WEIGHT_SUM_TOLERANCE {
            return Err(RiskError::InvalidWeights(format!("row weights sum to {total}")));
        }
        let mut panel = Self::new(names, rows)?;
        panel.weights = Some(weights);
        Ok(panel)
    }

    /// Panel with generated position names `L1..Lm`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        let names = (1..=m).map(|i| format!("L{i}")).collect();
        Self::new(names, rows)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn positions(&self) -> usize {
        self.names.len()
    }

    pub fn periods(&self) -> usize {
        self.rows
    }

    pub fn row(&self, t: usize) -> &[f64] {
        let m = self.positions();
        &self.values[t * m..(t + 1) * m]
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        (0..self.rows).map(|t| self.row(t)[i]).collect()
    }

    pub fn row_weight(&self, t: usize) -> f64 {
        match &self.weights {
            Some(w) => w[t],
            None => 1.0 / self.rows as f64,
        }
    }

    /// Portfolio loss per row.
    pub fn portfolio(&self) -> Vec<f64> {
        (0..self.rows).map(|t| self.row(t).iter().sum()).collect()
    }

    fn law_of(&self, values: &[f64]) -> DiscreteDistribution {
        match &self.weights {
            None => DiscreteDistribution::from_sample(values),
            Some(w) => DiscreteDistribution::from_weighted(values, w),
        }
        .expect("panel values validated at construction")
    }

    pub fn portfolio_distribution(&self) -> DiscreteDistribution {
        self.law_of(&self.portfolio())
    }

    pub fn position_distribution(&self, i: usize) -> DiscreteDistribution {
        self.law_of(&self.column(i))
    }

    /// Copy of the panel with column `i` multiplied by `factor`.
    pub fn scale_position(&self, i: usize, factor: f64) -> Self {
        let mut out = self.clone();
        let m = self.positions();
        for t in 0..self.rows {
            out.values[t * m + i] *= factor;
        }
        out
    }

    fn check_position(&self, i: usize) -> Result<()> {
        if i >= self.positions() {
            return Err(RiskError::InvalidInput(format!(
                "position index {i} out of range for {} positions",
                self.positions()
            )));
        }
        Ok(())
    }
}

/// Euler allocation of a portfolio measure across positions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocationResult {
    pub measure: MeasureKind,
    pub total: f64,
    pub contributions: Vec<f64>,
    /// `total - Σ contributions`
    pub residual: f64,
    /// The portfolio law has mass exactly at the evaluation point, so the
    /// derivative may not exist and the returned vector is one of several
    /// admissible allocations.
    pub non_unique: bool,
}

impl AllocationResult {
    fn new(measure: MeasureKind, total: f64, contributions: Vec<f64>, non_unique: bool) -> Self {
        let residual = total - compensated_sum(contributions.iter().copied());
        Self { measure, total, contributions, residual, non_unique }
    }
}

fn weighted_contributions(panel: &LossPanel, row_weights: &[f64], normalizer: f64) -> Vec<f64> {
    (0..panel.positions())
        .map(|i| compensated_sum((0..panel.periods()).map(|t| row_weights[t] * panel.row(t)[i])) / normalizer)
        .collect()
}

/// ES contributions `E[L_i | L >= q_α(L)]` with proportional weight on the
/// boundary event `{L = q}`.
pub fn es_contributions(panel: &LossPanel, alpha: Level) -> Result<AllocationResult> {
    let a = alpha.expect_kind(LevelKind::QuantileAlpha)?;
    let law = panel.portfolio_distribution();
    let total = measures::expected_shortfall(&law, alpha)?;
    let q = law.quantile(a);
    let mass_at = law.mass_at(q);
    let boundary_share = ((law.cdf(q) - a) / mass_at).clamp(0.0, 1.0);

    let portfolio = panel.portfolio();
    let tail: Vec<f64> = portfolio
        .iter()
        .enumerate()
        .map(|(t, &l)| {
            let w = panel.row_weight(t);
            if l > q {
                w
            } else if l == q {
                w * boundary_share
            } else {
                0.0
            }
        })
        .collect();
    let contributions = weighted_contributions(panel, &tail, 1.0 - a);
    let non_unique = boundary_share > 1e-12 && boundary_share < 1.0 - 1e-12;
    Ok(AllocationResult::new(MeasureKind::ES(alpha), total, contributions, non_unique))
}

/// Expectile contributions
/// `[τE[L_i 1{L>e}] + (1-τ)E[L_i 1{L<=e}]] / [τP[L>e] + (1-τ)P[L<=e]]`
/// with `e` the portfolio τ-expectile. Requires `τ >= 1/2`.
pub fn expectile_contributions(panel: &LossPanel, tau: Level) -> Result<AllocationResult> {
    let t = tau.expect_kind(LevelKind::ExpectileTau)?;
    if t < 0.5 {
        return Err(RiskError::InvalidInput(format!("expectile contributions need tau >= 0.5, got {t}")));
    }
    let law = panel.portfolio_distribution();
    let e = measures::expectile(&law, tau, &ExpectileSolverConfig::default())?;
    let portfolio = panel.portfolio();
    let phi: Vec<f64> =
        portfolio.iter().enumerate().map(|(r, &l)| panel.row_weight(r) * if l > e { t } else { 1.0 - t }).collect();
    let denom = compensated_sum(phi.iter().copied());
    let contributions = weighted_contributions(panel, &phi, denom);
    let non_unique = law.mass_at(e) > 0.0;
    Ok(AllocationResult::new(MeasureKind::Expectile(tau), e, contributions, non_unique))
}

/// Euler contributions for the measures that have them (ES, expectile).
pub fn contributions(panel: &LossPanel, kind: MeasureKind) -> Result<AllocationResult> {
    match kind {
        MeasureKind::ES(l) => es_contributions(panel, l),
        MeasureKind::Expectile(l) => expectile_contributions(panel, l),
        other => Err(RiskError::InvalidInput(format!("no Euler contributions for measure {}", other.name()))),
    }
}

/// Standalone measure of every position.
pub fn standalone(panel: &LossPanel, kind: MeasureKind) -> Result<Vec<f64>> {
    (0..panel.positions()).map(|i| kind.evaluate(&panel.position_distribution(i))).collect()
}

/// `DI = ρ(Σ L_i) / Σ ρ(L_i)`.
pub fn diversification_index(panel: &LossPanel, kind: MeasureKind) -> Result<f64> {
    kind.validate()?;
    let total = kind.evaluate(&panel.portfolio_distribution())?;
    let denom = compensated_sum(standalone(panel, kind)?);
    if denom == 0.0 {
        return Err(RiskError::DegenerateDenominator);
    }
    Ok(total / denom)
}

/// `DI(L_i | L) = ρ(L_i | L) / ρ(L_i)`.
pub fn marginal_diversification_index(panel: &LossPanel, i: usize, kind: MeasureKind) -> Result<f64> {
    panel.check_position(i)?;
    let alloc = contributions(panel, kind)?;
    let alone = kind.evaluate(&panel.position_distribution(i))?;
    if alone == 0.0 {
        return Err(RiskError::DegenerateDenominator);
    }
    Ok(alloc.contributions[i] / alone)
}

/// `DB = 1 - RAC(Σ L_i) / Σ RAC(L_i)` with `RAC = ρ - mean`.
pub fn diversification_benefit(panel: &LossPanel, kind: MeasureKind) -> Result<f64> {
    kind.validate()?;
    let rac_total = measures::risk_adjusted_capital(&panel.portfolio_distribution(), kind)?;
    let rac_sum = compensated_sum(
        (0..panel.positions())
            .map(|i| measures::risk_adjusted_capital(&panel.position_distribution(i), kind))
            .collect::<Result<Vec<_>>>()?,
    );
    if rac_sum.is_nan() || rac_sum <= 0.0 {
        return Err(RiskError::DegenerateDenominator);
    }
    Ok(1.0 - rac_total / rac_sum)
}
