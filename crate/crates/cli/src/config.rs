use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Batch risk measurement: CSV in, JSON report out.
///
/// Losses are positive numbers, gains negative. Inputs are never negated.
#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "riskmeas", version)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Significance level used for verdicts.
    #[arg(long, global = true, default_value_t = 0.05)]
    pub significance: f64,

    /// Number of bins for the PIT uniformity test.
    #[arg(long, global = true, default_value_t = 10)]
    pub bins: usize,

    /// Seed for randomized procedures.
    #[arg(long, global = true, env = "RISKMEAS_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureArg {
    Mean,
    Variance,
    Var,
    Es,
    Expectile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoreArg {
    Squared,
    WeightedSquared,
    Absolute,
    WeightedAbsolute,
    TailMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchArg {
    Expectile,
    Var,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Evaluate a risk measure on the portfolio and on every position.
    Measure {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: MeasureArg,
        #[arg(long)]
        level: Option<f64>,
    },
    /// Euler allocation of ES or expectile across positions.
    Allocate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: MeasureArg,
        #[arg(long)]
        level: f64,
    },
    /// Diversification index, marginal indices and diversification benefit.
    Diversify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: MeasureArg,
        #[arg(long)]
        level: Option<f64>,
    },
    /// Coverage and independence tests of VaR forecasts.
    BacktestVar {
        #[arg(long)]
        forecasts: PathBuf,
        #[arg(long)]
        level: f64,
    },
    /// ES backtest through VaR backtests at the supporting quantile levels.
    BacktestEs {
        #[arg(long)]
        forecasts: PathBuf,
        #[arg(long)]
        level: f64,
    },
    /// PIT uniformity and independence tests of scenario forecasts.
    BacktestPit {
        #[arg(long)]
        forecasts: PathBuf,
        #[arg(long, default_value_t = 10)]
        max_lag: usize,
    },
    /// Minimize an empirical mean score over constant forecasts.
    Elicit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        score: ScoreArg,
        #[arg(long)]
        level: Option<f64>,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Search small discrete laws for coherence counterexamples.
    Counterexample {
        #[arg(long, value_enum)]
        kind: SearchArg,
        #[arg(long)]
        level: f64,
    },
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.significance > 0.0 && self.significance <= 0.5) {
            return Err(format!("significance must lie in (0, 0.5], got {}", self.significance));
        }
        if self.bins < 2 {
            return Err(format!("bins must be at least 2, got {}", self.bins));
        }
        let level = match &self.command {
            Command::Measure { level, .. } | Command::Diversify { level, .. } | Command::Elicit { level, .. } => *level,
            Command::Allocate { level, .. }
            | Command::BacktestVar { level, .. }
            | Command::BacktestEs { level, .. }
            | Command::Counterexample { level, .. } => Some(*level),
            Command::BacktestPit { .. } => None,
        };
        if let Some(l) = level {
            if !(l > 0.0 && l < 1.0) {
                return Err(format!("level must lie in (0, 1), got {l}"));
            }
        }
        Ok(())
    }
}
