use std::path::Path;

use riskmeas_core::allocation::{self, LossPanel};
use riskmeas_core::backtest::{self, ComonotoneGrid, VarSearchSpace, DEFAULT_PIT_POWERS};
use riskmeas_core::measures;
use riskmeas_core::scoring::{self, ScoringFunction};
use riskmeas_core::{Level, MeasureKind, RiskError};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, MeasureArg, RunConfig, ScoreArg, SearchArg};
use crate::error::CliError;
use crate::input::{parse_forecasts_csv, parse_panel_csv, parse_sample_csv, ForecastRow};

/// Final output of one run. Serialized with fields in declaration order.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    pub result: Value,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable result")
}

fn measure_kind(kind: MeasureArg, level: Option<f64>) -> Result<MeasureKind, CliError> {
    let need = |l: Option<f64>| l.ok_or_else(|| CliError::Config(format!("--level is required for {kind:?}")));
    Ok(match kind {
        MeasureArg::Mean => MeasureKind::Mean,
        MeasureArg::Variance => MeasureKind::Variance,
        MeasureArg::Var => MeasureKind::var(need(level)?)?,
        MeasureArg::Es => MeasureKind::es(need(level)?)?,
        MeasureArg::Expectile => MeasureKind::expectile(need(level)?)?,
    })
}

fn measure(panel: &LossPanel, kind: MeasureKind) -> Result<Value, CliError> {
    let portfolio = panel.portfolio_distribution();
    let positions = (0..panel.positions())
        .map(|i| {
            let d = panel.position_distribution(i);
            Ok(json!({
                "name": panel.names()[i],
                "value": kind.evaluate(&d)?,
                "capital": measures::risk_adjusted_capital(&d, kind)?,
            }))
        })
        .collect::<Result<Vec<_>, RiskError>>()?;
    Ok(json!({
        "measure": kind,
        "periods": panel.periods(),
        "portfolio": {
            "value": kind.evaluate(&portfolio)?,
            "mean": measures::mean(&portfolio),
            "capital": measures::risk_adjusted_capital(&portfolio, kind)?,
        },
        "positions": positions,
    }))
}

fn allocate(panel: &LossPanel, kind: MeasureKind, warnings: &mut Vec<String>) -> Result<Value, CliError> {
    let r = allocation::contributions(panel, kind)?;
    if r.non_unique {
        warnings
            .push("portfolio law has an atom at the evaluation point; contributions are one admissible choice".into());
    }
    let by_name: Vec<Value> =
        panel.names().iter().zip(&r.contributions).map(|(n, c)| json!({ "name": n, "contribution": c })).collect();
    Ok(json!({
        "measure": r.measure,
        "total": r.total,
        "contributions": by_name,
        "residual": r.residual,
        "non_unique": r.non_unique,
    }))
}

// Module errors on individual quantities become nulls plus a warning so the
// remaining numbers are still reported.
fn soft(v: Result<f64, RiskError>, what: &str, warnings: &mut Vec<String>) -> Value {
    match v {
        Ok(x) => json!(x),
        Err(e) => {
            warnings.push(format!("{what}: {e}"));
            Value::Null
        }
    }
}

fn diversify(panel: &LossPanel, kind: MeasureKind, warnings: &mut Vec<String>) -> Result<Value, CliError> {
    let index = soft(allocation::diversification_index(panel, kind), "diversification index", warnings);
    let benefit = soft(allocation::diversification_benefit(panel, kind), "diversification benefit", warnings);
    let marginal = if matches!(kind, MeasureKind::ES(_) | MeasureKind::Expectile(_)) {
        let entries: Vec<Value> = (0..panel.positions())
            .map(|i| {
                let name = &panel.names()[i];
                let v = allocation::marginal_diversification_index(panel, i, kind);
                json!({ "name": name, "index": soft(v, &format!("marginal index of {name}"), warnings) })
            })
            .collect();
        Value::Array(entries)
    } else {
        Value::Null
    };
    Ok(json!({
        "measure": kind,
        "diversification_index": index,
        "diversification_benefit": benefit,
        "marginal_indices": marginal,
    }))
}

fn missing(row: &ForecastRow, column: &str) -> CliError {
    CliError::Risk(RiskError::InvalidInput(format!("period {}: missing {column}", row.period)))
}

fn note_test(name: &str, t: &backtest::TestResult, warnings: &mut Vec<String>) {
    if t.degenerate {
        warnings.push(format!("{name}: statistic undefined on this series, p-value set to 1"));
    }
    if t.approximate {
        warnings.push(format!("{name}: p-value from the normal approximation"));
    }
}

fn backtest_var(path: &Path, level: f64, significance: f64, warnings: &mut Vec<String>) -> Result<Value, CliError> {
    let rows = parse_forecasts_csv(path)?;
    let var =
        rows.iter().map(|r| r.var_forecast.ok_or_else(|| missing(r, "var_forecast"))).collect::<Result<Vec<_>, _>>()?;
    let realized: Vec<f64> = rows.iter().map(|r| r.realized).collect();
    let v = backtest::violation_process(&var, &realized, Level::quantile(level)?)?;
    let coverage = backtest::unconditional_coverage_test(&v);
    note_test("coverage", &coverage, warnings);
    let independence = if v.len() >= 2 {
        let t = backtest::independence_test(&v)?;
        note_test("independence", &t, warnings);
        Some(t)
    } else {
        warnings.push("independence: fewer than two periods".into());
        None
    };
    let pass = !coverage.rejects(significance) && !independence.as_ref().is_some_and(|t| t.rejects(significance));
    Ok(json!({
        "alpha": level,
        "periods": v.len(),
        "violations": v.count(),
        "expected_violations": (1.0 - level) * v.len() as f64,
        "coverage": coverage,
        "independence": independence,
        "pass": pass,
    }))
}

fn backtest_es(path: &Path, level: f64, significance: f64, warnings: &mut Vec<String>) -> Result<Value, CliError> {
    let rows = parse_forecasts_csv(path)?;
    let n = rows[0].quantiles.len();
    if n < 2 {
        return Err(CliError::Config("ES backtest needs quantile columns q1, q2, ...".into()));
    }
    let es =
        rows.iter().map(|r| r.es_forecast.ok_or_else(|| missing(r, "es_forecast"))).collect::<Result<Vec<_>, _>>()?;
    let quantiles: Vec<Vec<f64>> = (0..n).map(|k| rows.iter().map(|r| r.quantiles[k]).collect()).collect();
    let realized: Vec<f64> = rows.iter().map(|r| r.realized).collect();
    let report = backtest::es_quantile_backtest(&es, &quantiles, &realized, Level::quantile(level)?, significance)?;
    for leg in &report.legs {
        note_test(&format!("coverage at {}", leg.level), &leg.coverage, warnings);
        note_test(&format!("independence at {}", leg.level), &leg.independence, warnings);
    }
    let periods: Vec<i64> = rows.iter().map(|r| r.period).collect();
    let mut value = to_value(&report);
    if let Some(tail) = value.get_mut("tail_observations").and_then(Value::as_array_mut) {
        for obs in tail {
            let idx = obs["index"].as_u64().unwrap_or(0) as usize;
            obs["period"] = json!(periods[idx]);
        }
    }
    Ok(value)
}

fn backtest_pit(
    path: &Path,
    bins: usize,
    max_lag: usize,
    seed: u64,
    significance: f64,
    warnings: &mut Vec<String>,
) -> Result<Value, CliError> {
    let rows = parse_forecasts_csv(path)?;
    let records = rows.iter().map(ForecastRow::to_record).collect::<Result<Vec<_>, _>>()?;
    let realized: Vec<f64> = rows.iter().map(|r| r.realized).collect();
    let pit = backtest::pit_series(&records, &realized, seed)?;
    let uniformity = backtest::pit_uniformity_test(&pit, bins)?;
    let independence = backtest::pit_independence_test(&pit, max_lag, &DEFAULT_PIT_POWERS)?;
    note_test("independence", &independence.result, warnings);
    let pass = !uniformity.rejects(significance) && !independence.result.rejects(significance);
    Ok(json!({
        "periods": pit.len(),
        "seed": seed,
        "pit": pit.z,
        "uniformity": uniformity,
        "independence": independence,
        "pass": pass,
    }))
}

fn elicit(path: &Path, score: ScoreArg, level: Option<f64>, threshold: Option<f64>) -> Result<Value, CliError> {
    let sample = parse_sample_csv(path)?;
    let need_level = || level.ok_or_else(|| CliError::Config(format!("--level is required for {score:?}")));
    let s = match score {
        ScoreArg::Squared => ScoringFunction::SquaredError,
        ScoreArg::WeightedSquared => ScoringFunction::WeightedSquaredError(need_level()?),
        ScoreArg::Absolute => ScoringFunction::AbsoluteError,
        ScoreArg::WeightedAbsolute => ScoringFunction::WeightedAbsoluteError(need_level()?),
        ScoreArg::TailMean => ScoringFunction::TailMeanScore(
            threshold.ok_or_else(|| CliError::Config("--threshold is required for tail-mean".into()))?,
        ),
    };
    let value = scoring::elicit(s, &sample)?;
    let mut out = json!({
        "score": s,
        "n": sample.len(),
        "value": value,
        "mean_score": scoring::mean_score(s, value, &sample),
    });
    if let ScoringFunction::WeightedAbsoluteError(a) = s {
        out["two_step_es"] = to_value(&scoring::two_step_es_forecast(&sample, Level::quantile(a)?)?);
    }
    Ok(out)
}

fn counterexample(kind: SearchArg, level: f64) -> Result<Value, CliError> {
    match kind {
        SearchArg::Expectile => {
            let grid = ComonotoneGrid::default();
            let (_, found) = backtest::find_expectile_comonotone_counterexample(Level::expectile(level)?, &grid)?;
            Ok(json!({ "kind": "expectile-comonotone-additivity", "grid": grid, "counterexample": found }))
        }
        SearchArg::Var => {
            let space = VarSearchSpace::default();
            let found = backtest::find_var_superadditivity_example(Level::quantile(level)?, &space)?;
            Ok(json!({ "kind": "var-superadditivity", "counterexample": found }))
        }
    }
}

/// Executes one configured run. Errors are input or configuration problems.
pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    config.validate().map_err(CliError::Config)?;
    let mut warnings = Vec::new();
    let result = match &config.command {
        Command::Measure { input, kind, level } => measure(&parse_panel_csv(input)?, measure_kind(*kind, *level)?)?,
        Command::Allocate { input, kind, level } => {
            if !matches!(kind, MeasureArg::Es | MeasureArg::Expectile) {
                return Err(CliError::Config("allocation supports es and expectile".into()));
            }
            allocate(&parse_panel_csv(input)?, measure_kind(*kind, Some(*level))?, &mut warnings)?
        }
        Command::Diversify { input, kind, level } => {
            diversify(&parse_panel_csv(input)?, measure_kind(*kind, *level)?, &mut warnings)?
        }
        Command::BacktestVar { forecasts, level } => {
            backtest_var(forecasts, *level, config.significance, &mut warnings)?
        }
        Command::BacktestEs { forecasts, level } => backtest_es(forecasts, *level, config.significance, &mut warnings)?,
        Command::BacktestPit { forecasts, max_lag } => {
            backtest_pit(forecasts, config.bins, *max_lag, config.seed, config.significance, &mut warnings)?
        }
        Command::Elicit { input, score, level, threshold } => elicit(input, *score, *level, *threshold)?,
        Command::Counterexample { kind, level } => counterexample(*kind, *level)?,
    };
    Ok(Report { tool: "riskmeas", version: env!("CARGO_PKG_VERSION"), config: config.clone(), result, warnings })
}
