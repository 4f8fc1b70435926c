//! CSV readers for loss panels and forecast files.

use std::fs;
use std::path::{Path, PathBuf};

use riskmeas_core::allocation::LossPanel;
use riskmeas_core::scoring::ForecastRecord;

use crate::error::CliError;

fn open(path: &Path) -> Result<csv::Reader<fs::File>, CliError> {
    let file = fs::File::open(path).map_err(|e| CliError::Io { path: path.to_path_buf(), message: e.to_string() })?;
    Ok(csv::ReaderBuilder::new().has_headers(true).flexible(true).trim(csv::Trim::All).from_reader(file))
}

fn parse_error(path: &Path, row: u64, column: Option<usize>, message: impl Into<String>) -> CliError {
    CliError::Parse { path: path.to_path_buf(), row, column, message: message.into() }
}

fn parse_cell(path: &Path, row: u64, column: usize, cell: &str) -> Result<f64, CliError> {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(parse_error(path, row, Some(column), format!("cannot parse {cell:?} as a number"))),
    }
}

/// Reads a loss panel: a header row of position names, then one numeric
/// row per scenario. Rows are 1-based with the header on row 1.
pub fn parse_panel_csv(path: &Path) -> Result<LossPanel, CliError> {
    let mut reader = open(path)?;
    let names: Vec<String> =
        reader.headers().map_err(|e| parse_error(path, 1, None, e.to_string()))?.iter().map(str::to_string).collect();
    if names.is_empty() || names.iter().all(String::is_empty) {
        return Err(parse_error(path, 1, None, "missing header row"));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let row = e.position().map_or(0, |p| p.line());
            parse_error(path, row, None, e.to_string())
        })?;
        let row = record.position().map_or(0, |p| p.line());
        if record.len() != names.len() {
            return Err(parse_error(
                path,
                row,
                None,
                format!("expected {} columns, found {}", names.len(), record.len()),
            ));
        }
        let values = record
            .iter()
            .enumerate()
            .map(|(c, cell)| parse_cell(path, row, c + 1, cell))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(parse_error(path, 2, None, "panel has no data rows"));
    }
    LossPanel::new(names, rows).map_err(CliError::from)
}

/// Reads a single-column (or portfolio-summed) sample from a panel file.
pub fn parse_sample_csv(path: &Path) -> Result<Vec<f64>, CliError> {
    Ok(parse_panel_csv(path)?.portfolio())
}

/// One row of a forecast file. Scenario files are only read on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastRow {
    pub period: i64,
    pub realized: f64,
    pub var_forecast: Option<f64>,
    pub es_forecast: Option<f64>,
    /// `q1, q2, ...` columns in level order
    pub quantiles: Vec<f64>,
    pub scenario_file: Option<PathBuf>,
}

impl ForecastRow {
    pub fn load_scenarios(&self) -> Result<Option<Vec<f64>>, CliError> {
        let Some(path) = &self.scenario_file else {
            return Ok(None);
        };
        let text = fs::read_to_string(path).map_err(|e| CliError::Io { path: path.clone(), message: e.to_string() })?;
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            values.push(parse_cell(path, i as u64 + 1, 1, line)?);
        }
        Ok(Some(values))
    }

    pub fn to_record(&self) -> Result<ForecastRecord, CliError> {
        let scenarios = self.load_scenarios()?;
        ForecastRecord::new(self.period, self.var_forecast, self.es_forecast, scenarios).map_err(CliError::from)
    }
}

/// Reads a forecast file with columns `period`, `realized` and any of
/// `var_forecast`, `es_forecast`, `q1..qn`, `scenario_file`. Scenario paths
/// are resolved relative to the forecast file.
pub fn parse_forecasts_csv(path: &Path) -> Result<Vec<ForecastRow>, CliError> {
    let mut reader = open(path)?;
    let headers: Vec<String> =
        reader.headers().map_err(|e| parse_error(path, 1, None, e.to_string()))?.iter().map(str::to_string).collect();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let period_col = find("period").ok_or_else(|| parse_error(path, 1, None, "missing period column"))?;
    let realized_col = find("realized").ok_or_else(|| parse_error(path, 1, None, "missing realized column"))?;
    let var_col = find("var_forecast");
    let es_col = find("es_forecast");
    let scenario_col = find("scenario_file");
    let mut quantile_cols = Vec::new();
    for k in 1.. {
        match find(&format!("q{k}")) {
            Some(c) => quantile_cols.push(c),
            None => break,
        }
    }
    let base = path.parent().unwrap_or_else(|| Path::new("."));

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let row = e.position().map_or(0, |p| p.line());
            parse_error(path, row, None, e.to_string())
        })?;
        let row = record.position().map_or(0, |p| p.line());
        if record.len() != headers.len() {
            return Err(parse_error(
                path,
                row,
                None,
                format!("expected {} columns, found {}", headers.len(), record.len()),
            ));
        }
        let optional = |col: Option<usize>| -> Result<Option<f64>, CliError> {
            match col.map(|c| (c, &record[c])) {
                Some((c, cell)) if !cell.is_empty() => parse_cell(path, row, c + 1, cell).map(Some),
                _ => Ok(None),
            }
        };
        let period_cell = &record[period_col];
        let period = period_cell.parse::<i64>().map_err(|_| {
            parse_error(path, row, Some(period_col + 1), format!("cannot parse {period_cell:?} as a period"))
        })?;
        let realized = parse_cell(path, row, realized_col + 1, &record[realized_col])?;
        let quantiles =
            quantile_cols.iter().map(|&c| parse_cell(path, row, c + 1, &record[c])).collect::<Result<Vec<_>, _>>()?;
        let scenario_file = match scenario_col.map(|c| (c, &record[c])) {
            Some((c, cell)) if !cell.is_empty() => {
                let p = base.join(cell);
                if !p.is_file() {
                    return Err(parse_error(
                        path,
                        row,
                        Some(c + 1),
                        format!("scenario file {} does not exist", p.display()),
                    ));
                }
                Some(p)
            }
            _ => None,
        };
        rows.push(ForecastRow {
            period,
            realized,
            var_forecast: optional(var_col)?,
            es_forecast: optional(es_col)?,
            quantiles,
            scenario_file,
        });
    }
    if rows.is_empty() {
        return Err(parse_error(path, 2, None, "forecast file has no data rows"));
    }
    Ok(rows)
}
