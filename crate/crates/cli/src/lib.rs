//! Command-line front end: reads CSV panels and forecast files, runs the
//! risk computations and emits a deterministic JSON report.

pub mod config;
pub mod error;
pub mod input;
pub mod run;

pub use config::RunConfig;
pub use error::{CliError, ErrorEntry};
pub use input::{parse_forecasts_csv, parse_panel_csv, ForecastRow};
pub use run::{run, Report};

/// Exit status for a completed run, whatever the test verdicts.
pub const EXIT_OK: i32 = 0;
/// Exit status for unreadable or invalid input.
pub const EXIT_INPUT_ERROR: i32 = 2;
