//! Fixture runs whose reports are stored under `crates/cli/tests/golden`.
//! Arguments are relative to `crates/cli/tests/fixtures`.

pub const GOLDEN_CASES: &[(&str, &[&str])] = &[
    ("measure_es", &["measure", "--input", "uniform100.csv", "--kind", "es", "--level", "0.95"]),
    ("allocate_linear", &["allocate", "--input", "linear_split.csv", "--kind", "es", "--level", "0.95"]),
    ("allocate_expectile", &["allocate", "--input", "bernoulli.csv", "--kind", "expectile", "--level", "0.8"]),
    ("diversify_bernoulli", &["diversify", "--input", "bernoulli.csv", "--kind", "es", "--level", "0.75"]),
    ("backtest_var", &["backtest-var", "--forecasts", "var_forecasts.csv", "--level", "0.95"]),
    ("backtest_es", &["backtest-es", "--forecasts", "es_forecasts.csv", "--level", "0.975"]),
    ("backtest_pit", &["backtest-pit", "--forecasts", "pit_forecasts.csv", "--bins", "5", "--seed", "7"]),
    ("elicit_quantile", &["elicit", "--input", "uniform100.csv", "--score", "weighted-absolute", "--level", "0.95"]),
    ("counterexample_expectile", &["counterexample", "--kind", "expectile", "--level", "0.8"]),
    ("counterexample_var", &["counterexample", "--kind", "var", "--level", "0.95"]),
];
