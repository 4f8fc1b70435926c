//! Backtesting of VaR, ES and distribution forecasts, plus finite
//! counterexample searches for coherence properties.

mod calibration;
mod es;
mod pit;
mod search;
mod violation;

pub use calibration::{rejection_rate, replication_rng, replication_seed, ReplicationRng};
pub use es::{
    es_quantile_approximation, es_quantile_backtest, es_support_levels, EsBacktestLeg, EsBacktestReport,
    TailObservation, DEFAULT_SUPPORT_POINTS,
};
pub use pit::{
    pit_independence_test, pit_series, pit_series_from_sets, pit_transform, pit_transform_with, pit_uniformity_test,
    PitSeries, PortmanteauComponent, PortmanteauReport, DEFAULT_PIT_BINS, DEFAULT_PIT_MAX_LAG, DEFAULT_PIT_POWERS,
};
pub use search::{
    comonotone_pairs, enumerate_joint_laws, find_expectile_comonotone_counterexample, find_var_superadditivity_example,
    var_superadditivity_instances, ComonotoneCounterexample, ComonotoneGrid, JointGrid, JointLaw, VarSearchSpace,
    VarSuperadditivity,
};
pub use tests::{
    independence_test, independence_test_permutation, unconditional_coverage_test, TestResult, EXACT_BINOMIAL_LIMIT,
    REPORTED_LEVELS,
};
pub use violation::{violation_process, ViolationSeries};
