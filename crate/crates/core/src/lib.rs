//! Risk measurement on finite discrete loss distributions.
//!
//! Losses are positive numbers and gains negative. The crate covers
//!
//! * [`distribution`]: discrete laws, quantiles, comonotone constructions and
//!   the Wasserstein-1 distance;
//! * [`measures`]: variance, VaR, Expected Shortfall and expectiles;
//! * [`scoring`]: scoring functions, empirical elicitation and the two-step
//!   ES forecast;
//! * [`allocation`]: Euler contributions and diversification indices;
//! * [`backtest`]: VaR/ES/PIT backtests and coherence counterexample
//!   searches.

pub mod allocation;
pub mod backtest;
pub mod comonotone;
pub mod distribution;
pub mod error;
pub mod measures;
pub mod scoring;
pub mod wasserstein;

pub use comonotone::{comonotone_sum, ComonotoneLaws, ComonotonePair};
pub use distribution::{DiscreteDistribution, Level, LevelKind};
pub use error::{Result, RiskError};
pub use measures::{ExpectileSolverConfig, MeasureKind};
pub use wasserstein::wasserstein1;
