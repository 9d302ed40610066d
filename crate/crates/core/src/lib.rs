//! Tools for controlling nuisance variables in two-condition designs.
//!
//! * [`stochastics`]: reproducible per-replicate random streams.
//! * [`datagen`]: a generative model of a study whose outcome is partly
//!   driven by a covariate that differs between conditions.
//! * [`stats`]: descriptive statistics, t-tests, correlation matrices and
//!   least-squares regression.
//! * [`procedures`]: the covariate balance gate versus naive and
//!   covariate-adjusted outcome analyses, and the Monte Carlo engine that
//!   measures how often each gets the answer right.
//! * [`matching`]: optimal and greedy one-to-one matching of item pools,
//!   plus quantile blocking.
//! * [`balance`]: descriptive balance reports.

pub mod balance;
pub mod datagen;
pub mod error;
pub mod matching;
pub mod procedures;
pub mod stats;
pub mod stochastics;

pub use balance::{BalanceReport, CovariateBalance};
pub use datagen::{generate_dataset, Dataset, Row, SimulationConfig};
pub use error::{ConfigError, DependentColumn, MatchError, SimulationError, StatsError};
pub use matching::{
    cost_matrix, greedy_match, optimal_match, optimal_match_with_caliper, quantile_blocks, CostBuild,
    CostMatrix, Distance, Item, ItemPool, MatchedPair, Matching,
};
pub use procedures::{
    run_adjusted_analysis, run_balance_gate, run_grid, run_naive_analysis, run_replicate, run_simulation,
    GridAxis, MonteCarloSummary, ReplicateOutcome,
};
pub use stats::{
    correlation_matrix, describe, ols_fit, student_t_cdf, welch_t_test, CorrelationMatrix, Design,
    DescriptiveSummary, RegressionFit, TTestKind, TestResult,
};
pub use stochastics::{make_stream, sample_standard_normal, SeedSpec, Stream};
