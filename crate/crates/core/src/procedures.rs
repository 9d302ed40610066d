//! The balance gate, the naive and covariate-adjusted outcome analyses, and
//! the Monte Carlo engine that measures their error rates.
//!
//! Replicate `i` of a run always draws from stream `(seed, i)`. Replicates
//! are evaluated in fixed-size chunks; within a chunk they run on the worker
//! pool and the per-replicate outcomes are then folded in index order, so a
//! summary is bit-identical for every worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::datagen::{generate_dataset, Dataset, SimulationConfig};
use crate::error::{ConfigError, SimulationError, StatsError};
use crate::stats::{ols_fit, two_sample_t_test, Design, RegressionFit, TTestKind, TestResult};
use crate::stochastics::{make_stream, SeedSpec};

const CHUNK: u64 = 4096;

/// Offset between root seeds of consecutive grid points.
const GRID_SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicateOutcome {
    pub balance_p: f64,
    pub balance_flagged: bool,
    pub naive_p: f64,
    pub naive_significant: bool,
    pub naive_estimate: f64,
    pub adjusted_p: f64,
    pub adjusted_significant: bool,
    pub adjusted_estimate: f64,
    pub covariate_estimate: f64,
    /// Flagged by the balance gate although the adjusted analysis reaches the
    /// correct conclusion about the manipulation.
    pub unnecessary_flag: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub config: SimulationConfig,
    pub n_replicates: u64,
    pub flag_rate: f64,
    pub unnecessary_flag_rate: f64,
    pub naive_power_or_type1: f64,
    pub adjusted_power_or_type1: f64,
    pub mean_naive_estimate: f64,
    pub mean_adjusted_estimate: f64,
    pub mean_covariate_estimate: f64,
    /// Not serialized: the JSON form must be reproducible byte for byte.
    #[serde(skip)]
    pub wall_time: Duration,
}

pub const SUMMARY_CSV_HEADER: &str = "n_per_group,d_manip,d_conf,r,alpha_balance,alpha_outcome,\
n_replicates,seed,t_test,flag_rate,unnecessary_flag_rate,naive_power_or_type1,\
adjusted_power_or_type1,mean_naive_estimate,mean_adjusted_estimate,mean_covariate_estimate";

impl MonteCarloSummary {
    pub fn csv_row(&self) -> String {
        let c = &self.config;
        let t_test = match c.t_test {
            TTestKind::Welch => "welch",
            TTestKind::Student => "student",
        };
        format!(
            "{},{:?},{:?},{:?},{:?},{:?},{},{},{},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
            c.n_per_group,
            c.d_manip,
            c.d_conf,
            c.r,
            c.alpha_balance,
            c.alpha_outcome,
            c.n_replicates,
            c.seed,
            t_test,
            self.flag_rate,
            self.unnecessary_flag_rate,
            self.naive_power_or_type1,
            self.adjusted_power_or_type1,
            self.mean_naive_estimate,
            self.mean_adjusted_estimate,
            self.mean_covariate_estimate,
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

pub fn write_summaries_csv<W: Write>(mut out: W, summaries: &[MonteCarloSummary]) -> std::io::Result<()> {
    writeln!(out, "{SUMMARY_CSV_HEADER}")?;
    for s in summaries {
        writeln!(out, "{}", s.csv_row())?;
    }
    Ok(())
}

/// The balance check: a t-test on the covariate by group. Returns the p-value
/// and whether the set would be rejected as confounded.
pub fn run_balance_gate(
    data: &Dataset,
    alpha_balance: f64,
    kind: TTestKind,
) -> Result<(f64, bool), StatsError> {
    let test = two_sample_t_test(&data.covariate(1), &data.covariate(0), kind)?;
    Ok((test.p_value, test.p_value < alpha_balance))
}

/// t-test on the outcome, group 1 minus group 0.
pub fn run_naive_analysis(
    data: &Dataset,
    alpha_outcome: f64,
    kind: TTestKind,
) -> Result<(TestResult, bool), StatsError> {
    let test = two_sample_t_test(&data.outcome(1), &data.outcome(0), kind)?;
    Ok((test, test.p_value < alpha_outcome))
}

/// Regression of the outcome on `[intercept, group, covariate]`; the `group`
/// coefficient is the adjusted manipulation effect.
pub fn run_adjusted_analysis(
    data: &Dataset,
    alpha_outcome: f64,
) -> Result<(RegressionFit, bool), StatsError> {
    let group: Vec<f64> = data.rows.iter().map(|r| f64::from(r.group)).collect();
    let covariate: Vec<f64> = data.rows.iter().map(|r| r.covariate).collect();
    let outcome: Vec<f64> = data.rows.iter().map(|r| r.outcome).collect();
    let design = Design::with_intercept(
        vec!["group".into(), "covariate".into()],
        vec![group, covariate],
    )?;
    let fit = ols_fit(&design, &outcome)?;
    let significant = fit.p_values[1] < alpha_outcome;
    Ok((fit, significant))
}

pub fn run_replicate(config: &SimulationConfig, replicate_index: u64) -> Result<ReplicateOutcome, SimulationError> {
    let mut stream = make_stream(SeedSpec::new(config.seed, replicate_index));
    let data = generate_dataset(config, &mut stream)?;
    let wrap = |source| SimulationError::Replicate {
        index: replicate_index,
        source,
    };
    let (balance_p, balance_flagged) =
        run_balance_gate(&data, config.alpha_balance, config.t_test).map_err(wrap)?;
    let (naive, naive_significant) =
        run_naive_analysis(&data, config.alpha_outcome, config.t_test).map_err(wrap)?;
    let (fit, adjusted_significant) = run_adjusted_analysis(&data, config.alpha_outcome).map_err(wrap)?;
    let adjusted_correct = if config.d_manip != 0.0 {
        adjusted_significant
    } else {
        !adjusted_significant
    };
    Ok(ReplicateOutcome {
        balance_p,
        balance_flagged,
        naive_p: naive.p_value,
        naive_significant,
        naive_estimate: naive.estimate,
        adjusted_p: fit.p_values[1],
        adjusted_significant,
        adjusted_estimate: fit.coefficients[1],
        covariate_estimate: fit.coefficients[2],
        unnecessary_flag: balance_flagged && adjusted_correct,
    })
}

#[derive(Default)]
struct Totals {
    flagged: u64,
    unnecessary: u64,
    naive: u64,
    adjusted: u64,
    naive_sum: f64,
    adjusted_sum: f64,
    covariate_sum: f64,
}

impl Totals {
    fn add(&mut self, o: &ReplicateOutcome) {
        self.flagged += u64::from(o.balance_flagged);
        self.unnecessary += u64::from(o.unnecessary_flag);
        self.naive += u64::from(o.naive_significant);
        self.adjusted += u64::from(o.adjusted_significant);
        self.naive_sum += o.naive_estimate;
        self.adjusted_sum += o.adjusted_estimate;
        self.covariate_sum += o.covariate_estimate;
    }
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool, SimulationError> {
    if workers == 0 {
        return Err(ConfigError::new("workers", "must be at least 1").into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SimulationError::Pool(e.to_string()))
}

fn simulate_in(pool: &rayon::ThreadPool, config: &SimulationConfig) -> Result<MonteCarloSummary, SimulationError> {
    config.validate()?;
    let started = Instant::now();
    let n = config.n_replicates;
    let mut totals = Totals::default();
    let mut start = 0;
    while start < n {
        let end = (start + CHUNK).min(n);
        let outcomes: Vec<Result<ReplicateOutcome, SimulationError>> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map(|i| run_replicate(config, i))
                .collect()
        });
        for o in outcomes {
            totals.add(&o?);
        }
        start = end;
    }
    let nf = n as f64;
    Ok(MonteCarloSummary {
        config: *config,
        n_replicates: n,
        flag_rate: totals.flagged as f64 / nf,
        unnecessary_flag_rate: totals.unnecessary as f64 / nf,
        naive_power_or_type1: totals.naive as f64 / nf,
        adjusted_power_or_type1: totals.adjusted as f64 / nf,
        mean_naive_estimate: totals.naive_sum / nf,
        mean_adjusted_estimate: totals.adjusted_sum / nf,
        mean_covariate_estimate: totals.covariate_sum / nf,
        wall_time: started.elapsed(),
    })
}

pub fn run_simulation(config: &SimulationConfig, workers: usize) -> Result<MonteCarloSummary, SimulationError> {
    let pool = build_pool(workers)?;
    simulate_in(&pool, config)
}

/// A configuration field that a grid can sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridAxis {
    NPerGroup,
    DManip,
    DConf,
    R,
}

impl GridAxis {
    pub fn name(self) -> &'static str {
        match self {
            GridAxis::NPerGroup => "n_per_group",
            GridAxis::DManip => "d_manip",
            GridAxis::DConf => "d_conf",
            GridAxis::R => "r",
        }
    }

    /// `base` with this axis set to `value`, validated.
    pub fn apply(self, base: &SimulationConfig, value: f64) -> Result<SimulationConfig, ConfigError> {
        let mut c = *base;
        match self {
            GridAxis::NPerGroup => {
                if !(value.fract() == 0.0 && value >= 0.0 && value <= u32::MAX as f64) {
                    return Err(ConfigError::new(
                        "n_per_group",
                        format!("grid value {value} is not a whole number"),
                    ));
                }
                c.n_per_group = value as usize;
            }
            GridAxis::DManip => c.d_manip = value,
            GridAxis::DConf => c.d_conf = value,
            GridAxis::R => c.r = value,
        }
        c.validate()?;
        Ok(c)
    }
}

impl FromStr for GridAxis {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "n_per_group" => Ok(GridAxis::NPerGroup),
            "d_manip" => Ok(GridAxis::DManip),
            "d_conf" => Ok(GridAxis::DConf),
            "r" => Ok(GridAxis::R),
            other => Err(ConfigError::new(
                "grid_axis",
                format!("unknown axis `{other}` (expected n_per_group, d_manip, d_conf or r)"),
            )),
        }
    }
}

/// One summary per value. Grid point `i` is seeded with
/// `base.seed + i · GRID_SEED_STRIDE` (wrapping), so point 0 reproduces
/// `run_simulation(base)` and every other point draws fresh streams.
pub fn run_grid(
    base: &SimulationConfig,
    axis: GridAxis,
    values: &[f64],
    workers: usize,
) -> Result<Vec<MonteCarloSummary>, SimulationError> {
    let configs = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut c = axis.apply(base, v)?;
            c.seed = base.seed.wrapping_add((i as u64).wrapping_mul(GRID_SEED_STRIDE));
            Ok(c)
        })
        .collect::<Result<Vec<_>, ConfigError>>()?;
    if configs.is_empty() {
        return Ok(Vec::new());
    }
    let pool = build_pool(workers)?;
    configs.iter().map(|c| simulate_in(&pool, c)).collect()
}
