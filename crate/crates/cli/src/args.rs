use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use confound_core::{Distance, GridAxis};

/// Describe stimulus balance, simulate covariate testing and match stimuli.
///
/// There is deliberately no command that runs a significance test on
/// stimulus properties: stimulus sets are finite and chosen, so a p-value
/// for their covariates answers no useful question. Report the size of
/// differences instead (`balance`) and model covariates in the analysis.
#[derive(Debug, Parser)]
#[command(name = "confound", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Descriptive balance report for a two-group dataset.
    Balance(BalanceArgs),
    /// Monte Carlo simulation of the balance-test procedure.
    Simulate(SimulateArgs),
    /// Pair items of two pools on their covariates.
    Match(MatchArgs),
    /// HTTP service for interactive simulation.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct BalanceArgs {
    /// Dataset CSV with a header row.
    pub input: PathBuf,
    /// Column holding the two group labels.
    #[arg(long, default_value = "group")]
    pub group_column: String,
    /// Identifier column, excluded from the report.
    #[arg(long, default_value = "item")]
    pub id_column: String,
    /// Outcome column; joins the correlation matrix only.
    #[arg(long, default_value = "outcome")]
    pub outcome_column: String,
    /// Also write the report as JSON.
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML file with SimulationConfig keys, optional grid_axis/grid_values
    /// and workers. Omitted keys take the default configuration.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Write the summary (or array of summaries) as JSON.
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Write one CSV row per summary.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_parser = parse_axis, requires = "grid_values")]
    pub grid_axis: Option<GridAxis>,
    /// Comma-separated values for the grid axis.
    #[arg(long, value_delimiter = ',', requires = "grid_axis", num_args = 1..)]
    pub grid_values: Option<Vec<f64>>,
}

fn parse_axis(s: &str) -> Result<GridAxis, String> {
    s.parse().map_err(|e: confound_core::ConfigError| e.message)
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Metric {
    L1,
    Euclidean,
}

impl From<Metric> for Distance {
    fn from(m: Metric) -> Self {
        match m {
            Metric::L1 => Distance::L1,
            Metric::Euclidean => Distance::Euclidean,
        }
    }
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    /// Pool CSV with schema `item,<covariate...>`.
    #[arg(long, value_name = "PATH")]
    pub pool_a: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub pool_b: PathBuf,
    /// Covariate weights as `name=value,...` (default: 1 for every covariate).
    #[arg(long, value_delimiter = ',', value_parser = parse_weight)]
    pub weights: Option<Vec<(String, f64)>>,
    /// Minimum total cost assignment (default).
    #[arg(long, conflicts_with = "greedy")]
    pub optimal: bool,
    /// Repeatedly take the cheapest remaining pair.
    #[arg(long)]
    pub greedy: bool,
    /// Largest admissible pair cost.
    #[arg(long)]
    pub caliper: Option<f64>,
    #[arg(long, value_enum, default_value = "l1")]
    pub metric: Metric,
    /// Pairs CSV `item_a,item_b,cost` (default: standard output).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Post-match balance report as JSON.
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
}

fn parse_weight(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("weight for `{name}` is not a number: `{value}`"))?;
    if !(v.is_finite() && v >= 0.0) {
        return Err(format!("weight for `{name}` must be finite and non-negative"));
    }
    Ok((name.trim().to_string(), v))
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub bind: SocketAddr,
    /// Worker threads per request.
    #[arg(long, default_value_t = 4)]
    pub workers: usize,
    /// Send permissive cross-origin headers.
    #[arg(long)]
    pub cors: bool,
    /// Largest total replicate count accepted per request.
    #[arg(long, default_value_t = 100_000)]
    pub max_replicates: u64,
}
