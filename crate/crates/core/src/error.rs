use thiserror::Error;

/// An invalid configuration value, tagged with the offending field name.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid `{field}`: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

/// A column flagged as linearly dependent on earlier design columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DependentColumn {
    pub index: usize,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("{what} needs at least {needed} observations, got {got}")]
    TooFewObservations {
        what: String,
        needed: usize,
        got: usize,
    },
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("design is rank deficient; dependent columns: {}", format_columns(.0))]
    Collinear(Vec<DependentColumn>),
    #[error("underdetermined fit: {n} observations for {p} parameters")]
    Underdetermined { n: usize, p: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
}

fn format_columns(cols: &[DependentColumn]) -> String {
    cols.iter()
        .map(|c| format!("{} (#{})", c.name, c.index))
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatchError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invalid cost matrix: {0}")]
    InvalidCost(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulationError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("replicate {index} failed: {source}")]
    Replicate {
        index: u64,
        #[source]
        source: StatsError,
    },
    #[error("worker pool: {0}")]
    Pool(String),
}
