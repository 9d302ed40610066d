//! Run descriptions shared by the config file and the HTTP request body.
//!
//! Both accept the `SimulationConfig` field names plus an optional grid.
//! Omitted simulation fields take the default values
//! (`SimulationConfig::default()`); unknown keys are rejected.

use confound_core::{ConfigError, GridAxis, SimulationConfig, TTestKind};
use serde::Deserialize;

macro_rules! run_fields {
    ($(#[$meta:meta])* $name:ident { $($(#[$fmeta:meta])* $extra:ident : $ty:ty),* $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Default, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            pub n_per_group: Option<usize>,
            pub d_manip: Option<f64>,
            pub d_conf: Option<f64>,
            pub r: Option<f64>,
            pub alpha_balance: Option<f64>,
            pub alpha_outcome: Option<f64>,
            pub n_replicates: Option<u64>,
            pub seed: Option<u64>,
            pub t_test: Option<TTestKind>,
            pub grid_axis: Option<GridAxis>,
            pub grid_values: Option<Vec<f64>>,
            $($(#[$fmeta])* pub $extra: $ty,)*
        }

        impl $name {
            /// The simulation config with omitted fields defaulted, validated.
            pub fn config(&self) -> Result<SimulationConfig, ConfigError> {
                let d = SimulationConfig::default();
                let c = SimulationConfig {
                    n_per_group: self.n_per_group.unwrap_or(d.n_per_group),
                    d_manip: self.d_manip.unwrap_or(d.d_manip),
                    d_conf: self.d_conf.unwrap_or(d.d_conf),
                    r: self.r.unwrap_or(d.r),
                    alpha_balance: self.alpha_balance.unwrap_or(d.alpha_balance),
                    alpha_outcome: self.alpha_outcome.unwrap_or(d.alpha_outcome),
                    n_replicates: self.n_replicates.unwrap_or(d.n_replicates),
                    seed: self.seed.unwrap_or(d.seed),
                    t_test: self.t_test.unwrap_or(d.t_test),
                };
                c.validate()?;
                Ok(c)
            }

            pub fn grid(&self) -> Result<Option<Grid>, ConfigError> {
                resolve_grid(self.grid_axis, self.grid_values.clone())
            }
        }
    };
}

run_fields!(
    /// Contents of a `simulate --config` TOML file.
    RunConfigFile {
        workers: Option<usize>,
    }
);

run_fields!(
    /// Body of `POST /simulate`.
    SimulateRequest {
        request_id: Option<String>,
    }
);

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub axis: GridAxis,
    pub values: Vec<f64>,
}

pub fn resolve_grid(axis: Option<GridAxis>, values: Option<Vec<f64>>) -> Result<Option<Grid>, ConfigError> {
    match (axis, values) {
        (None, None) => Ok(None),
        (Some(_), None) => Err(ConfigError::new("grid_values", "required when grid_axis is set")),
        (None, Some(_)) => Err(ConfigError::new("grid_axis", "required when grid_values is set")),
        (Some(axis), Some(values)) => {
            if values.is_empty() {
                return Err(ConfigError::new("grid_values", "must list at least one value"));
            }
            Ok(Some(Grid { axis, values }))
        }
    }
}

/// A parse failure located at a field when the path or message names one.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub field: Option<String>,
    pub message: String,
}

impl std::fmt::Display for FieldError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.field {
            Some(field) => write!(f, "invalid `{field}`: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl From<ConfigError> for FieldError {
    fn from(e: ConfigError) -> Self {
        FieldError {
            field: Some(e.field),
            message: e.message,
        }
    }
}

fn located<E: std::fmt::Display>(err: serde_path_to_error::Error<E>) -> FieldError {
    let path = err.path().to_string();
    let message = err.inner().to_string();
    let field = unknown_field_name(&message).or_else(|| (!matches!(path.as_str(), "" | "." | "?")).then_some(path));
    FieldError { field, message }
}

fn unknown_field_name(message: &str) -> Option<String> {
    let rest = message.split("unknown field `").nth(1)?;
    rest.split('`').next().map(str::to_string)
}

pub fn parse_toml<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, FieldError> {
    let de = toml::Deserializer::parse(text).map_err(|e| FieldError {
        field: None,
        message: e.to_string(),
    })?;
    serde_path_to_error::deserialize(de).map_err(located)
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &[u8]) -> Result<T, FieldError> {
    let mut de = serde_json::Deserializer::from_slice(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(located)?;
    de.end().map_err(|e| FieldError {
        field: None,
        message: e.to_string(),
    })?;
    Ok(value)
}
