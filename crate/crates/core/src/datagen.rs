//! Simulated two-condition studies with one confounding covariate.
//!
//! For item i in group g ∈ {0, 1}:
//!
//! ```text
//! x_i = d_conf · g + z_i
//! y_i = d_manip · g + r · x_i + sqrt(1 - r²) · e_i
//! ```
//!
//! with z, e independent standard normals. Within each group x and y have
//! unit variance and correlation r, so every effect size is in Cohen's d
//! units. The raw covariate (not its group-centred version) enters y, so the
//! naive group contrast in y is shifted by r · d_conf.

use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::error::ConfigError;
use crate::stats::TTestKind;
use crate::stochastics::Stream;

fn default_alpha() -> f64 {
    0.05
}

/// One simulated study design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub n_per_group: usize,
    pub d_manip: f64,
    pub d_conf: f64,
    pub r: f64,
    #[serde(default = "default_alpha")]
    pub alpha_balance: f64,
    #[serde(default = "default_alpha")]
    pub alpha_outcome: f64,
    pub n_replicates: u64,
    pub seed: u64,
    /// Test used for the balance gate and the naive outcome contrast.
    #[serde(default)]
    pub t_test: TTestKind,
}

impl Default for SimulationConfig {
    /// 20 items per group, d_manip = 2, d_conf = 1, r = 0.75, α = 0.05.
    fn default() -> Self {
        Self {
            n_per_group: 20,
            d_manip: 2.0,
            d_conf: 1.0,
            r: 0.75,
            alpha_balance: 0.05,
            alpha_outcome: 0.05,
            n_replicates: 10_000,
            seed: 1,
            t_test: TTestKind::Welch,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_per_group < 2 {
            return Err(ConfigError::new("n_per_group", "must be at least 2"));
        }
        for (field, v) in [("d_manip", self.d_manip), ("d_conf", self.d_conf)] {
            if !v.is_finite() {
                return Err(ConfigError::new(field, "must be a finite number"));
            }
        }
        if self.r.is_nan() || self.r.abs() > 1.0 {
            return Err(ConfigError::new("r", format!("must lie in [-1, 1], got {}", self.r)));
        }
        for (field, a) in [
            ("alpha_balance", self.alpha_balance),
            ("alpha_outcome", self.alpha_outcome),
        ] {
            if !(a > 0.0 && a < 1.0) {
                return Err(ConfigError::new(field, format!("must lie in (0, 1), got {a}")));
            }
        }
        if self.n_replicates < 1 {
            return Err(ConfigError::new("n_replicates", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub item: Option<String>,
    pub group: u8,
    pub covariate: f64,
    pub outcome: f64,
}

/// A realized two-group study.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub rows: Vec<Row>,
}

impl Dataset {
    fn column_by_group(&self, group: u8, pick: impl Fn(&Row) -> f64) -> Vec<f64> {
        self.rows.iter().filter(|r| r.group == group).map(pick).collect()
    }

    pub fn covariate(&self, group: u8) -> Vec<f64> {
        self.column_by_group(group, |r| r.covariate)
    }

    pub fn outcome(&self, group: u8) -> Vec<f64> {
        self.column_by_group(group, |r| r.outcome)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Writes `item,group,covariate,outcome` CSV. Floats use the shortest
    /// representation that round-trips.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "item,group,covariate,outcome")?;
        for (i, r) in self.rows.iter().enumerate() {
            match &r.item {
                Some(id) => write!(out, "{id}")?,
                None => write!(out, "{i}")?,
            }
            writeln!(out, ",{},{:?},{:?}", r.group, r.covariate, r.outcome)?;
        }
        Ok(())
    }
}

/// Draw order: all z for group 0, all e for group 0, then the same for group 1.
pub fn generate_dataset(config: &SimulationConfig, stream: &mut Stream) -> Result<Dataset, ConfigError> {
    config.validate()?;
    let n = config.n_per_group;
    let noise_scale = (1.0 - config.r * config.r).max(0.0).sqrt();
    let mut rows = Vec::with_capacity(2 * n);
    let mut z = Vec::with_capacity(n);
    let mut e = Vec::with_capacity(n);
    for group in 0..2u8 {
        z.clear();
        e.clear();
        stream.fill_standard_normal(&mut z, n);
        stream.fill_standard_normal(&mut e, n);
        let g = f64::from(group);
        for i in 0..n {
            let covariate = config.d_conf * g + z[i];
            let outcome = config.d_manip * g + config.r * covariate + noise_scale * e[i];
            rows.push(Row {
                item: None,
                group,
                covariate,
                outcome,
            });
        }
    }
    Ok(Dataset { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{describe, pearson};
    use crate::stochastics::{make_stream, SeedSpec};

    fn config(n: usize, d_manip: f64, d_conf: f64, r: f64) -> SimulationConfig {
        SimulationConfig {
            n_per_group: n,
            d_manip,
            d_conf,
            r,
            ..SimulationConfig::default()
        }
    }

    #[test]
    fn validation_names_field() {
        let mut c = config(20, 2.0, 1.0, 1.5);
        assert_eq!(c.validate().unwrap_err().field, "r");
        c.r = 0.5;
        c.n_per_group = 1;
        assert_eq!(c.validate().unwrap_err().field, "n_per_group");
        c.n_per_group = 5;
        c.alpha_balance = 1.0;
        assert_eq!(c.validate().unwrap_err().field, "alpha_balance");
        c.alpha_balance = 0.05;
        c.alpha_outcome = 0.0;
        assert_eq!(c.validate().unwrap_err().field, "alpha_outcome");
        c.alpha_outcome = 0.05;
        c.n_replicates = 0;
        assert_eq!(c.validate().unwrap_err().field, "n_replicates");
        c.n_replicates = 1;
        c.d_conf = f64::NAN;
        assert_eq!(c.validate().unwrap_err().field, "d_conf");
    }

    #[test]
    fn sizes_and_labels() {
        let d = generate_dataset(&config(7, 1.0, 1.0, 0.5), &mut make_stream(SeedSpec::new(3, 0))).unwrap();
        assert_eq!(d.len(), 14);
        assert_eq!(d.covariate(0).len(), 7);
        assert_eq!(d.covariate(1).len(), 7);
        assert!(d.rows.iter().all(|r| r.covariate.is_finite() && r.outcome.is_finite()));
    }

    #[test]
    fn perfect_correlation_gives_outcome_equal_covariate() {
        let d = generate_dataset(&config(50, 0.0, 0.0, 1.0), &mut make_stream(SeedSpec::new(8, 1))).unwrap();
        for row in &d.rows {
            assert_eq!(row.outcome, row.covariate);
        }
        let x: Vec<f64> = d.rows.iter().map(|r| r.covariate).collect();
        let y: Vec<f64> = d.rows.iter().map(|r| r.outcome).collect();
        assert_eq!(pearson(&x, &y), Some(1.0));
    }

    #[test]
    fn all_effects_off() {
        let d = generate_dataset(&config(100_000, 0.0, 0.0, 0.0), &mut make_stream(SeedSpec::new(11, 0))).unwrap();
        for g in 0..2 {
            let mx = crate::stats::mean(&d.covariate(g));
            let my = crate::stats::mean(&d.outcome(g));
            assert!(mx.abs() < 0.02 && my.abs() < 0.02);
        }
        let x: Vec<f64> = d.rows.iter().map(|r| r.covariate).collect();
        let y: Vec<f64> = d.rows.iter().map(|r| r.outcome).collect();
        assert!(pearson(&x, &y).unwrap().abs() < 0.01);
    }

    #[test]
    fn large_sample_moments() {
        let cfg = config(100_000, 2.0, 1.0, 0.75);
        let d = generate_dataset(&cfg, &mut make_stream(SeedSpec::new(2016, 0))).unwrap();
        let y = describe(&d.outcome(0), &d.outcome(1)).unwrap();
        // d_manip + r · d_conf
        assert!((y.mean_difference() - 2.75).abs() < 0.02, "{}", y.mean_difference());
        let x = describe(&d.covariate(0), &d.covariate(1)).unwrap();
        assert!((x.mean_difference() - 1.0).abs() < 0.02);
        for g in 0..2u8 {
            let (xs, ys) = (d.covariate(g), d.outcome(g));
            let sx = crate::stats::sample_variance(&xs).sqrt();
            let sy = crate::stats::sample_variance(&ys).sqrt();
            assert!((sx - 1.0).abs() < 0.01 && (sy - 1.0).abs() < 0.01, "sd x {sx} y {sy}");
            assert!((pearson(&xs, &ys).unwrap() - 0.75).abs() < 0.01);
        }
    }

    #[test]
    fn csv_export() {
        let d = generate_dataset(&config(2, 0.0, 0.0, 0.0), &mut make_stream(SeedSpec::new(1, 1))).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "item,group,covariate,outcome");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("0,0,"));
        assert!(lines[4].starts_with("3,1,"));
    }

    #[test]
    fn deterministic() {
        let cfg = config(10, 1.0, 0.5, 0.3);
        let a = generate_dataset(&cfg, &mut make_stream(SeedSpec::new(4, 4))).unwrap();
        let b = generate_dataset(&cfg, &mut make_stream(SeedSpec::new(4, 4))).unwrap();
        assert_eq!(a, b);
    }
}
