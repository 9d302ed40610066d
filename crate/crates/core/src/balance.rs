//! Descriptive balance reports.
//!
//! A report carries means, SDs, standardized differences and correlations.
//! It has no field for a test statistic or p-value; stimulus sets are judged
//! on the size of their differences, not on significance.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::error::StatsError;
use crate::matching::ItemPool;
use crate::stats::{correlation_matrix, describe, CorrelationMatrix, DescriptiveSummary};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariateBalance {
    pub name: String,
    pub summary: DescriptiveSummary,
    /// Pooled within-group SD is zero, so Cohen's d is undefined.
    pub zero_variance: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BalanceReport {
    /// Labels of group 0 and group 1; differences are group 1 minus group 0.
    pub groups: [String; 2],
    pub covariates: Vec<CovariateBalance>,
    pub correlations: CorrelationMatrix,
}

impl BalanceReport {
    /// `group[i]` ∈ {0, 1} labels row i of every column. `outcome`, when
    /// given, joins the correlation matrix but is not summarized per group.
    pub fn build(
        groups: [String; 2],
        group: &[u8],
        covariates: &[(String, Vec<f64>)],
        outcome: Option<&(String, Vec<f64>)>,
    ) -> Result<Self, StatsError> {
        let mut summaries = Vec::with_capacity(covariates.len());
        for (name, values) in covariates {
            if values.len() != group.len() {
                return Err(StatsError::DimensionMismatch(format!(
                    "column `{name}` has {} values for {} rows",
                    values.len(),
                    group.len()
                )));
            }
            let split = |g: u8| -> Vec<f64> {
                values
                    .iter()
                    .zip(group)
                    .filter(|(_, &lab)| lab == g)
                    .map(|(v, _)| *v)
                    .collect()
            };
            let summary = describe(&split(0), &split(1))?;
            summaries.push(CovariateBalance {
                name: name.clone(),
                zero_variance: summary.cohens_d.is_none(),
                summary,
            });
        }
        let mut cols: Vec<(String, Vec<f64>)> = covariates.to_vec();
        if let Some(o) = outcome {
            cols.push(o.clone());
        }
        let correlations = correlation_matrix(&cols)?;
        Ok(Self {
            groups,
            covariates: summaries,
            correlations,
        })
    }

    /// Balance of pool A (group 0) against pool B (group 1), pooling the
    /// items of both for the correlation matrix.
    pub fn from_pools(label_a: &str, pool_a: &ItemPool, label_b: &str, pool_b: &ItemPool) -> Result<Self, StatsError> {
        let mut group = vec![0u8; pool_a.len()];
        group.extend(std::iter::repeat_n(1u8, pool_b.len()));
        let cols: Vec<(String, Vec<f64>)> = pool_a
            .covariates()
            .iter()
            .enumerate()
            .map(|(c, name)| {
                let mut v = pool_a.column(c);
                v.extend(pool_b.column(c));
                (name.clone(), v)
            })
            .collect();
        Self::build([label_a.to_string(), label_b.to_string()], &group, &cols, None)
    }

    pub fn zero_variance_covariates(&self) -> Vec<&str> {
        self.covariates
            .iter()
            .filter(|c| c.zero_variance)
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let [g0, g1] = &self.groups;
        let _ = writeln!(
            out,
            "{:<16} {:>5} {:>10} {:>10} {:>5} {:>10} {:>10} {:>10} {:>10} {:>9}",
            "covariate",
            "n0",
            format!("mean[{}]", truncate(g0, 4)),
            "sd0",
            "n1",
            format!("mean[{}]", truncate(g1, 4)),
            "sd1",
            "diff",
            "pooled_sd",
            "cohen_d"
        );
        for c in &self.covariates {
            let s = &c.summary;
            let d = s.cohens_d.map_or("undefined".to_string(), |d| format!("{d:.3}"));
            let _ = writeln!(
                out,
                "{:<16} {:>5} {:>10.4} {:>10.4} {:>5} {:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>9}",
                truncate(&c.name, 16),
                s.n0,
                s.mean0,
                s.sd0,
                s.n1,
                s.mean1,
                s.sd1,
                s.mean_difference(),
                s.pooled_sd,
                d
            );
        }
        let zero = self.zero_variance_covariates();
        if !zero.is_empty() {
            let _ = writeln!(out, "zero within-group variance: {}", zero.join(", "));
        }
        let names = &self.correlations.names;
        if !names.is_empty() {
            let _ = writeln!(out, "\ncorrelations (all rows)");
            let _ = write!(out, "{:<16}", "");
            for n in names {
                let _ = write!(out, " {:>10}", truncate(n, 10));
            }
            let _ = writeln!(out);
            for (n, row) in names.iter().zip(&self.correlations.values) {
                let _ = write!(out, "{:<16}", truncate(n, 16));
                for v in row {
                    match v {
                        Some(r) => {
                            let _ = write!(out, " {r:>10.3}");
                        }
                        None => {
                            let _ = write!(out, " {:>10}", "undefined");
                        }
                    }
                }
                let _ = writeln!(out);
            }
        }
        out
    }
}

fn truncate(s: &str, width: usize) -> String {
    s.chars().take(width).collect()
}
