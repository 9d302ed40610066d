use serde::{Deserialize, Serialize};

use crate::error::StatsError;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance with divisor n - 1 (two-pass).
pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Two-group descriptive comparison. Group A is treated as group 0 and B as
/// group 1, so `cohens_d` is positive when B has the larger mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveSummary {
    pub n0: usize,
    pub n1: usize,
    pub mean0: f64,
    pub mean1: f64,
    pub sd0: f64,
    pub sd1: f64,
    pub pooled_sd: f64,
    /// `None` when the pooled SD is zero.
    pub cohens_d: Option<f64>,
}

impl DescriptiveSummary {
    pub fn mean_difference(&self) -> f64 {
        self.mean1 - self.mean0
    }
}

pub fn describe(group_a: &[f64], group_b: &[f64]) -> Result<DescriptiveSummary, StatsError> {
    for (label, g) in [("group A", group_a), ("group B", group_b)] {
        if g.len() < 2 {
            return Err(StatsError::TooFewObservations {
                what: label.into(),
                needed: 2,
                got: g.len(),
            });
        }
        if g.iter().any(|x| !x.is_finite()) {
            return Err(StatsError::NonFinite(label.into()));
        }
    }
    let (n0, n1) = (group_a.len(), group_b.len());
    let (var0, var1) = (sample_variance(group_a), sample_variance(group_b));
    let pooled_var =
        ((n0 - 1) as f64 * var0 + (n1 - 1) as f64 * var1) / (n0 + n1 - 2) as f64;
    let pooled_sd = pooled_var.sqrt();
    let mean0 = mean(group_a);
    let mean1 = mean(group_b);
    let cohens_d = (pooled_sd > 0.0).then(|| (mean1 - mean0) / pooled_sd);
    Ok(DescriptiveSummary {
        n0,
        n1,
        mean0,
        mean1,
        sd0: var0.sqrt(),
        sd1: var1.sqrt(),
        pooled_sd,
        cohens_d,
    })
}
