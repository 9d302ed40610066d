//! Two-sample t-tests. All p-values are two-sided.

use serde::{Deserialize, Serialize};

use super::descriptive::{mean, sample_variance};
use super::distribution::two_sided_p;
use crate::error::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TTestKind {
    /// Unequal variances, Welch–Satterthwaite degrees of freedom.
    #[default]
    Welch,
    /// Pooled variance, n0 + n1 - 2 degrees of freedom.
    Student,
}

impl std::str::FromStr for TTestKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "welch" => Ok(Self::Welch),
            "student" => Ok(Self::Student),
            other => Err(format!("unknown t-test kind `{other}` (expected welch or student)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub df: f64,
    pub p_value: f64,
    /// mean(A) - mean(B)
    pub estimate: f64,
}

fn check_group(label: &str, g: &[f64]) -> Result<(), StatsError> {
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
    Ok(())
}

pub fn welch_t_test(group_a: &[f64], group_b: &[f64]) -> Result<TestResult, StatsError> {
    two_sample_t_test(group_a, group_b, TTestKind::Welch)
}

pub fn student_t_test(group_a: &[f64], group_b: &[f64]) -> Result<TestResult, StatsError> {
    two_sample_t_test(group_a, group_b, TTestKind::Student)
}

/// Tests H0: mean(A) = mean(B).
///
/// Both groups constant with equal means gives t = 0, p = 1. Any other
/// zero-variance group is rejected as degenerate.
pub fn two_sample_t_test(
    group_a: &[f64],
    group_b: &[f64],
    kind: TTestKind,
) -> Result<TestResult, StatsError> {
    check_group("group A", group_a)?;
    check_group("group B", group_b)?;
    let (na, nb) = (group_a.len() as f64, group_b.len() as f64);
    let (ma, mb) = (mean(group_a), mean(group_b));
    let (va, vb) = (sample_variance(group_a), sample_variance(group_b));
    let estimate = ma - mb;
    let pooled_df = na + nb - 2.0;

    if va == 0.0 || vb == 0.0 {
        if va == 0.0 && vb == 0.0 && estimate == 0.0 {
            return Ok(TestResult {
                statistic: 0.0,
                df: pooled_df,
                p_value: 1.0,
                estimate,
            });
        }
        return Err(StatsError::DegenerateData(
            "zero variance in a group".into(),
        ));
    }

    let (se, df) = match kind {
        TTestKind::Welch => {
            let (sa, sb) = (va / na, vb / nb);
            let s = sa + sb;
            let df = s * s / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
            (s.sqrt(), df)
        }
        TTestKind::Student => {
            let pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / pooled_df;
            ((pooled * (1.0 / na + 1.0 / nb)).sqrt(), pooled_df)
        }
    };
    let statistic = estimate / se;
    Ok(TestResult {
        statistic,
        df,
        p_value: two_sided_p(statistic, df)?,
        estimate,
    })
}
