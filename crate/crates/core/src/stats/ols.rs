//! Multiple regression by Householder QR.
//!
//! Columns are reduced left to right. A column whose residual norm after
//! projecting out the earlier columns falls below `RANK_TOLERANCE` times its
//! own norm is reported as dependent; every such column is collected before
//! the fit is refused, so the caller sees the full list.

use serde::{Deserialize, Serialize};

use super::distribution::two_sided_p;
use crate::error::{DependentColumn, StatsError};

pub const RANK_TOLERANCE: f64 = 1e-10;

/// Residual norms at or below this fraction of ‖y‖ are treated as an exact fit.
pub const EXACT_FIT_TOLERANCE: f64 = 1e-10;

/// An n × p design matrix stored column-major, with one name per column.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    n: usize,
}

impl Design {
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self, StatsError> {
        if names.len() != columns.len() {
            return Err(StatsError::DimensionMismatch(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        let n = columns.first().map_or(0, Vec::len);
        if let Some((i, _)) = columns.iter().enumerate().find(|(_, c)| c.len() != n) {
            return Err(StatsError::DimensionMismatch(format!(
                "column `{}` has {} rows, expected {n}",
                names[i],
                columns[i].len()
            )));
        }
        if let Some(i) = columns.iter().position(|c| c.iter().any(|v| !v.is_finite())) {
            return Err(StatsError::NonFinite(format!("design column `{}`", names[i])));
        }
        Ok(Self { names, columns, n })
    }

    /// Prepends an `(intercept)` column of ones.
    pub fn with_intercept(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self, StatsError> {
        let n = columns.first().map_or(0, Vec::len);
        let mut all_names = vec!["(intercept)".to_string()];
        all_names.extend(names);
        let mut all_cols = vec![vec![1.0; n]];
        all_cols.extend(columns);
        Self::new(all_names, all_cols)
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub p_values: Vec<f64>,
    pub residual_df: usize,
    pub sigma2: f64,
    pub residuals: Vec<f64>,
}

impl RegressionFit {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

fn norm(v: &[f64]) -> f64 {
    // scaled to avoid overflow on large entries
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * v.iter().map(|x| (x / scale) * (x / scale)).sum::<f64>().sqrt()
}

/// Householder reflector `I - beta v vᵀ` acting on rows `start..n`.
struct Reflector {
    start: usize,
    v: Vec<f64>,
    beta: f64,
}

impl Reflector {
    fn apply(&self, x: &mut [f64]) {
        let tail = &mut x[self.start..];
        let dot: f64 = self.v.iter().zip(tail.iter()).map(|(a, b)| a * b).sum();
        let s = self.beta * dot;
        for (t, v) in tail.iter_mut().zip(&self.v) {
            *t -= s * v;
        }
    }
}

pub fn ols_fit(design: &Design, response: &[f64]) -> Result<RegressionFit, StatsError> {
    let (n, p) = (design.nrows(), design.ncols());
    if response.len() != n {
        return Err(StatsError::DimensionMismatch(format!(
            "response has {} rows, design has {n}",
            response.len()
        )));
    }
    if response.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite("response".into()));
    }
    if p == 0 || n <= p {
        return Err(StatsError::Underdetermined { n, p });
    }

    let mut work: Vec<Vec<f64>> = design.columns.clone();
    let mut reflectors: Vec<Reflector> = Vec::with_capacity(p);
    let mut dependent = Vec::new();
    for j in 0..p {
        let original = norm(&design.columns[j]);
        let rank = reflectors.len();
        let (_, rest) = work.split_at_mut(j);
        let col = &mut rest[0];
        let alpha = norm(&col[rank..]);
        if original == 0.0 || alpha <= RANK_TOLERANCE * original {
            dependent.push(DependentColumn {
                index: j,
                name: design.names[j].clone(),
            });
            continue;
        }
        let x0 = col[rank];
        let diag = if x0 >= 0.0 { -alpha } else { alpha };
        let mut v: Vec<f64> = col[rank..].to_vec();
        v[0] -= diag;
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        let refl = Reflector {
            start: rank,
            v,
            beta: 2.0 / vtv,
        };
        col[rank] = diag;
        for x in col[rank + 1..].iter_mut() {
            *x = 0.0;
        }
        for later in rest.iter_mut().skip(1) {
            refl.apply(later);
        }
        reflectors.push(refl);
    }
    if !dependent.is_empty() {
        return Err(StatsError::Collinear(dependent));
    }

    // R is the leading p×p block of `work`; R[i][j] = work[j][i].
    let r = |i: usize, j: usize| work[j][i];
    let mut qty = response.to_vec();
    for refl in &reflectors {
        refl.apply(&mut qty);
    }
    let mut coefficients = vec![0.0; p];
    for i in (0..p).rev() {
        let s: f64 = (i + 1..p).map(|j| r(i, j) * coefficients[j]).sum();
        coefficients[i] = (qty[i] - s) / r(i, i);
    }

    // R⁻¹ by back substitution, one column at a time
    let mut r_inv = vec![vec![0.0; p]; p];
    for c in 0..p {
        for i in (0..=c).rev() {
            let rhs = if i == c { 1.0 } else { 0.0 };
            let s: f64 = (i + 1..=c).map(|j| r(i, j) * r_inv[j][c]).sum();
            r_inv[i][c] = (rhs - s) / r(i, i);
        }
    }
    let xtx_inv_diag: Vec<f64> = (0..p)
        .map(|i| r_inv[i].iter().map(|x| x * x).sum())
        .collect();

    let residuals: Vec<f64> = (0..n)
        .map(|row| {
            let fitted: f64 = (0..p).map(|j| design.columns[j][row] * coefficients[j]).sum();
            response[row] - fitted
        })
        .collect();
    let residual_df = n - p;
    let rss_norm = norm(&qty[p..]);
    let exact = rss_norm <= EXACT_FIT_TOLERANCE * norm(response);
    let sigma2 = if exact {
        0.0
    } else {
        rss_norm * rss_norm / residual_df as f64
    };

    let y_norm = norm(response);
    let mut standard_errors = Vec::with_capacity(p);
    let mut t_stats = Vec::with_capacity(p);
    let mut p_values = Vec::with_capacity(p);
    for k in 0..p {
        let se = (sigma2 * xtx_inv_diag[k]).sqrt();
        let t = if se > 0.0 {
            coefficients[k] / se
        } else {
            // exact fit: a coefficient indistinguishable from zero carries no evidence
            let scale = y_norm / norm(&design.columns[k]);
            if coefficients[k].abs() <= EXACT_FIT_TOLERANCE * scale {
                0.0
            } else {
                f64::INFINITY.copysign(coefficients[k])
            }
        };
        standard_errors.push(se);
        t_stats.push(t);
        p_values.push(two_sided_p(t, residual_df as f64)?);
    }

    Ok(RegressionFit {
        names: design.names.clone(),
        coefficients,
        standard_errors,
        t_stats,
        p_values,
        residual_df,
        sigma2,
        residuals,
    })
}
