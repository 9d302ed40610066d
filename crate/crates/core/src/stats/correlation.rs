use serde::{Deserialize, Serialize};

use super::descriptive::mean;
use crate::error::StatsError;

/// Pairwise Pearson correlations. Rows and columns of a zero-variance
/// variable hold `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.names.iter().position(|n| n == a)?;
        let j = self.names.iter().position(|n| n == b)?;
        self.values[i][j]
    }

    /// Names of variables whose correlations are undefined.
    pub fn undefined(&self) -> Vec<&str> {
        self.names
            .iter()
            .zip(&self.values)
            .filter(|(_, row)| row.iter().all(Option::is_none))
            .map(|(n, _)| n.as_str())
            .collect()
    }
}

pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

pub fn correlation_matrix(columns: &[(String, Vec<f64>)]) -> Result<CorrelationMatrix, StatsError> {
    let len = columns.first().map_or(0, |(_, c)| c.len());
    for (name, c) in columns {
        if c.len() != len {
            return Err(StatsError::DimensionMismatch(format!(
                "column `{name}` has {} values, expected {len}",
                c.len()
            )));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite(format!("column `{name}`")));
        }
    }
    if !columns.is_empty() && len < 2 {
        return Err(StatsError::TooFewObservations {
            what: "correlation column".into(),
            needed: 2,
            got: len,
        });
    }
    let k = columns.len();
    let constant: Vec<bool> = columns
        .iter()
        .map(|(_, c)| c.iter().all(|v| *v == c[0]))
        .collect();
    let mut values = vec![vec![None; k]; k];
    for i in 0..k {
        if constant[i] {
            continue;
        }
        values[i][i] = Some(1.0);
        for j in i + 1..k {
            if constant[j] {
                continue;
            }
            let r = pearson(&columns[i].1, &columns[j].1);
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(CorrelationMatrix {
        names: columns.iter().map(|(n, _)| n.clone()).collect(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(name: &str, v: &[f64]) -> (String, Vec<f64>) {
        (name.to_string(), v.to_vec())
    }

    #[test]
    fn diagonal_and_linearity() {
        let x = [0.0, 1.0, 2.0, 5.0, 3.5];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let m = correlation_matrix(&[col("x", &x), col("y", &y), col("neg", &neg)]).unwrap();
        assert_eq!(m.get("x", "x"), Some(1.0));
        assert!((m.get("x", "y").unwrap() - 1.0).abs() < 1e-15);
        assert!((m.get("x", "neg").unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(m.get("y", "x"), m.get("x", "y"));
    }

    #[test]
    fn constant_column_marked_undefined() {
        let m = correlation_matrix(&[col("a", &[1.0, 2.0, 3.0]), col("k", &[4.0, 4.0, 4.0])]).unwrap();
        assert_eq!(m.get("a", "k"), None);
        assert_eq!(m.get("k", "k"), None);
        assert_eq!(m.undefined(), vec!["k"]);
    }

    #[test]
    fn length_mismatch() {
        assert!(correlation_matrix(&[col("a", &[1.0, 2.0]), col("b", &[1.0])]).is_err());
    }
}
