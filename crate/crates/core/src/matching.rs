//! Distance-based matching and quantile blocking of item pools.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};

use crate::error::MatchError;
use crate::stats::{mean, sample_variance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub id: String,
    pub values: Vec<f64>,
}

/// Items sharing one set of named covariates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemPool {
    covariates: Vec<String>,
    units: Vec<Option<String>>,
    items: Vec<Item>,
}

impl ItemPool {
    pub fn new(covariates: Vec<String>, items: Vec<Item>) -> Result<Self, MatchError> {
        let mut seen = HashSet::new();
        for item in &items {
            if !seen.insert(item.id.as_str()) {
                return Err(MatchError::Schema(format!("duplicate item id `{}`", item.id)));
            }
            if item.values.len() != covariates.len() {
                return Err(MatchError::Schema(format!(
                    "item `{}` has {} values for {} covariates",
                    item.id,
                    item.values.len(),
                    covariates.len()
                )));
            }
            if item.values.iter().any(|v| !v.is_finite()) {
                return Err(MatchError::Schema(format!("item `{}` has a non-finite value", item.id)));
            }
        }
        let units = vec![None; covariates.len()];
        Ok(Self {
            covariates,
            units,
            items,
        })
    }

    pub fn with_units(mut self, units: Vec<Option<String>>) -> Result<Self, MatchError> {
        if units.len() != self.covariates.len() {
            return Err(MatchError::Schema("one unit per covariate required".into()));
        }
        self.units = units;
        Ok(self)
    }

    pub fn covariates(&self) -> &[String] {
        &self.covariates
    }

    pub fn units(&self) -> &[Option<String>] {
        &self.units
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn covariate_index(&self, name: &str) -> Option<usize> {
        self.covariates.iter().position(|c| c == name)
    }

    /// Values of covariate `c` for every item, in pool order.
    pub fn column(&self, c: usize) -> Vec<f64> {
        self.items.iter().map(|i| i.values[c]).collect()
    }

    /// A pool holding only the items at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> ItemPool {
        ItemPool {
            covariates: self.covariates.clone(),
            units: self.units.clone(),
            items: indices.iter().map(|&i| self.items[i].clone()).collect(),
        }
    }
}

/// Non-negative n × m costs, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostMatrix {
    row_ids: Vec<String>,
    col_ids: Vec<String>,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(row_ids: Vec<String>, col_ids: Vec<String>, data: Vec<f64>) -> Result<Self, MatchError> {
        if data.len() != row_ids.len() * col_ids.len() {
            return Err(MatchError::InvalidCost(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                row_ids.len(),
                col_ids.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(MatchError::InvalidCost(format!("entry {v} is not a finite non-negative number")));
        }
        Ok(Self {
            row_ids,
            col_ids,
            data,
        })
    }

    /// Builds a matrix with generated ids `r0.. / c0..`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MatchError> {
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(MatchError::InvalidCost("ragged rows".into()));
        }
        Self::new(
            (0..rows.len()).map(|i| format!("r{i}")).collect(),
            (0..m).map(|j| format!("c{j}")).collect(),
            rows.concat(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn ncols(&self) -> usize {
        self.col_ids.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.ncols() + j]
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn col_ids(&self) -> &[String] {
        &self.col_ids
    }

    pub fn transpose(&self) -> CostMatrix {
        let (n, m) = (self.nrows(), self.ncols());
        let mut data = Vec::with_capacity(n * m);
        for j in 0..m {
            for i in 0..n {
                data.push(self.get(i, j));
            }
        }
        CostMatrix {
            row_ids: self.col_ids.clone(),
            col_ids: self.row_ids.clone(),
            data,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distance {
    /// Σ w · |Δz|
    #[default]
    L1,
    /// sqrt(Σ w · Δz²)
    Euclidean,
}

/// Cost matrix plus the covariates that were dropped for having zero spread.
#[derive(Debug, Clone, PartialEq)]
pub struct CostBuild {
    pub costs: CostMatrix,
    pub zero_sd_covariates: Vec<String>,
}

/// Weighted distance between every item of `pool_a` (rows) and `pool_b`
/// (columns). Each covariate is standardized by its sample SD over the union
/// of both pools.
pub fn cost_matrix(
    pool_a: &ItemPool,
    pool_b: &ItemPool,
    weights: &BTreeMap<String, f64>,
    distance: Distance,
) -> Result<CostBuild, MatchError> {
    if pool_a.covariates != pool_b.covariates {
        return Err(MatchError::Schema(format!(
            "covariate names differ: [{}] vs [{}]",
            pool_a.covariates.join(", "),
            pool_b.covariates.join(", ")
        )));
    }
    let names = &pool_a.covariates;
    let mut w = Vec::with_capacity(names.len());
    for name in names {
        match weights.get(name) {
            Some(&v) if v.is_finite() && v >= 0.0 => w.push(v),
            Some(&v) => {
                return Err(MatchError::InvalidArgument(format!(
                    "weight for `{name}` must be a finite non-negative number, got {v}"
                )))
            }
            None => return Err(MatchError::Schema(format!("no weight given for covariate `{name}`"))),
        }
    }
    if let Some(extra) = weights.keys().find(|k| !names.contains(k)) {
        return Err(MatchError::Schema(format!("weight given for unknown covariate `{extra}`")));
    }

    let mut scale = Vec::with_capacity(names.len());
    let mut zero_sd_covariates = Vec::new();
    for (c, name) in names.iter().enumerate() {
        let mut all = pool_a.column(c);
        all.extend(pool_b.column(c));
        let sd = if all.len() >= 2 { sample_variance(&all).sqrt() } else { 0.0 };
        if sd > 0.0 {
            scale.push(Some(sd));
        } else {
            log::warn!("covariate `{name}` has zero spread across both pools; it does not contribute to costs");
            zero_sd_covariates.push(name.clone());
            scale.push(None);
        }
    }

    let mut data = Vec::with_capacity(pool_a.len() * pool_b.len());
    for a in &pool_a.items {
        for b in &pool_b.items {
            let mut acc = 0.0;
            for c in 0..names.len() {
                if let Some(sd) = scale[c] {
                    let dz = (a.values[c] - b.values[c]) / sd;
                    acc += match distance {
                        Distance::L1 => w[c] * dz.abs(),
                        Distance::Euclidean => w[c] * dz * dz,
                    };
                }
            }
            data.push(match distance {
                Distance::L1 => acc,
                Distance::Euclidean => acc.sqrt(),
            });
        }
    }
    let costs = CostMatrix::new(
        pool_a.items.iter().map(|i| i.id.clone()).collect(),
        pool_b.items.iter().map(|i| i.id.clone()).collect(),
        data,
    )?;
    Ok(CostBuild {
        costs,
        zero_sd_covariates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub row: usize,
    pub col: usize,
    pub row_id: String,
    pub col_id: String,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    /// Sorted by row index.
    pub pairs: Vec<MatchedPair>,
    pub total_cost: f64,
    pub unmatched_rows: Vec<String>,
    pub unmatched_cols: Vec<String>,
}

impl Matching {
    fn from_assignment(costs: &CostMatrix, mut assigned: Vec<(usize, usize)>) -> Self {
        assigned.sort_unstable();
        let mut row_used = vec![false; costs.nrows()];
        let mut col_used = vec![false; costs.ncols()];
        let pairs: Vec<MatchedPair> = assigned
            .into_iter()
            .map(|(i, j)| {
                row_used[i] = true;
                col_used[j] = true;
                MatchedPair {
                    row: i,
                    col: j,
                    row_id: costs.row_ids[i].clone(),
                    col_id: costs.col_ids[j].clone(),
                    cost: costs.get(i, j),
                }
            })
            .collect();
        let total_cost = pairs.iter().map(|p| p.cost).sum();
        let unmatched = |used: &[bool], ids: &[String]| {
            used.iter()
                .zip(ids)
                .filter(|(u, _)| !**u)
                .map(|(_, id)| id.clone())
                .collect()
        };
        Matching {
            total_cost,
            unmatched_rows: unmatched(&row_used, &costs.row_ids),
            unmatched_cols: unmatched(&col_used, &costs.col_ids),
            pairs,
        }
    }
}

/// Rectangular Hungarian algorithm (shortest augmenting paths with
/// potentials), O(n² m). Requires n ≤ m. Returns the column of each row.
fn hungarian(n: usize, m: usize, cost: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    // 1-based internally; index 0 is the virtual source row/column
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![usize::MAX; n];
    for j in 1..=m {
        if owner[j] != 0 {
            row_to_col[owner[j] - 1] = j - 1;
        }
    }
    row_to_col
}

/// Minimum-total-cost assignment of every row to a distinct column.
pub fn optimal_match(costs: &CostMatrix) -> Result<Matching, MatchError> {
    optimal_match_with_caliper(costs, None)
}

/// As [`optimal_match`], but pairs costing more than `caliper` are never
/// formed. The solver first maximizes the number of admissible pairs, then
/// minimizes their total cost; rows left without an admissible partner are
/// reported unmatched.
pub fn optimal_match_with_caliper(costs: &CostMatrix, caliper: Option<f64>) -> Result<Matching, MatchError> {
    let (n, m) = (costs.nrows(), costs.ncols());
    if n > m {
        return Err(MatchError::InvalidArgument(format!(
            "{n} rows exceed {m} columns; transpose so rows are the smaller side"
        )));
    }
    check_caliper(caliper)?;
    if n == 0 {
        return Ok(Matching::from_assignment(costs, Vec::new()));
    }
    let admissible = |i: usize, j: usize| caliper.is_none_or(|c| costs.get(i, j) <= c);
    let max_allowed = costs.data.iter().cloned().fold(0.0f64, f64::max);
    // exceeds the cost of any assignment made of admissible entries only
    let forbidden = (n as f64) * max_allowed + 1.0;
    let assignment = hungarian(n, m, |i, j| {
        if admissible(i, j) {
            costs.get(i, j)
        } else {
            forbidden
        }
    });
    let pairs = assignment
        .into_iter()
        .enumerate()
        .filter(|&(i, j)| admissible(i, j))
        .collect();
    Ok(Matching::from_assignment(costs, pairs))
}

fn check_caliper(caliper: Option<f64>) -> Result<(), MatchError> {
    match caliper {
        Some(c) if c.is_nan() || c < 0.0 => Err(MatchError::InvalidArgument(format!(
            "caliper must be non-negative, got {c}"
        ))),
        _ => Ok(()),
    }
}

/// Repeatedly takes the cheapest remaining (row, column) entry, ties broken
/// by row then column index. Entries above `caliper` are never taken.
pub fn greedy_match(costs: &CostMatrix, caliper: Option<f64>) -> Result<Matching, MatchError> {
    check_caliper(caliper)?;
    let (n, m) = (costs.nrows(), costs.ncols());
    let mut entries: Vec<(f64, usize, usize)> = (0..n)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .map(|(i, j)| (costs.get(i, j), i, j))
        .filter(|(c, _, _)| caliper.is_none_or(|cal| *c <= cal))
        .collect();
    entries.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut row_used = vec![false; n];
    let mut col_used = vec![false; m];
    let mut pairs = Vec::new();
    let target = n.min(m);
    for (_, i, j) in entries {
        if pairs.len() == target {
            break;
        }
        if !row_used[i] && !col_used[j] {
            row_used[i] = true;
            col_used[j] = true;
            pairs.push((i, j));
        }
    }
    Ok(Matching::from_assignment(costs, pairs))
}

/// Block label (0-based) for every item, by empirical k-quantile bins of one
/// covariate. Items are ranked by value (ties by pool order) and item with
/// rank r goes to bin ⌊r·k/n⌋; tied values all take the lowest bin among them.
pub fn quantile_blocks(pool: &ItemPool, covariate: &str, k: usize) -> Result<Vec<usize>, MatchError> {
    let c = pool
        .covariate_index(covariate)
        .ok_or_else(|| MatchError::Schema(format!("unknown covariate `{covariate}`")))?;
    let n = pool.len();
    if k == 0 || k > n {
        return Err(MatchError::InvalidArgument(format!(
            "block count must lie in 1..={n}, got {k}"
        )));
    }
    let values = pool.column(c);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut labels = vec![0usize; n];
    let mut tie_bin = 0;
    for (rank, &idx) in order.iter().enumerate() {
        let bin = rank * k / n;
        let tied = rank > 0 && values[order[rank - 1]] == values[idx];
        if !tied {
            tie_bin = bin;
        }
        labels[idx] = tie_bin;
    }
    Ok(labels)
}

/// Per-covariate Cohen's d (B minus A, pooled SD), `None` where undefined.
pub fn standardized_differences(pool_a: &ItemPool, pool_b: &ItemPool) -> Vec<Option<f64>> {
    (0..pool_a.covariates.len())
        .map(|c| {
            let (a, b) = (pool_a.column(c), pool_b.column(c));
            if a.len() < 2 || b.len() < 2 {
                return None;
            }
            let pooled = ((a.len() - 1) as f64 * sample_variance(&a)
                + (b.len() - 1) as f64 * sample_variance(&b))
                / (a.len() + b.len() - 2) as f64;
            (pooled > 0.0).then(|| (mean(&b) - mean(&a)) / pooled.sqrt())
        })
        .collect()
}
