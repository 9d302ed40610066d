//! CSV ingestion: comma-separated, header row required, `.` decimals.

use std::collections::BTreeSet;
use std::path::Path;

use confound_core::{Item, ItemPool};

use crate::error::CliError;

/// A header plus string records, with the 1-based file line of each record.
pub struct Table {
    pub path: String,
    pub headers: Vec<String>,
    pub rows: Vec<(u64, Vec<String>)>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let shown = path.display().to_string();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| CliError::data(format!("{shown}: {}", describe_csv_error(&e))))?;
        let headers: Vec<String> = reader
            .headers()
            .map_err(|e| CliError::data(format!("{shown}: {}", describe_csv_error(&e))))?
            .iter()
            .map(str::to_string)
            .collect();
        if headers.iter().all(String::is_empty) {
            return Err(CliError::data(format!("{shown}: missing header row")));
        }
        let mut seen = BTreeSet::new();
        for h in &headers {
            if !seen.insert(h.as_str()) {
                return Err(CliError::data(format!("{shown}: duplicate column `{h}`")));
            }
        }
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| CliError::data(format!("{shown}: {}", describe_csv_error(&e))))?;
            let line = rec.position().map_or(0, |p| p.line());
            rows.push((line, rec.iter().map(str::to_string).collect()));
        }
        Ok(Self {
            path: shown,
            headers,
            rows,
        })
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    /// Column `c` parsed as finite numbers.
    pub fn numeric_column(&self, c: usize) -> Result<Vec<f64>, CliError> {
        self.rows
            .iter()
            .map(|(line, rec)| {
                let cell = &rec[c];
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(CliError::data(format!(
                        "{}: line {line}, column `{}`: cannot read `{cell}` as a finite number",
                        self.path, self.headers[c]
                    ))),
                }
            })
            .collect()
    }
}

fn describe_csv_error(e: &csv::Error) -> String {
    match e.kind() {
        csv::ErrorKind::Io(io) => io.to_string(),
        csv::ErrorKind::UnequalLengths {
            pos,
            expected_len,
            len,
        } => format!(
            "line {}: expected {expected_len} fields, found {len}",
            pos.as_ref().map_or(0, |p| p.line())
        ),
        csv::ErrorKind::Utf8 { pos, .. } => format!(
            "line {}: invalid UTF-8",
            pos.as_ref().map_or(0, |p| p.line())
        ),
        _ => e.to_string(),
    }
}

/// A stimulus pool with schema `item,<covariate...>`.
pub fn read_pool(path: &Path) -> Result<ItemPool, CliError> {
    let table = Table::read(path)?;
    if table.headers.first().map(String::as_str) != Some("item") {
        return Err(CliError::data(format!(
            "{}: first column must be `item`, found `{}`",
            table.path,
            table.headers.first().map_or("", String::as_str)
        )));
    }
    if table.headers.len() < 2 {
        return Err(CliError::data(format!("{}: no covariate columns", table.path)));
    }
    let columns: Vec<Vec<f64>> = (1..table.headers.len())
        .map(|c| table.numeric_column(c))
        .collect::<Result<_, _>>()?;
    let items = table
        .rows
        .iter()
        .enumerate()
        .map(|(i, (_, rec))| Item {
            id: rec[0].clone(),
            values: columns.iter().map(|col| col[i]).collect(),
        })
        .collect();
    ItemPool::new(table.headers[1..].to_vec(), items).map_err(|e| CliError::data(format!("{}: {e}", table.path)))
}
