use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use confound_core::procedures::write_summaries_csv;
use confound_core::{
    cost_matrix, greedy_match, optimal_match_with_caliper, run_grid, run_simulation, BalanceReport, Matching,
    MonteCarloSummary,
};

use crate::args::{BalanceArgs, MatchArgs, SimulateArgs};
use crate::config::{parse_toml, resolve_grid, RunConfigFile};
use crate::error::CliError;
use crate::input::{read_pool, Table};

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))
}

pub fn balance(args: &BalanceArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let table = Table::read(&args.input)?;
    let g = table.column_index(&args.group_column).ok_or_else(|| {
        CliError::usage(format!(
            "{}: no group column `{}` (columns: {})",
            table.path,
            args.group_column,
            table.headers.join(", ")
        ))
    })?;
    let levels: BTreeSet<&str> = table.rows.iter().map(|(_, r)| r[g].as_str()).collect();
    if levels.len() != 2 {
        return Err(CliError::usage(format!(
            "{}: column `{}`: expected exactly 2 levels, found {} ({})",
            table.path,
            args.group_column,
            levels.len(),
            levels.iter().copied().collect::<Vec<_>>().join(", ")
        )));
    }
    let labels: Vec<String> = levels.iter().map(|s| s.to_string()).collect();
    let group: Vec<u8> = table
        .rows
        .iter()
        .map(|(_, r)| u8::from(r[g] == labels[1]))
        .collect();
    for (k, label) in labels.iter().enumerate() {
        let count = group.iter().filter(|&&x| x as usize == k).count();
        if count < 2 {
            return Err(CliError::usage(format!(
                "{}: level `{label}` has {count} row(s); at least 2 per level are required",
                table.path
            )));
        }
    }

    let mut covariates = Vec::new();
    let mut outcome = None;
    for (c, name) in table.headers.iter().enumerate() {
        if c == g || *name == args.id_column {
            continue;
        }
        let col = (name.clone(), table.numeric_column(c)?);
        if *name == args.outcome_column {
            outcome = Some(col);
        } else {
            covariates.push(col);
        }
    }
    if covariates.is_empty() {
        return Err(CliError::usage(format!("{}: no covariate columns", table.path)));
    }
    let report = BalanceReport::build([labels[0].clone(), labels[1].clone()], &group, &covariates, outcome.as_ref())
        .map_err(|e| CliError::data(e.to_string()))?;
    write!(stdout, "{}", report.render_text()).map_err(|e| CliError::data(e.to_string()))?;
    if let Some(path) = &args.json {
        write_file(path, &report.to_json())?;
    }
    Ok(())
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

pub fn summary_table(summaries: &[MonteCarloSummary]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>6} {:>8} {:>8} {:>6} {:>9} {:>10} {:>11} {:>9} {:>10} {:>10} {:>10} {:>9}",
        "n",
        "d_manip",
        "d_conf",
        "r",
        "flag",
        "unneeded",
        "naive_rej",
        "adj_rej",
        "naive_est",
        "adj_est",
        "cov_est",
        "ms"
    );
    for s in summaries {
        let c = &s.config;
        let _ = writeln!(
            out,
            "{:>6} {:>8} {:>8} {:>6} {:>9.4} {:>10.4} {:>11.4} {:>9.4} {:>10.4} {:>10.4} {:>10.4} {:>9}",
            c.n_per_group,
            c.d_manip,
            c.d_conf,
            c.r,
            s.flag_rate,
            s.unnecessary_flag_rate,
            s.naive_power_or_type1,
            s.adjusted_power_or_type1,
            s.mean_naive_estimate,
            s.mean_adjusted_estimate,
            s.mean_covariate_estimate,
            s.wall_time.as_millis()
        );
    }
    out
}

pub fn simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let file: RunConfigFile = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
            parse_toml(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?
        }
        None => RunConfigFile::default(),
    };
    let mut config = file.config()?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let grid = match (args.grid_axis, &args.grid_values) {
        (None, None) => file.grid()?,
        (axis, values) => resolve_grid(axis, values.clone())?,
    };
    let workers = args.workers.or(file.workers).unwrap_or_else(default_workers);

    let summaries = match &grid {
        Some(g) => run_grid(&config, g.axis, &g.values, workers)?,
        None => vec![run_simulation(&config, workers)?],
    };
    write!(stdout, "{}", summary_table(&summaries)).map_err(|e| CliError::data(e.to_string()))?;
    if let Some(path) = &args.json {
        let json = if grid.is_some() {
            serde_json::to_string_pretty(&summaries)
        } else {
            serde_json::to_string_pretty(&summaries[0])
        }
        .map_err(|e| CliError::data(e.to_string()))?;
        write_file(path, &json)?;
    }
    if let Some(path) = &args.out {
        let mut buf = Vec::new();
        write_summaries_csv(&mut buf, &summaries).map_err(|e| CliError::data(e.to_string()))?;
        write_file(path, &String::from_utf8(buf).expect("csv is utf-8"))?;
    }
    Ok(())
}

/// Pairs as (item of A, item of B, cost) in the order of pool A.
fn pairs_in_a_order(m: &Matching, transposed: bool) -> Vec<(usize, usize, String, String, f64)> {
    let mut pairs: Vec<_> = m
        .pairs
        .iter()
        .map(|p| {
            if transposed {
                (p.col, p.row, p.col_id.clone(), p.row_id.clone(), p.cost)
            } else {
                (p.row, p.col, p.row_id.clone(), p.col_id.clone(), p.cost)
            }
        })
        .collect();
    pairs.sort_by_key(|p| p.0);
    pairs
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn match_pools(args: &MatchArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let pool_a = read_pool(&args.pool_a)?;
    let pool_b = read_pool(&args.pool_b)?;
    if pool_a.covariates() != pool_b.covariates() {
        return Err(CliError::data(format!(
            "pools have different covariates: [{}] vs [{}]",
            pool_a.covariates().join(", "),
            pool_b.covariates().join(", ")
        )));
    }
    let weights: BTreeMap<String, f64> = match &args.weights {
        Some(ws) => {
            let map: BTreeMap<String, f64> = ws.iter().cloned().collect();
            if map.len() != ws.len() {
                return Err(CliError::usage("a covariate is weighted more than once"));
            }
            let missing: Vec<&str> = pool_a
                .covariates()
                .iter()
                .filter(|c| !map.contains_key(*c))
                .map(String::as_str)
                .collect();
            if !missing.is_empty() {
                return Err(CliError::usage(format!("no weight given for: {}", missing.join(", "))));
            }
            if let Some(extra) = map.keys().find(|k| !pool_a.covariates().contains(k)) {
                return Err(CliError::usage(format!("weight given for unknown covariate `{extra}`")));
            }
            map
        }
        None => pool_a.covariates().iter().map(|c| (c.clone(), 1.0)).collect(),
    };
    if let Some(c) = args.caliper {
        if !(c.is_finite() && c >= 0.0) {
            return Err(CliError::usage("--caliper must be a finite non-negative number"));
        }
    }

    let transposed = pool_a.len() > pool_b.len();
    let (rows, cols) = if transposed { (&pool_b, &pool_a) } else { (&pool_a, &pool_b) };
    let build = cost_matrix(rows, cols, &weights, args.metric.into()).map_err(|e| CliError::data(e.to_string()))?;
    let matching = if args.greedy {
        greedy_match(&build.costs, args.caliper)
    } else {
        optimal_match_with_caliper(&build.costs, args.caliper)
    }
    .map_err(|e| CliError::data(e.to_string()))?;
    let pairs = pairs_in_a_order(&matching, transposed);

    let mut csv = String::from("item_a,item_b,cost\n");
    for (_, _, a, b, cost) in &pairs {
        let _ = writeln!(csv, "{},{},{cost:?}", csv_field(a), csv_field(b));
    }
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => write!(stdout, "{csv}").map_err(|e| CliError::data(e.to_string()))?,
    }

    if pairs.is_empty() {
        log::warn!("no pair satisfies the caliper; the pairs file is empty");
        return Ok(());
    }
    // with the pairs on standard output, the report goes to standard error
    let mut info = String::new();
    let total: f64 = pairs.iter().map(|p| p.4).sum();
    let _ = writeln!(
        info,
        "{} pairs, total cost {total:.6}; {} of A and {} of B unmatched",
        pairs.len(),
        pool_a.len() - pairs.len(),
        pool_b.len() - pairs.len()
    );
    let matched_a = pool_a.subset(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
    let matched_b = pool_b.subset(&pairs.iter().map(|p| p.1).collect::<Vec<_>>());
    let report = if pairs.len() < 2 {
        log::warn!("fewer than 2 pairs; no post-match balance report");
        None
    } else {
        let r = BalanceReport::from_pools("A", &matched_a, "B", &matched_b).map_err(|e| CliError::data(e.to_string()))?;
        let _ = write!(info, "\npost-match balance (matched items only)\n{}", r.render_text());
        Some(r)
    };
    let sink: &mut dyn Write = if args.out.is_some() { stdout } else { &mut std::io::stderr() };
    write!(sink, "{info}").map_err(|e| CliError::data(e.to_string()))?;
    if let (Some(path), Some(r)) = (&args.json, &report) {
        write_file(path, &r.to_json())?;
    }
    Ok(())
}
