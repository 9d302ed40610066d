//! Fixtures for the benchmarks, drawn from the library's own streams so that
//! inputs are identical on every run.

use confound_core::stats::Design;
use confound_core::{make_stream, sample_standard_normal, CostMatrix, SeedSpec};

/// `n` × `m` matrix of absolute normal draws.
pub fn cost_fixture(n: usize, m: usize, seed: u64) -> CostMatrix {
    let mut s = make_stream(SeedSpec::new(seed, 0));
    let data: Vec<f64> = sample_standard_normal(&mut s, n * m).into_iter().map(f64::abs).collect();
    let rows = (0..n).map(|i| format!("r{i}")).collect();
    let cols = (0..m).map(|j| format!("c{j}")).collect();
    CostMatrix::new(rows, cols, data).expect("finite costs")
}

/// Design with an intercept and `p` normal predictors plus a response.
pub fn regression_fixture(n: usize, p: usize, seed: u64) -> (Design, Vec<f64>) {
    let mut s = make_stream(SeedSpec::new(seed, 0));
    let cols: Vec<Vec<f64>> = (0..p).map(|_| sample_standard_normal(&mut s, n)).collect();
    let noise = sample_standard_normal(&mut s, n);
    let y = (0..n)
        .map(|i| cols.iter().enumerate().map(|(k, c)| (k + 1) as f64 * c[i]).sum::<f64>() + noise[i])
        .collect();
    let names = (0..p).map(|k| format!("x{k}")).collect();
    (Design::with_intercept(names, cols).expect("valid design"), y)
}
