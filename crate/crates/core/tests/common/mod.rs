//! Independent reference computations shared by the integration suites.
//!
//! Nothing here calls into the code paths it is used to check: distribution
//! functions come from `statrs`, least squares from `nalgebra`, assignment
//! optima from exhaustive enumeration and test power from numerical
//! integration over the sampling distribution of the variance estimates.

#![allow(dead_code)]

use statrs::distribution::{Beta, ChiSquared, Continuous, ContinuousCDF, Normal, StudentsT};

/// Kolmogorov–Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic one-sample KS critical value at level 0.01.
pub fn ks_critical_01(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

pub fn normal_cdf(x: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().cdf(x)
}

pub fn reference_t_cdf(t: f64, df: f64) -> f64 {
    StudentsT::new(0.0, 1.0, df).unwrap().cdf(t)
}

fn t_quantile(p: f64, df: f64) -> f64 {
    StudentsT::new(0.0, 1.0, df).unwrap().inverse_cdf(p)
}

/// Composite Simpson rule on [a, b] with `intervals` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let intervals = intervals + intervals % 2;
    let h = (b - a) / intervals as f64;
    let mut acc = f(a) + f(b);
    for k in 1..intervals {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// Rejection probability of a two-sided two-sample test with `n` per group,
/// unit variances and mean shift `d`, when the test statistic is
/// `D / sqrt(T / ((n-1) n))` with `T = (n-1)(s0² + s1²) ~ χ²(2n-2)` and the
/// critical value is `crit`.
fn power_given_critical(n: usize, d: f64, crit: impl Fn() -> f64) -> impl Fn(f64) -> f64 {
    let nf = n as f64;
    let c = crit();
    move |total: f64| {
        let half_width = c * (total / ((nf - 1.0) * nf)).sqrt();
        let scale = (nf / 2.0).sqrt();
        normal_cdf((d - half_width) * scale) + normal_cdf((-d - half_width) * scale)
    }
}

fn chi2_upper(df: f64) -> f64 {
    df + 60.0 * (2.0 * df).sqrt() + 60.0
}

/// Power of Student's pooled two-sample t-test: the two-sided tail mass of a
/// noncentral t with df = 2n - 2 and noncentrality d·sqrt(n/2) beyond the
/// central critical value, integrated over the chi-square mixing variable.
pub fn student_power(n: usize, d: f64, alpha: f64) -> f64 {
    let nu = 2.0 * n as f64 - 2.0;
    let chi = ChiSquared::new(nu).unwrap();
    let crit = t_quantile(1.0 - alpha / 2.0, nu);
    let inner = power_given_critical(n, d, || crit);
    simpson(|v| if v <= 0.0 { 0.0 } else { chi.pdf(v) * inner(v) }, 0.0, chi2_upper(nu), 8000)
}

/// Power of Welch's test under equal n and equal variances. With
/// `B = s0² / (s0² + s1²) ~ Beta((n-1)/2, (n-1)/2)` independent of the total,
/// Welch's df is `(n-1) / (B² + (1-B)²)` and the statistic coincides with the
/// pooled one, so power is a Beta mixture of fixed-critical-value powers.
pub fn welch_power(n: usize, d: f64, alpha: f64) -> f64 {
    let nf = n as f64;
    let nu = 2.0 * nf - 2.0;
    let chi = ChiSquared::new(nu).unwrap();
    let half = (nf - 1.0) / 2.0;
    let beta = Beta::new(half, half).unwrap();
    let upper = chi2_upper(nu);
    let given_b = |b: f64| {
        if b <= 0.0 || b >= 1.0 {
            return 0.0;
        }
        let df = (nf - 1.0) / (b * b + (1.0 - b) * (1.0 - b));
        let crit = t_quantile(1.0 - alpha / 2.0, df);
        let inner = power_given_critical(n, d, || crit);
        let p = simpson(|v| if v <= 0.0 { 0.0 } else { chi.pdf(v) * inner(v) }, 0.0, upper, 2000);
        beta.pdf(b) * p
    };
    // symmetric in b around 1/2
    2.0 * simpson(given_b, 0.0, 0.5, 400)
}

/// Monte Carlo standard error of a proportion.
pub fn mc_se(p: f64, reps: u64) -> f64 {
    (p * (1.0 - p) / reps as f64).sqrt()
}

/// Minimum total cost over all injections of rows into columns (rows ≤
/// columns), summed in row order.
pub fn brute_force_assignment(costs: &[Vec<f64>]) -> f64 {
    fn go(costs: &[Vec<f64>], row: usize, used: &mut Vec<bool>, acc: f64, best: &mut f64) {
        if row == costs.len() {
            if acc < *best {
                *best = acc;
            }
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                go(costs, row + 1, used, acc + costs[row][j], best);
                used[j] = false;
            }
        }
    }
    let m = costs.first().map_or(0, Vec::len);
    let mut best = f64::INFINITY;
    if costs.is_empty() {
        return 0.0;
    }
    go(costs, 0, &mut vec![false; m], 0.0, &mut best);
    best
}

/// Least squares via nalgebra's SVD; returns (coefficients, standard errors).
pub fn svd_least_squares(columns: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    use nalgebra::{DMatrix, DVector};
    let n = y.len();
    let p = columns.len();
    let x = DMatrix::from_fn(n, p, |i, j| columns[j][i]);
    let yv = DVector::from_column_slice(y);
    let svd = x.clone().svd(true, true);
    let beta = svd.solve(&yv, 1e-14).unwrap();
    let resid = &yv - &x * &beta;
    let sigma2 = resid.norm_squared() / (n - p) as f64;
    let xtx_inv = (x.transpose() * &x).try_inverse().unwrap();
    let se = (0..p).map(|k| (sigma2 * xtx_inv[(k, k)]).sqrt()).collect();
    (beta.iter().copied().collect(), se)
}

/// Small deterministic generator for test fixtures (SplitMix64).
pub struct Fixture(u64);

impl Fixture {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Standard normal by inverse CDF, independent of the library sampler.
    pub fn normal(&mut self) -> f64 {
        let u = ((self.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
        Normal::new(0.0, 1.0).unwrap().inverse_cdf(u)
    }
}
