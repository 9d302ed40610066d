//! Student-t distribution function via the regularized incomplete beta.

use crate::error::StatsError;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Continued fraction for I_x(a, b), modified Lentz.
fn beta_continued_fraction(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    const MAX_ITER: usize = 5000;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta I_x(a, b). The complement `1 - x` is passed
/// separately so callers can supply it without cancellation.
pub fn regularized_incomplete_beta(x: f64, one_minus_x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if one_minus_x <= 0.0 {
        return 1.0;
    }
    let ln_front = a * x.ln() + b * one_minus_x.ln() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_continued_fraction(x, a, b) / a
    } else {
        1.0 - ln_front.exp() * beta_continued_fraction(one_minus_x, b, a) / b
    }
}

/// Lower-tail probability P(T <= t) of Student's t with `df` degrees of freedom.
pub fn student_t_cdf(t: f64, df: f64) -> Result<f64, StatsError> {
    if df.is_nan() || df <= 0.0 {
        return Err(StatsError::Domain(format!(
            "degrees of freedom must be positive, got {df}"
        )));
    }
    if t.is_nan() {
        return Err(StatsError::NonFinite("t statistic".into()));
    }
    if t == f64::INFINITY {
        return Ok(1.0);
    }
    if t == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if t == 0.0 {
        return Ok(0.5);
    }
    let t2 = t * t;
    let denom = df + t2;
    // P(|T| > |t|) / 2
    let tail = 0.5 * regularized_incomplete_beta(df / denom, t2 / denom, 0.5 * df, 0.5);
    Ok(if t > 0.0 { 1.0 - tail } else { tail })
}

/// Two-sided p-value 2·P(T > |t|).
pub fn two_sided_p(t: f64, df: f64) -> Result<f64, StatsError> {
    let lower = student_t_cdf(-t.abs(), df)?;
    Ok((2.0 * lower).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn center_is_half() {
        for df in [0.5, 1.0, 3.0, 30.0, 1000.0] {
            assert_eq!(student_t_cdf(0.0, df).unwrap(), 0.5);
        }
    }

    #[test]
    fn cauchy_closed_form() {
        for t in [-10.0, -1.0, -0.3, 0.2, 1.0, 4.0, 50.0] {
            let expected = 0.5 + f64::atan(t) / std::f64::consts::PI;
            let got = student_t_cdf(t, 1.0).unwrap();
            assert!((got - expected).abs() < 1e-12, "t={t}: {got} vs {expected}");
        }
        assert!((student_t_cdf(1.0, 1.0).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn df_two_closed_form() {
        // F(t) = 1/2 + t / (2 sqrt(2 + t^2))
        for t in [-3.0, -0.5, 0.7, 2.5] {
            let expected = 0.5 + t / (2.0 * (2.0f64 + t * t).sqrt());
            assert!((student_t_cdf(t, 2.0).unwrap() - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_bad_df() {
        assert!(matches!(student_t_cdf(1.0, 0.0), Err(StatsError::Domain(_))));
        assert!(matches!(student_t_cdf(1.0, -2.0), Err(StatsError::Domain(_))));
        assert!(student_t_cdf(1.0, f64::NAN).is_err());
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).abs() < 1e-14);
        assert!(ln_gamma(2.0).abs() < 1e-14);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
        // ln(10!) = ln 3628800
        assert!((ln_gamma(11.0) - 3_628_800f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn infinite_arguments() {
        assert_eq!(student_t_cdf(f64::INFINITY, 3.0).unwrap(), 1.0);
        assert_eq!(student_t_cdf(f64::NEG_INFINITY, 3.0).unwrap(), 0.0);
        assert_eq!(two_sided_p(f64::INFINITY, 3.0).unwrap(), 0.0);
    }
}
