//! Descriptive statistics, two-sample t-tests, the Student-t distribution
//! function, correlation matrices and least-squares regression.

mod correlation;
mod descriptive;
mod distribution;
mod ols;
mod ttest;

pub use correlation::{correlation_matrix, pearson, CorrelationMatrix};
pub use descriptive::{describe, mean, sample_variance, DescriptiveSummary};
pub use distribution::{ln_gamma, regularized_incomplete_beta, student_t_cdf, two_sided_p};
pub use ols::{ols_fit, Design, RegressionFit, EXACT_FIT_TOLERANCE, RANK_TOLERANCE};
pub use ttest::{student_t_test, two_sample_t_test, welch_t_test, TTestKind, TestResult};
