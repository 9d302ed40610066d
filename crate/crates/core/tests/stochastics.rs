mod common;

use common::{ks_critical_01, ks_statistic, normal_cdf};
use confound_core::stochastics::{make_stream, sample_standard_normal, SeedSpec};
use rayon::prelude::*;

#[test]
fn golden_first_draws() {
    let mut s = make_stream(SeedSpec::new(42, 7));
    assert_eq!(s.next_standard_normal(), GOLDEN_42_7_FIRST_NORMAL);
    let mut s = make_stream(SeedSpec::new(42, 7));
    assert_eq!(s.next_u64(), GOLDEN_42_7_FIRST_U64);
}

// frozen from the first verified run
const GOLDEN_42_7_FIRST_NORMAL: f64 = -0.9347176997285895;
const GOLDEN_42_7_FIRST_U64: u64 = 2370525664269707216;

#[test]
fn identical_spec_identical_sequence() {
    let a = sample_standard_normal(&mut make_stream(SeedSpec::new(123, 456)), 1000);
    let b = sample_standard_normal(&mut make_stream(SeedSpec::new(123, 456)), 1000);
    assert_eq!(a, b);
}

#[test]
fn million_draw_moments_and_ks() {
    let n = 1_000_000;
    let xs = sample_standard_normal(&mut make_stream(SeedSpec::new(2024, 0)), n);
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0);
    assert!(mean.abs() < 0.01, "mean {mean}");
    assert!((var - 1.0).abs() < 0.01, "var {var}");
    let ks = ks_statistic(&xs, normal_cdf);
    assert!(ks < 0.002, "KS {ks}");
}

#[test]
fn ks_passes_across_root_seeds() {
    let n = 100_000;
    for root in 0..10u64 {
        let xs = sample_standard_normal(&mut make_stream(SeedSpec::new(root, 0)), n);
        let ks = ks_statistic(&xs, normal_cdf);
        assert!(ks < ks_critical_01(n), "root {root}: KS {ks}");
    }
}

#[test]
fn parallel_schedule_matches_serial() {
    let serial: Vec<Vec<f64>> = (0..64u64)
        .map(|i| sample_standard_normal(&mut make_stream(SeedSpec::new(9, i)), 50))
        .collect();
    let parallel: Vec<Vec<f64>> = (0..64usize)
        .into_par_iter()
        .rev()
        .map(|i| (i, sample_standard_normal(&mut make_stream(SeedSpec::new(9, i as u64)), 50)))
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .map(|(_, v)| v)
        .collect();
    assert_eq!(serial, parallel);
}

#[test]
fn streams_are_not_shifted_copies() {
    // stream 1 must not reproduce stream 0 offset by a few draws
    let a = sample_standard_normal(&mut make_stream(SeedSpec::new(5, 0)), 2000);
    let b = sample_standard_normal(&mut make_stream(SeedSpec::new(5, 1)), 2000);
    for shift in 0..1000 {
        assert_ne!(&a[shift..shift + 8], &b[..8]);
    }
}
