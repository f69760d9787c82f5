//! Sweep determinism, coupling across scales and the per-configuration
//! inequalities of the experiments module.

use fppsim::experiments::{
    coupled_slope_fit, detect_shell_event, run_sweep, sandwich_check, shell_equality_check, sweep,
    triple_equality_count, Statistic, SweepPlan,
};
use fppsim::fpp::{point_to_ball_boundary, point_to_line};
use fppsim::lattice::ball0;
use fppsim::Configuration;

#[test]
fn sweeps_ignore_worker_count() {
    for stat in [Statistic::Cn, Statistic::APrime, Statistic::TPrime] {
        let plan = SweepPlan::new(stat, vec![8, 16], 24, 99);
        let one = run_sweep(&plan, Some(1)).unwrap();
        let three = run_sweep(&plan, Some(3)).unwrap();
        assert_eq!(one, three);
    }
    assert_eq!(
        sweep(Statistic::B0n, &[8, 16], 12, 4).unwrap(),
        sweep(Statistic::B0n, &[8, 16], 12, 4).unwrap()
    );
}

#[test]
fn coupled_samples_grow_along_the_schedule() {
    let plan = SweepPlan::new(Statistic::Cn, vec![64, 128], 100, 17);
    let out = run_sweep(&plan, None).unwrap();
    for (idx, (a, b)) in out.values[0].iter().zip(&out.values[1]).enumerate() {
        assert!(a <= b, "cn sample {idx}: {a} > {b}");
    }
    assert!(out.records[0].mean <= out.records[1].mean);
}

/// `b0n` grows on a common window. Sweeps give each scale its own `3n`
/// window, which can open a cheaper route and break this sample-wise.
#[test]
fn b0n_grows_on_a_common_window() {
    for idx in 0..100 {
        let cfg = Configuration::sample(ball0(384), 17, idx).unwrap();
        let b = |n| point_to_line(&cfg, n).unwrap().time().unwrap();
        assert!(b(64) <= b(128), "sample {idx}");
    }
}

#[test]
fn b0n_dominates_cn() {
    for idx in 0..100 {
        let cfg = Configuration::sample(ball0(96), 23, idx).unwrap();
        for n in [4u32, 11, 32] {
            let b = point_to_line(&cfg, n).unwrap().time().unwrap();
            let c = point_to_ball_boundary(&cfg, n).unwrap().time().unwrap();
            assert!(b >= c, "sample {idx} n {n}: b = {b}, c = {c}");
        }
    }
}

#[test]
fn sandwich_holds_on_random_configurations() {
    for idx in 0..100 {
        let cfg = Configuration::sample(ball0(64), 29, idx).unwrap();
        for k in [1, 2] {
            for n in [16u32, 50, 64] {
                assert!(sandwich_check(&cfg, k, n).unwrap(), "sample {idx} k {k} n {n}");
            }
        }
    }
}

/// Open circuits in `A(2^i, 2^(i+1))` are rare (about one sample in
/// 10^4 at i = 4), so this scans a long run.
#[test]
fn shell_events_satisfy_the_equality() {
    let i = 4;
    let mut events = Vec::new();
    for idx in 0..20_000 {
        let cfg = Configuration::sample(ball0(3 << (i + 1)), 31, idx).unwrap();
        if detect_shell_event(&cfg, i).unwrap() {
            assert!(shell_equality_check(&cfg, i).unwrap(), "sample {idx}");
            events.push(idx);
        }
    }
    println!("shell events at i = {i}: {events:?} of 20000");
    assert!(!events.is_empty());
}

#[test]
fn coupled_slope_of_cn_is_positive() {
    let plan = SweepPlan::new(Statistic::Cn, vec![16, 32, 64, 128], 200, 37);
    let fit = coupled_slope_fit(&run_sweep(&plan, None).unwrap(), 0).unwrap();
    assert!(fit.slope > 0.0);
    assert!(fit.slope_std_error < fit.slope);
}

#[test]
fn triple_equality_frequency_is_reported() {
    let counts: Vec<u64> = (2..=3)
        .map(|k| triple_equality_count(k, 60, 41, None).unwrap())
        .collect();
    println!("T'' = T = T' frequency over 60 samples, k = 2, 3: {counts:?}");
    assert!(counts.iter().all(|&c| c <= 60));
}
