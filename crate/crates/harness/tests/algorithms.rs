//! Ensemble checks of individual algorithms: error rates, iteration counts,
//! round, bit and memory budgets at fixed sizes.

use anonpram::collectives::simulate_verify_collision;
use anonpram::naming::{Algorithm, Growth};
use anonpram::sim::derive_seed;
use anonpram_harness::{run_trials, AggregateStats, ExperimentConfig, ExperimentReport, Outcome};

fn lg(n: u64) -> f64 {
    (n as f64).log2()
}

fn ln(n: u64) -> f64 {
    (n as f64).ln()
}

fn single(config: ExperimentConfig) -> (ExperimentReport, AggregateStats) {
    let report = run_trials(&config).unwrap();
    let agg = report.aggregates[0].clone();
    (report, agg)
}

fn max_rounds(report: &ExperimentReport) -> u64 {
    report.trials.iter().map(|t| t.metrics.rounds).max().unwrap()
}

fn max_cells(report: &ExperimentReport) -> u64 {
    report.trials.iter().map(|t| t.metrics.cells_touched).max().unwrap()
}

fn first_attempt_fraction(agg: &AggregateStats) -> f64 {
    agg.retries.get(&1).copied().unwrap_or(0) as f64 / agg.trials as f64
}

#[test]
fn three_way_collision_check_misses_a_quarter_of_the_time() {
    let trials = 10_000;
    let misses = (0..trials)
        .filter(|&t| !simulate_verify_collision(3, None, derive_seed(3, t)).unwrap()[0])
        .count();
    let freq = misses as f64 / trials as f64;
    assert!((freq - 0.25).abs() <= 0.02, "{freq}");
}

#[test]
fn arbitrary_unbounded_lv_small_and_medium() {
    let (_, agg) = single(ExperimentConfig::new(Algorithm::ArbitraryUnboundedLv, [2], 50, 1).with_beta(4.0));
    assert_eq!(agg.count(Outcome::CorrectPermutation), 50);

    // Every claim step names at least one label of each bin, so the number
    // of claim steps (five rounds each) bounds the fullest bin.
    let n = 256;
    let (report, agg) = single(ExperimentConfig::new(Algorithm::ArbitraryUnboundedLv, [n], 200, 2).with_beta(4.0));
    assert_eq!(agg.count(Outcome::CorrectPermutation), 200);
    assert!(first_attempt_fraction(&agg) >= 0.99, "{:?}", agg.retries);
    for t in report.trials.iter().filter(|t| t.metrics.outer_iterations == 1) {
        let claim_steps = t.metrics.rounds as f64 / 5.0;
        assert!(claim_steps <= 4.0 * ln(n), "trial {}: {} rounds", t.trial, t.metrics.rounds);
    }
}

#[test]
fn common_bounded_lv_rounds() {
    let n = 64;
    let (report, agg) = single(ExperimentConfig::new(Algorithm::CommonBoundedLv, [n], 500, 3).with_beta(6.0));
    assert_eq!(agg.count(Outcome::CorrectPermutation), 500);
    assert!(first_attempt_fraction(&agg) >= 0.99, "{:?}", agg.retries);
    let c = 60.0;
    assert!(max_rounds(&report) as f64 <= c * n as f64 * lg(n), "{}", max_rounds(&report));
}

#[test]
fn common_bounded_mc_bits() {
    let n = 64;
    let (report, _) = single(ExperimentConfig::new(Algorithm::CommonBoundedMc, [n], 50, 4).with_beta(6.0));
    let c = 32.0;
    for t in &report.trials {
        assert!(t.metrics.random_bits as f64 <= c * n as f64 * lg(n), "{}", t.metrics.random_bits);
    }
}

#[test]
fn arbitrary_unbounded_mc_doubling() {
    let n = 256;
    let (report, agg) = single(ExperimentConfig::new(Algorithm::ArbitraryUnboundedMc, [n], 500, 5).with_beta(9.0));
    assert!(agg.error_rate.point <= 0.01, "{:?}", agg.outcomes);
    assert!(max_rounds(&report) as f64 <= 160.0 * lg(n), "{}", max_rounds(&report));
}

#[test]
fn arbitrary_unbounded_mc_successor() {
    let n = 256;
    let config = ExperimentConfig::new(Algorithm::ArbitraryUnboundedMc, [n], 500, 6)
        .with_beta(9.0)
        .with_growth(Growth::Successor);
    let (report, agg) = single(config);
    assert!(agg.error_rate.point <= 0.01, "{:?}", agg.outcomes);
    assert!(max_cells(&report) as f64 <= 8.0 * n as f64 / ln(n), "{}", max_cells(&report));
    assert!(max_rounds(&report) as f64 <= 40.0 * lg(n) * lg(n), "{}", max_rounds(&report));
}

#[test]
fn common_unbounded_mc_doubling() {
    let n = 256;
    let (report, agg) = single(ExperimentConfig::new(Algorithm::CommonUnboundedMc, [n], 500, 7).with_beta(4.0));
    assert!(agg.error_rate.point <= 0.01, "{:?}", agg.outcomes);
    assert!(max_rounds(&report) as f64 <= 160.0 * lg(n), "{}", max_rounds(&report));
}

#[test]
fn common_unbounded_mc_successor() {
    let n = 256;
    let config = ExperimentConfig::new(Algorithm::CommonUnboundedMc, [n], 500, 8)
        .with_beta(4.0)
        .with_growth(Growth::Successor);
    let (report, agg) = single(config);
    assert!(agg.error_rate.point <= 0.01, "{:?}", agg.outcomes);
    assert!(max_cells(&report) as f64 <= 32.0 * n as f64, "{}", max_cells(&report));
    assert!(max_rounds(&report) as f64 <= 16.0 * lg(n) * lg(n), "{}", max_rounds(&report));
}

#[test]
fn las_vegas_never_duplicates_under_any_seed() {
    for alg in [Algorithm::ArbitraryBoundedLv, Algorithm::ArbitraryUnboundedLv, Algorithm::CommonBoundedLv, Algorithm::CommonUnboundedLv] {
        for seed in 0..3 {
            let (report, _) = single(ExperimentConfig::new(alg, [5], 30, seed));
            assert!(report.trials.iter().all(|t| t.outcome == Outcome::CorrectPermutation), "{alg}");
        }
    }
}

#[test]
fn identical_configs_give_identical_reports() {
    let config = ExperimentConfig::new(Algorithm::ArbitraryUnboundedMc, [8, 16], 20, 99).with_growth(Growth::Successor);
    let a = run_trials(&config).unwrap();
    let b = run_trials(&config).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        anonpram_harness::aggregate_json(&a).unwrap(),
        anonpram_harness::aggregate_json(&b).unwrap()
    );
}
