//! The acceptance suite: fourteen seeded checks with fixed configurations
//! and thresholds. Each check runs on its own and reports pass or fail with
//! the measured numbers.

use std::fmt;

use anonpram::collectives::{simulate_count_occupied, simulate_rank_positions, simulate_verify_collision, TreeLayout};
use anonpram::naming::{arbitrary_unbounded_lv_bins, AlgoConfig, Algorithm, Growth, Guarantee, FIXED_CELLS};
use anonpram::sim::{derive_seed, draw_uniform, ProcessorRng, Selector, WritePolicy};
use anonpram::Word;

use crate::{
    aggregate_json, csv_string, estimate_size_trials, fit_scaling, gauge_size_trials, run_trials, run_trials_with_jobs,
    ExperimentConfig, ExperimentReport, HarnessError, Outcome, ScalingModel,
};

pub const DEFAULT_SUITE_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteOptions {
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: DEFAULT_SUITE_SEED }
    }
}

/// Identifier and one-line title of every check.
pub const CRITERIA: [(u32, &str); 14] = [
    (1, "Las Vegas runs always name correctly"),
    (2, "collision check detects exactly the mixed coin vectors"),
    (3, "collision check between two processors fires half the time"),
    (4, "arb-bnd-lv rarely needs a second attempt"),
    (5, "arb-bnd-mc terminates within its iteration bound"),
    (6, "Monte Carlo duplicate rate is small"),
    (7, "constant-memory size estimate stays below 6n"),
    (8, "tree gauge stays within [n, 2n]"),
    (9, "com-unb-lv rounds grow logarithmically"),
    (10, "arb-bnd-lv rounds grow linearly"),
    (11, "random bits grow like n lg n"),
    (12, "memory use matches the per-algorithm bounds"),
    (13, "reports are reproducible"),
    (14, "counting and ranking collectives match scan oracles"),
];

/// Checks whose stated bound does not hold for the algorithms as written,
/// with the reason. They are reported as FAIL like any other failure; test
/// drivers use this list to tell an expected gap from a regression.
pub fn known_gap(id: u32) -> Option<&'static str> {
    match id {
        8 => Some(
            "the gauge can stop only once 2^k >= beta * (occupied bins); the first such k may have 2^k just under 2 beta n, so sizes reach almost 4n",
        ),
        11 => Some("with doubling growth, arb-unb-mc's label width jumps by 2x at some n, so bits(2n)/bits(n) reaches ~3 there"),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionResult {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} {verdict}: {} ({})", self.id, self.title, self.detail)
    }
}

pub fn run_criterion(id: u32, opts: &SuiteOptions) -> Result<CriterionResult, HarnessError> {
    let title = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, t)| *t)
        .ok_or_else(|| HarnessError::Config(format!("no criterion {id}; expected 1 to {}", CRITERIA.len())))?;
    let seed = derive_seed(opts.seed, u64::from(id));
    let (passed, detail) = match id {
        1 => las_vegas_correctness(seed)?,
        2 => collision_enumeration(seed)?,
        3 => collision_frequency(seed)?,
        4 => bounded_lv_retries(seed)?,
        5 => monte_carlo_termination(seed)?,
        6 => monte_carlo_errors(seed)?,
        7 => estimate_size_bounds(seed)?,
        8 => gauge_size_bounds(seed)?,
        9 => logarithmic_rounds(seed)?,
        10 => linear_rounds(seed)?,
        11 => random_bit_scaling(seed)?,
        12 => memory_accounting(seed)?,
        13 => determinism(seed)?,
        14 => collective_oracles(seed)?,
        _ => unreachable!(),
    };
    Ok(CriterionResult { id, title, passed, detail })
}

/// Runs the checks in `ids` (all of them when empty), in order.
pub fn run_suite(ids: &[u32], opts: &SuiteOptions) -> Result<Vec<CriterionResult>, HarnessError> {
    let all: Vec<u32> = CRITERIA.iter().map(|&(i, _)| i).collect();
    let ids = if ids.is_empty() { &all[..] } else { ids };
    ids.iter().map(|&id| run_criterion(id, opts)).collect()
}

type Check = Result<(bool, String), HarnessError>;

fn powers_of_two(lo: u32, hi: u32) -> Vec<u64> {
    (lo..=hi).map(|e| 1u64 << e).collect()
}

fn lg(n: u64) -> f64 {
    (n as f64).log2()
}

fn las_vegas_correctness(seed: u64) -> Check {
    const NS: [u64; 8] = [1, 2, 3, 4, 8, 16, 64, 256];
    const TRIALS: u64 = 200;
    let mut runs = Vec::new();
    for alg in Algorithm::ALL.into_iter().filter(|a| a.guarantee() == Guarantee::LasVegas) {
        let base = ExperimentConfig::new(alg, NS, TRIALS, seed);
        match alg.model() {
            anonpram::naming::Model::Common => runs.push(base),
            anonpram::naming::Model::Arbitrary => {
                runs.push(base.clone());
                runs.extend(Selector::ALL.into_iter().map(|s| base.clone().with_selector(s)));
            }
        }
    }
    let mut cells = 0;
    let mut bad = Vec::new();
    let mut worst_cap: f64 = 0.0;
    for config in &runs {
        let report = run_trials(config)?;
        for agg in &report.aggregates {
            cells += 1;
            let wrong = agg.count(Outcome::DuplicateNames) + agg.count(Outcome::InvalidNames) + agg.count(Outcome::ModelViolation);
            let cap_rate = agg.count(Outcome::CapExceeded) as f64 / agg.trials as f64;
            worst_cap = worst_cap.max(cap_rate);
            if wrong > 0 || cap_rate > 0.01 {
                let selector = config.selector.map_or("default".to_string(), |s| s.to_string());
                bad.push(format!("{} [{selector}] n={}: {wrong} wrong, cap rate {cap_rate}", config.algorithm, agg.n));
            }
        }
    }
    Ok((
        bad.is_empty(),
        format!("{cells} (algorithm, selector, n) cells of {TRIALS} trials, worst cap rate {worst_cap:.3}; {}", summary(&bad)),
    ))
}

fn summary(bad: &[String]) -> String {
    if bad.is_empty() {
        "no violations".to_string()
    } else {
        format!("violations: {}", bad.join("; "))
    }
}

fn collision_enumeration(seed: u64) -> Check {
    let mut bad = Vec::new();
    let mut total = 0u64;
    for m in 1..=10usize {
        let mut detected = 0u64;
        for coins in 0..(1u64 << m) {
            let verdicts = simulate_verify_collision(m, Some(coins), seed).map_err(sim_err)?;
            if verdicts.iter().any(|&v| v) {
                detected += 1;
            }
            if verdicts.iter().any(|&v| v != verdicts[0]) {
                bad.push(format!("m={m} coins={coins:b}: verdicts disagree"));
            }
        }
        let expected = if m == 1 { 0 } else { (1u64 << m) - 2 };
        if detected != expected {
            bad.push(format!("m={m}: {detected} detections, expected {expected}"));
        }
        total += 1 << m;
    }
    Ok((bad.is_empty(), format!("{total} coin vectors over m = 1..10; {}", summary(&bad))))
}

fn sim_err(e: anonpram::sim::SimError) -> HarnessError {
    HarnessError::Config(e.to_string())
}

fn collision_frequency(seed: u64) -> Check {
    const TRIALS: u64 = 10_000;
    let mut detected = 0u64;
    for t in 0..TRIALS {
        let verdicts = simulate_verify_collision(2, None, derive_seed(seed, t)).map_err(sim_err)?;
        if verdicts[0] {
            detected += 1;
        }
    }
    let freq = detected as f64 / TRIALS as f64;
    Ok(((freq - 0.5).abs() <= 0.02, format!("{detected}/{TRIALS} = {freq:.4}, want 0.50 +- 0.02")))
}

fn bounded_lv_retries(seed: u64) -> Check {
    const TRIALS: u64 = 2000;
    let config = ExperimentConfig::new(Algorithm::ArbitraryBoundedLv, [64], TRIALS, seed).with_beta(4.0);
    let report = run_trials(&config)?;
    let retried = report.trials.iter().filter(|t| t.metrics.outer_iterations > 1).count();
    let correct = report.trials.iter().all(|t| t.outcome == Outcome::CorrectPermutation);
    let frac = retried as f64 / TRIALS as f64;
    Ok((
        frac <= 0.01 && correct,
        format!("{retried}/{TRIALS} trials retried ({frac:.4}, limit 0.01), all correct: {correct}"),
    ))
}

/// Iteration bound `lg(beta lg n) + 2`; `beta lg n` is taken as at least 1.
fn termination_bound(n: u64, beta: f64) -> f64 {
    (beta * lg(n)).max(1.0).log2() + 2.0
}

fn monte_carlo_termination(seed: u64) -> Check {
    const BETA: f64 = 6.0;
    let config = ExperimentConfig::new(Algorithm::ArbitraryBoundedMc, powers_of_two(0, 10), 200, seed).with_beta(BETA);
    let report = run_trials(&config)?;
    let mut bad = Vec::new();
    let mut worst = Vec::new();
    for agg in &report.aggregates {
        let bound = termination_bound(agg.n, BETA);
        let max_iter = report.trials_for(agg.n).map(|t| t.metrics.outer_iterations).max().unwrap_or(0);
        worst.push(format!("{}:{max_iter}/{bound:.2}", agg.n));
        if agg.terminated != agg.trials {
            bad.push(format!("n={}: {} of {} terminated", agg.n, agg.terminated, agg.trials));
        }
        if max_iter as f64 > bound {
            bad.push(format!("n={}: {max_iter} iterations > {bound:.2}", agg.n));
        }
    }
    Ok((bad.is_empty(), format!("max iterations/bound by n {}; {}", worst.join(" "), summary(&bad))))
}

fn monte_carlo_errors(seed: u64) -> Check {
    const TRIALS: u64 = 2000;
    let mut parts = Vec::new();
    let mut ok = true;
    for alg in Algorithm::ALL.into_iter().filter(|a| a.guarantee() == Guarantee::MonteCarlo) {
        let report = run_trials(&ExperimentConfig::new(alg, [64], TRIALS, seed))?;
        let agg = &report.aggregates[0];
        ok &= agg.error_rate.upper <= 0.01;
        parts.push(format!(
            "{alg}: {} errors, upper {:.4}",
            agg.trials - agg.count(Outcome::CorrectPermutation),
            agg.error_rate.upper
        ));
    }
    Ok((ok, format!("n=64, {TRIALS} trials, limit 0.01: {}", parts.join("; "))))
}

fn estimate_size_bounds(seed: u64) -> Check {
    const NS: [u64; 9] = [20, 24, 32, 48, 64, 96, 128, 192, 256];
    const TRIALS: u64 = 500;
    let mut bad = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    let mut worst_low: f64 = 1.0;
    for n in NS {
        let sizes = estimate_size_trials(n, TRIALS, derive_seed(seed, n))?;
        let max = *sizes.iter().max().unwrap();
        worst_ratio = worst_ratio.max(max as f64 / n as f64);
        if max >= 6 * n {
            bad.push(format!("n={n}: size {max} >= 6n"));
        }
        if n >= 32 {
            let frac = sizes.iter().filter(|&&s| s >= n).count() as f64 / TRIALS as f64;
            worst_low = worst_low.min(frac);
            if frac < 0.99 {
                bad.push(format!("n={n}: size >= n in only {frac:.3}"));
            }
        }
    }
    Ok((
        bad.is_empty(),
        format!("max size/n {worst_ratio:.2} (limit < 6), min fraction size >= n {worst_low:.3}; {}", summary(&bad)),
    ))
}

fn gauge_size_bounds(seed: u64) -> Check {
    const NS: [u64; 14] = [1, 2, 3, 5, 8, 13, 20, 32, 50, 64, 100, 128, 200, 256];
    const TRIALS: u64 = 500;
    let config = AlgoConfig::new(3.0).with_growth(Growth::Successor);
    let mut over = 0u64;
    let mut worst_ratio: f64 = 0.0;
    let mut worst_low: f64 = 1.0;
    let mut bad = Vec::new();
    for n in NS {
        let sizes = gauge_size_trials(n, TRIALS, derive_seed(seed, n), config)?;
        over += sizes.iter().filter(|&&s| s > 2 * n).count() as u64;
        let max = *sizes.iter().max().unwrap();
        worst_ratio = worst_ratio.max(max as f64 / n as f64);
        if n >= 32 {
            let frac = sizes.iter().filter(|&&s| s >= n).count() as f64 / TRIALS as f64;
            worst_low = worst_low.min(frac);
            if frac < 0.99 {
                bad.push(format!("n={n}: size >= n in only {frac:.3}"));
            }
        }
    }
    if over > 0 {
        bad.push(format!("{over} of {} trials returned size > 2n", NS.len() as u64 * TRIALS));
    }
    Ok((
        bad.is_empty(),
        format!("max size/n {worst_ratio:.2} (limit 2), min fraction size >= n {worst_low:.3}; {}", summary(&bad)),
    ))
}

fn means(report: &ExperimentReport, metric: impl Fn(&crate::AggregateStats) -> f64) -> Vec<(u64, f64)> {
    report.aggregates.iter().map(|a| (a.n, metric(a))).collect()
}

fn logarithmic_rounds(seed: u64) -> Check {
    let config = ExperimentConfig::new(Algorithm::CommonUnboundedLv, powers_of_two(4, 12), 100, seed).with_beta(2.0);
    let report = run_trials(&config)?;
    let points: Vec<(f64, f64)> = means(&report, |a| a.mean_rounds).into_iter().map(|(n, y)| (n as f64, y)).collect();
    let fit = fit_scaling(&points, ScalingModel::Log).map_err(|e| HarnessError::Config(e.to_string()))?;
    let at = |n: u64| report.aggregate_for(n).map_or(0.0, |a| a.mean_rounds);
    let ratio = at(4096) / at(256);
    let all_correct = report.trials.iter().all(|t| t.outcome == Outcome::CorrectPermutation);
    Ok((
        fit.r_squared >= 0.9 && ratio <= 2.0 && all_correct,
        format!(
            "rounds ~ {:.1} + {:.2} lg n, R^2 {:.3} (min 0.9); rounds(4096)/rounds(256) {ratio:.3} (max 2.0)",
            fit.intercept, fit.slope, fit.r_squared
        ),
    ))
}

fn linear_rounds(seed: u64) -> Check {
    let config = ExperimentConfig::new(Algorithm::ArbitraryBoundedLv, powers_of_two(4, 10), 50, seed);
    let report = run_trials(&config)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for w in report.aggregates.windows(2) {
        if w[0].n < 64 {
            continue;
        }
        let ratio = w[1].mean_rounds / w[0].mean_rounds;
        ok &= (1.6..=2.4).contains(&ratio);
        parts.push(format!("{}->{}: {ratio:.3}", w[0].n, w[1].n));
    }
    Ok((ok, format!("mean round ratios {} (want 1.6..2.4)", parts.join(", "))))
}

/// Per-algorithm constant `C` in `mean bits <= C n lg n`, growth function
/// and trials per size for the bit-scaling check.
fn bit_budget(alg: Algorithm) -> (f64, Growth, u64) {
    match alg {
        Algorithm::ArbitraryBoundedLv => (8.0, Growth::Doubling, 20),
        Algorithm::ArbitraryUnboundedLv => (8.0, Growth::Doubling, 20),
        Algorithm::CommonBoundedLv => (24.0, Growth::Doubling, 10),
        Algorithm::CommonUnboundedLv => (12.0, Growth::Doubling, 20),
        Algorithm::ArbitraryBoundedMc => (32.0, Growth::Doubling, 10),
        Algorithm::ArbitraryUnboundedMc => (48.0, Growth::Doubling, 20),
        Algorithm::CommonBoundedMc => (32.0, Growth::Doubling, 10),
        Algorithm::CommonUnboundedMc => (32.0, Growth::Successor, 20),
    }
}

fn random_bit_scaling(seed: u64) -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for alg in Algorithm::ALL {
        let (c, growth, trials) = bit_budget(alg);
        let config = ExperimentConfig::new(alg, powers_of_two(6, 10), trials, seed).with_growth(growth);
        let report = run_trials(&config)?;
        let bits = means(&report, |a| a.mean_bits);
        let worst_c = bits.iter().map(|&(n, b)| b / (n as f64 * lg(n))).fold(0.0, f64::max);
        let worst_ratio = bits.windows(2).map(|w| w[1].1 / w[0].1).fold(0.0, f64::max);
        let pass = worst_c <= c && worst_ratio <= 2.6;
        ok &= pass;
        parts.push(format!(
            "{alg}: bits/(n lg n) <= {worst_c:.1} (C = {c}), max doubling ratio {worst_ratio:.2}{}",
            if pass { "" } else { " FAIL" }
        ));
    }
    Ok((ok, format!("n = 64..1024, ratio limit 2.6: {}", parts.join("; "))))
}

fn memory_accounting(seed: u64) -> Check {
    const COMMON_UNBOUNDED_MC_C: f64 = 32.0;
    let mut bad = Vec::new();
    let mut parts = Vec::new();

    // arb-unb-lv: one pads array plus one counting tree per attempt
    let config = ExperimentConfig::new(Algorithm::ArbitraryUnboundedLv, powers_of_two(4, 10), 50, seed);
    let report = run_trials(&config)?;
    let mut worst: f64 = 0.0;
    for t in &report.trials {
        let bins = arbitrary_unbounded_lv_bins(t.n);
        let per_attempt = (bins + TreeLayout::cells(bins)) as f64;
        let ratio = (t.metrics.cells_touched - FIXED_CELLS.min(t.metrics.cells_touched)) as f64
            / (t.metrics.outer_iterations.max(1) as f64 * per_attempt);
        worst = worst.max(ratio);
        if ratio > 1.0 {
            bad.push(format!("arb-unb-lv n={} trial {}: {} cells", t.n, t.trial, t.metrics.cells_touched));
        }
    }
    parts.push(format!("arb-unb-lv cells per attempt / (n/ln n + tree) <= {worst:.2} (C = 1)"));

    let config = ExperimentConfig::new(Algorithm::CommonUnboundedMc, powers_of_two(4, 10), 50, seed).with_growth(Growth::Successor);
    let report = run_trials(&config)?;
    let worst = report
        .trials
        .iter()
        .map(|t| t.metrics.cells_touched as f64 / t.n as f64)
        .fold(0.0, f64::max);
    if worst > COMMON_UNBOUNDED_MC_C {
        bad.push(format!("com-unb-mc touched {worst:.1} n cells"));
    }
    parts.push(format!("com-unb-mc (successor) cells/n <= {worst:.1} (C = {COMMON_UNBOUNDED_MC_C})"));

    for alg in Algorithm::ALL.into_iter().filter(|a| a.bounded_memory()) {
        let config = ExperimentConfig::new(alg, [4, 16, 64, 256], 20, seed);
        let report = run_trials(&config)?;
        let max = report.trials.iter().map(|t| t.metrics.cells_touched).max().unwrap_or(0);
        if max > FIXED_CELLS {
            bad.push(format!("{alg} touched {max} cells"));
        }
        parts.push(format!("{alg} <= {max} cells"));
    }
    Ok((bad.is_empty(), format!("{} (bounded limit {FIXED_CELLS}); {}", parts.join(", "), summary(&bad))))
}

fn determinism(seed: u64) -> Check {
    let configs = [
        ExperimentConfig::new(Algorithm::CommonUnboundedMc, [16, 64], 40, seed).with_growth(Growth::Successor),
        ExperimentConfig::new(Algorithm::ArbitraryBoundedLv, [8, 32], 40, seed).with_selector(Selector::MaximizeDistinctSurvivors),
        ExperimentConfig::new(Algorithm::ArbitraryUnboundedLv, [8, 32], 40, seed).with_selector(Selector::SeededRandom),
        ExperimentConfig::new(Algorithm::CommonBoundedMc, [16], 20, seed),
    ];
    let mut bad = Vec::new();
    for config in &configs {
        let a = run_trials_with_jobs(config, 1)?;
        let b = run_trials_with_jobs(config, 3)?;
        if csv_string(&a)? != csv_string(&b)? || aggregate_json(&a)? != aggregate_json(&b)? {
            bad.push(config.algorithm.to_string());
        }
    }
    Ok((
        bad.is_empty(),
        format!("{} configs run twice with 1 and 3 worker threads; {}", configs.len(), summary(&bad)),
    ))
}

fn collective_oracles(seed: u64) -> Check {
    const VECTORS: u64 = 1000;
    let mut rng = ProcessorRng::seeded(seed);
    let mut draw = |m: u64| draw_uniform(&mut rng, Word::from(m)).value.as_u64();
    let mut bad = 0u64;
    for _ in 0..VECTORS {
        let m = draw(64);
        // per-leaf processor counts in 0..=3
        let counts: Vec<u64> = (0..m).map(|_| draw(4) - 1).collect();
        let bystanders = draw(4) - 1;

        let mut anchors = Vec::new();
        let mut positions = Vec::new();
        for (i, &c) in counts.iter().enumerate() {
            for offset in 1..=c {
                anchors.push(Some(i as u64 + 1));
                positions.push((i as u64 + 1, offset));
            }
        }
        anchors.extend((0..bystanders).map(|_| None));

        let occupied = counts.iter().filter(|&&c| c > 0).count() as u64;
        let count = simulate_count_occupied(m, &anchors, WritePolicy::Common).map_err(sim_err)?;
        let count_ok = count.views.iter().zip(&anchors).all(|(view, anchor)| {
            let rank = anchor.map(|leaf| counts[..leaf as usize].iter().filter(|&&c| c > 0).count() as u64);
            view.total == occupied && view.rank == rank
        });

        let total: u64 = counts.iter().sum();
        let ranks = simulate_rank_positions(m, &positions, WritePolicy::Common).map_err(sim_err)?;
        let rank_ok = ranks.views.iter().zip(&positions).all(|(view, &(leaf, offset))| {
            let before: u64 = counts[..leaf as usize - 1].iter().sum();
            view.total == total && view.rank == Some(before + offset)
        });
        if !(count_ok && rank_ok) {
            bad += 1;
        }
    }
    Ok((bad == 0, format!("{VECTORS} random vectors with m <= 64, {bad} mismatches")))
}
