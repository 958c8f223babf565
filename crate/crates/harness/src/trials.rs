use std::collections::BTreeMap;

use anonpram::naming::{self, AlgoConfig, Algorithm};
use anonpram::sim::{derive_seed, mix64, ExecutionMetrics, RunConfig, WritePolicy};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{classify_outcome, estimate_probability, ExperimentConfig, HarnessError, Outcome, ProbabilityEstimate};

/// One trial: its seed, verdict and costs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialReport {
    pub algorithm: Algorithm,
    pub n: u64,
    pub trial: u64,
    pub seed: u64,
    pub outcome: Outcome,
    /// [`names_digest`] of the assignment, 0 when the run did not terminate.
    pub digest: u64,
    /// Default (all zero) unless the run terminated, except that a capped
    /// run reports the cap as its rounds.
    pub metrics: ExecutionMetrics,
}

/// Order-sensitive 64-bit fingerprint of a name assignment.
pub fn names_digest(names: &[u64]) -> u64 {
    names.iter().fold(mix64(names.len() as u64), |h, &x| mix64(h ^ mix64(x)))
}

/// Statistics of all trials for one `n`. Means are over terminated trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub n: u64,
    pub trials: u64,
    pub terminated: u64,
    pub mean_rounds: f64,
    pub max_rounds: u64,
    pub mean_bits: f64,
    pub max_bits: u64,
    pub total_bits: u64,
    pub max_cells: u64,
    pub outcomes: BTreeMap<Outcome, u64>,
    /// Fraction of trials that did not end in a correct permutation.
    pub error_rate: ProbabilityEstimate,
    /// Number of trials by outer-iteration count.
    pub retries: BTreeMap<u64, u64>,
}

impl AggregateStats {
    pub fn count(&self, outcome: Outcome) -> u64 {
        self.outcomes.get(&outcome).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    /// Sorted by `n` in config order, then by trial index.
    pub trials: Vec<TrialReport>,
    pub aggregates: Vec<AggregateStats>,
}

impl ExperimentReport {
    pub fn aggregate_for(&self, n: u64) -> Option<&AggregateStats> {
        self.aggregates.iter().find(|a| a.n == n)
    }

    pub fn trials_for(&self, n: u64) -> impl Iterator<Item = &TrialReport> {
        self.trials.iter().filter(move |t| t.n == n)
    }
}

/// Runs trial `trial` of `config` with `n` processors. Its seed is
/// `derive_seed(config.seed, trial)`.
pub fn run_trial(config: &ExperimentConfig, n: u64, trial: u64) -> Result<TrialReport, HarnessError> {
    let seed = derive_seed(config.seed, trial);
    let sim = config.run_config(n, seed);
    let count = usize::try_from(n).map_err(|_| HarnessError::Config(format!("n = {n} is too large")))?;
    let (outcome, digest, metrics) = match naming::run(config.algorithm, count, &config.algo, &sim) {
        Ok(run) => (classify_outcome(&run.names, n), names_digest(&run.names), run.metrics),
        Err(err) => {
            let outcome = Outcome::from_error(&err).ok_or_else(|| HarnessError::Config(err.to_string()))?;
            let metrics = ExecutionMetrics {
                rounds: sim.round_cap.filter(|_| outcome == Outcome::CapExceeded).unwrap_or(0),
                ..ExecutionMetrics::default()
            };
            (outcome, 0, metrics)
        }
    };
    Ok(TrialReport {
        algorithm: config.algorithm,
        n,
        trial,
        seed,
        outcome,
        digest,
        metrics,
    })
}

/// Runs every trial of `config` on the current rayon pool.
pub fn run_trials(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    config.validate()?;
    let jobs: Vec<(u64, u64)> = config
        .ns
        .iter()
        .flat_map(|&n| (0..config.trials).map(move |t| (n, t)))
        .collect();
    let trials = jobs
        .par_iter()
        .map(|&(n, t)| run_trial(config, n, t))
        .collect::<Result<Vec<_>, _>>()?;
    let aggregates = config
        .ns
        .iter()
        .map(|&n| {
            let group: Vec<&TrialReport> = trials.iter().filter(|r| r.n == n).collect();
            aggregate(n, &group)
        })
        .collect();
    Ok(ExperimentReport {
        config: config.clone(),
        trials,
        aggregates,
    })
}

/// [`run_trials`] on a dedicated pool of `jobs` threads.
pub fn run_trials_with_jobs(config: &ExperimentConfig, jobs: usize) -> Result<ExperimentReport, HarnessError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    pool.install(|| run_trials(config))
}

pub fn aggregate(n: u64, trials: &[&TrialReport]) -> AggregateStats {
    let done: Vec<&ExecutionMetrics> = trials
        .iter()
        .filter(|r| r.outcome.terminated())
        .map(|r| &r.metrics)
        .collect();
    let mean = |f: &dyn Fn(&ExecutionMetrics) -> u64| {
        if done.is_empty() {
            0.0
        } else {
            done.iter().map(|m| f(m) as f64).sum::<f64>() / done.len() as f64
        }
    };
    let mut outcomes = BTreeMap::new();
    let mut retries = BTreeMap::new();
    for r in trials {
        *outcomes.entry(r.outcome).or_default() += 1;
        if r.outcome.terminated() {
            *retries.entry(r.metrics.outer_iterations).or_default() += 1;
        }
    }
    let correct = trials.iter().filter(|r| r.outcome == Outcome::CorrectPermutation).count() as u64;
    let count = trials.len() as u64;
    AggregateStats {
        n,
        trials: count,
        terminated: done.len() as u64,
        mean_rounds: mean(&|m| m.rounds),
        max_rounds: trials.iter().map(|r| r.metrics.rounds).max().unwrap_or(0),
        mean_bits: mean(&|m| m.random_bits),
        max_bits: trials.iter().map(|r| r.metrics.random_bits).max().unwrap_or(0),
        total_bits: trials.iter().map(|r| r.metrics.random_bits).sum(),
        max_cells: trials.iter().map(|r| r.metrics.cells_touched).max().unwrap_or(0),
        outcomes,
        error_rate: estimate_probability(count - correct, count.max(1)),
        retries,
    }
}

fn size_trials<F>(n: u64, trials: u64, seed: u64, one: F) -> Result<Vec<u64>, HarnessError>
where
    F: Fn(usize, &RunConfig) -> Result<u64, anonpram::sim::SimError> + Send + Sync,
{
    let count = usize::try_from(n).map_err(|_| HarnessError::Config(format!("n = {n} is too large")))?;
    if count == 0 {
        return Err(HarnessError::Config("at least one processor is required".into()));
    }
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let sim = RunConfig::new(WritePolicy::Common, derive_seed(seed, t));
            one(count, &sim).map_err(|e| HarnessError::Config(e.to_string()))
        })
        .collect()
}

/// Size returned by the constant-memory estimator in each of `trials`
/// seeded runs with `n` processors.
pub fn estimate_size_trials(n: u64, trials: u64, seed: u64) -> Result<Vec<u64>, HarnessError> {
    size_trials(n, trials, seed, |n, sim| naming::run_estimate_size(n, sim).map(|(e, _)| e.size))
}

/// Size returned by the tree-based gauge in each of `trials` seeded runs.
pub fn gauge_size_trials(n: u64, trials: u64, seed: u64, config: AlgoConfig) -> Result<Vec<u64>, HarnessError> {
    size_trials(n, trials, seed, move |n, sim| naming::run_gauge_size(n, &config, sim).map(|(s, _)| s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_trivial_trial() {
        let config = ExperimentConfig::new(Algorithm::ArbitraryBoundedLv, [1], 1, 5);
        let report = run_trials(&config).unwrap();
        assert_eq!(report.trials.len(), 1);
        assert_eq!(report.trials[0].outcome, Outcome::CorrectPermutation);
        assert_eq!(report.trials[0].seed, derive_seed(5, 0));
    }

    #[test]
    fn aggregate_counts_and_conserves_bits() {
        let config = ExperimentConfig::new(Algorithm::CommonUnboundedLv, [4, 16], 12, 9);
        let report = run_trials(&config).unwrap();
        for agg in &report.aggregates {
            let group: Vec<&TrialReport> = report.trials_for(agg.n).collect();
            assert_eq!(agg.trials, 12);
            assert_eq!(agg.total_bits, group.iter().map(|t| t.metrics.random_bits).sum::<u64>());
            assert_eq!(agg.outcomes.values().sum::<u64>(), 12);
            assert_eq!(agg.retries.values().sum::<u64>(), agg.terminated);
            assert!(agg.mean_rounds <= agg.max_rounds as f64);
        }
    }

    #[test]
    fn capped_trials_report_the_cap() {
        let config = ExperimentConfig::new(Algorithm::CommonUnboundedLv, [64], 40, 2).with_cap_multiplier(1);
        let cap = config.run_config(64, 0).round_cap.unwrap();
        let report = run_trials(&config).unwrap();
        for t in &report.trials {
            match t.outcome {
                Outcome::CapExceeded => assert_eq!(t.metrics.rounds, cap),
                other => assert_eq!(other, Outcome::CorrectPermutation),
            }
        }
    }

    #[test]
    fn digest_depends_on_order() {
        assert_ne!(names_digest(&[1, 2]), names_digest(&[2, 1]));
        assert_eq!(names_digest(&[3, 1, 2]), names_digest(&[3, 1, 2]));
    }
}
