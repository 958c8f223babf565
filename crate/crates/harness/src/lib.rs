//! Seeded trial ensembles over the naming algorithms, outcome
//! classification, statistics and the acceptance suite.

mod config;
mod error;
mod outcome;
mod report;
mod stats;
pub mod suite;
mod trials;

pub use config::{ExperimentConfig, DEFAULT_CAP_MULTIPLIER};
pub use error::HarnessError;
pub use outcome::{classify_outcome, Outcome};
pub use report::{aggregate_json, aggregate_json_all, csv_string, write_csv, CsvRow};
pub use stats::{estimate_probability, fit_scaling, Fit, FitError, ProbabilityEstimate, ScalingModel, WILSON_Z_99};
pub use trials::{
    aggregate, estimate_size_trials, gauge_size_trials, names_digest, run_trial, run_trials, run_trials_with_jobs,
    AggregateStats, ExperimentReport, TrialReport,
};
