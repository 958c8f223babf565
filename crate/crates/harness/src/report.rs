use std::io::Write;

use serde::Serialize;

use crate::{ExperimentReport, HarnessError, Outcome, TrialReport};

/// One CSV line per trial.
#[derive(Debug, Clone, Serialize)]
pub struct CsvRow {
    pub algorithm_id: &'static str,
    pub n: u64,
    pub trial: u64,
    pub seed: u64,
    pub outcome: Outcome,
    pub rounds: u64,
    pub bits_total: u64,
    pub cells_touched: u64,
    pub outer_iterations: u64,
}

impl From<&TrialReport> for CsvRow {
    fn from(r: &TrialReport) -> Self {
        CsvRow {
            algorithm_id: r.algorithm.id(),
            n: r.n,
            trial: r.trial,
            seed: r.seed,
            outcome: r.outcome,
            rounds: r.metrics.rounds,
            bits_total: r.metrics.random_bits,
            cells_touched: r.metrics.cells_touched,
            outer_iterations: r.metrics.outer_iterations,
        }
    }
}

/// Writes a header and one row per trial.
pub fn write_csv<'a, W: Write>(trials: impl IntoIterator<Item = &'a TrialReport>, out: W) -> Result<(), HarnessError> {
    let mut writer = csv::Writer::from_writer(out);
    let mut empty = true;
    for t in trials {
        writer.serialize(CsvRow::from(t))?;
        empty = false;
    }
    if empty {
        writer.write_record([
            "algorithm_id",
            "n",
            "trial",
            "seed",
            "outcome",
            "rounds",
            "bits_total",
            "cells_touched",
            "outer_iterations",
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn csv_string(report: &ExperimentReport) -> Result<String, HarnessError> {
    let mut buf = Vec::new();
    write_csv(&report.trials, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
}

#[derive(Serialize)]
struct AggregateDocument<'a> {
    config: &'a crate::ExperimentConfig,
    aggregates: &'a [crate::AggregateStats],
}

impl<'a> From<&'a ExperimentReport> for AggregateDocument<'a> {
    fn from(report: &'a ExperimentReport) -> Self {
        AggregateDocument {
            config: &report.config,
            aggregates: &report.aggregates,
        }
    }
}

/// Pretty-printed JSON with the configuration and per-`n` statistics.
pub fn aggregate_json(report: &ExperimentReport) -> Result<String, HarnessError> {
    Ok(serde_json::to_string_pretty(&AggregateDocument::from(report))?)
}

/// Like [`aggregate_json`], as one array over several experiments.
pub fn aggregate_json_all(reports: &[ExperimentReport]) -> Result<String, HarnessError> {
    let docs: Vec<AggregateDocument> = reports.iter().map(AggregateDocument::from).collect();
    Ok(serde_json::to_string_pretty(&docs)?)
}
