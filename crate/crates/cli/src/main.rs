use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anonpram::naming::{Algorithm, Growth, Model};
use anonpram::sim::Selector;
use anonpram_harness::suite::{self, SuiteOptions, DEFAULT_SUITE_SEED};
use anonpram_harness::{
    aggregate_json_all, run_trials, run_trials_with_jobs, write_csv, ExperimentConfig, ExperimentReport, HarnessError,
    Outcome, DEFAULT_CAP_MULTIPLIER,
};
use clap::{Args, Parser, Subcommand};

/// Simulate anonymous PRAM naming algorithms and check their behaviour.
#[derive(Debug, Parser)]
#[command(name = "anonpram", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run seeded trials of one algorithm and report them as CSV and JSON.
    Run(RunArgs),
    /// Run several algorithms and beta values over a list of sizes.
    Sweep(SweepArgs),
    /// Run the acceptance suite and print one PASS/FAIL line per criterion.
    Suite(SuiteArgs),
    /// Print the algorithm registry.
    List,
}

#[derive(Debug, Args)]
struct TrialArgs {
    /// Processor counts, comma separated.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    ns: Vec<u64>,
    /// Trials per processor count.
    #[arg(long)]
    trials: u64,
    /// Master seed; trial i runs with a seed derived from it and i.
    #[arg(long)]
    seed: u64,
    /// Growth of the size guess in the unbounded Monte Carlo algorithms.
    #[arg(long)]
    growth: Option<Growth>,
    /// Concurrent-write selector of the Arbitrary PRAM (first, last, random, adversarial).
    #[arg(long)]
    selector: Option<Selector>,
    /// Round cap as a multiple of the algorithm's nominal round count.
    #[arg(long, default_value_t = DEFAULT_CAP_MULTIPLIER)]
    cap_multiplier: u64,
    /// Allow reading and writing a cell in the same round.
    #[arg(long)]
    lenient: bool,
    /// Directory for trials.csv and aggregate.json; CSV goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for trials.
    #[arg(long, env = "ANONPRAM_JOBS")]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Algorithm id, see `anonpram list`.
    #[arg(long)]
    algo: Algorithm,
    /// Analysis constant; the algorithm's default when absent.
    #[arg(long)]
    beta: Option<f64>,
    #[command(flatten)]
    trials: TrialArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Algorithm ids, comma separated, or `all`. The selector only applies
    /// to the Arbitrary-model ones.
    #[arg(long, value_delimiter = ',', required = true)]
    algo: Vec<String>,
    /// Beta values, comma separated; each algorithm's default when absent.
    #[arg(long, value_delimiter = ',')]
    beta: Vec<f64>,
    #[command(flatten)]
    trials: TrialArgs,
}

#[derive(Debug, Args)]
struct SuiteArgs {
    /// Suite seed.
    #[arg(long, default_value_t = DEFAULT_SUITE_SEED)]
    seed: u64,
    /// Criteria to run, comma separated; all when absent.
    #[arg(long, value_delimiter = ',')]
    only: Vec<u32>,
    /// Worker threads for trials.
    #[arg(long, env = "ANONPRAM_JOBS")]
    jobs: Option<usize>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(msg) => Failure::Usage(msg),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List => list(),
        Command::Run(args) => run(args),
        Command::Sweep(args) => sweep(args),
        Command::Suite(args) => run_suite(args),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn list() -> Result<ExitCode, Failure> {
    let mut out = io::stdout().lock();
    for alg in Algorithm::ALL {
        let model = match alg.model() {
            Model::Common => "common",
            Model::Arbitrary => "arbitrary",
        };
        let memory = if alg.bounded_memory() { "bounded" } else { "unbounded" };
        let guarantee = match alg.guarantee() {
            anonpram::naming::Guarantee::LasVegas => "las-vegas",
            anonpram::naming::Guarantee::MonteCarlo => "monte-carlo",
        };
        writeln!(out, "{}\t{model}\t{memory}\t{guarantee}\tbeta={}", alg.id(), alg.default_beta())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn experiment(alg: Algorithm, beta: Option<f64>, args: &TrialArgs, selector: Option<Selector>) -> ExperimentConfig {
    let mut config = ExperimentConfig::new(alg, args.ns.clone(), args.trials, args.seed).with_cap_multiplier(args.cap_multiplier);
    if let Some(beta) = beta {
        config = config.with_beta(beta);
    }
    if let Some(growth) = args.growth {
        config = config.with_growth(growth);
    }
    config.selector = selector;
    config.strict = !args.lenient;
    config
}

fn execute(configs: &[ExperimentConfig], args: &TrialArgs) -> Result<Vec<ExperimentReport>, Failure> {
    // reject everything up front so nothing runs on a bad sweep
    for config in configs {
        config.validate()?;
    }
    configs
        .iter()
        .map(|config| match args.jobs {
            Some(jobs) => run_trials_with_jobs(config, jobs),
            None => run_trials(config),
        })
        .collect::<Result<_, _>>()
        .map_err(Failure::from)
}

fn emit(reports: &[ExperimentReport], out: Option<&Path>) -> Result<(), Failure> {
    let trials = reports.iter().flat_map(|r| &r.trials);
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            write_csv(trials, fs::File::create(dir.join("trials.csv"))?)?;
            fs::write(dir.join("aggregate.json"), aggregate_json_all(reports)? + "\n")?;
        }
        None => write_csv(trials, io::stdout().lock())?,
    }
    let mut err = io::stderr().lock();
    for report in reports {
        for agg in &report.aggregates {
            writeln!(
                err,
                "{} n={}: {}/{} correct, mean rounds {:.1}, mean bits {:.1}, max cells {}",
                report.config.algorithm,
                agg.n,
                agg.count(Outcome::CorrectPermutation),
                agg.trials,
                agg.mean_rounds,
                agg.mean_bits,
                agg.max_cells
            )?;
        }
    }
    Ok(())
}

fn run(args: RunArgs) -> Result<ExitCode, Failure> {
    let config = experiment(args.algo, args.beta, &args.trials, args.trials.selector);
    let reports = execute(&[config], &args.trials)?;
    emit(&reports, args.trials.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn sweep(args: SweepArgs) -> Result<ExitCode, Failure> {
    let mut algorithms = Vec::new();
    for id in &args.algo {
        if id == "all" {
            algorithms.extend(Algorithm::ALL);
        } else {
            algorithms.push(id.parse::<Algorithm>().map_err(Failure::Usage)?);
        }
    }
    let betas: Vec<Option<f64>> = if args.beta.is_empty() {
        vec![None]
    } else {
        args.beta.iter().copied().map(Some).collect()
    };
    let mut configs = Vec::new();
    for &alg in &algorithms {
        let selector = args.trials.selector.filter(|_| alg.model() == Model::Arbitrary);
        for &beta in &betas {
            configs.push(experiment(alg, beta, &args.trials, selector));
        }
    }
    let reports = execute(&configs, &args.trials)?;
    emit(&reports, args.trials.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn run_suite(args: SuiteArgs) -> Result<ExitCode, Failure> {
    let opts = SuiteOptions { seed: args.seed };
    let ids: Vec<u32> = if args.only.is_empty() {
        suite::CRITERIA.iter().map(|&(id, _)| id).collect()
    } else {
        args.only.clone()
    };
    let pool = rayon_pool(args.jobs)?;
    let mut failed = 0;
    for id in ids {
        let result = match &pool {
            Some(pool) => pool.install(|| suite::run_criterion(id, &opts)),
            None => suite::run_criterion(id, &opts),
        }?;
        if !result.passed {
            failed += 1;
        }
        let mut out = io::stdout().lock();
        writeln!(out, "{result}")?;
        out.flush()?;
    }
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn rayon_pool(jobs: Option<usize>) -> Result<Option<rayon::ThreadPool>, Failure> {
    jobs.map(|j| rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build())
        .transpose()
        .map_err(|e| Failure::Runtime(e.to_string()))
}
