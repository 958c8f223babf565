//! Randomized naming of anonymous processors.
//!
//! Every algorithm leaves each processor with a private integer name. The
//! four Las Vegas algorithms know `n` and always produce a permutation of
//! `1..=n`; the four Monte Carlo algorithms do not know `n`, always produce
//! names covering `1..=max` for some `max <= n`, and may with small
//! probability give two processors the same name.

mod config;
mod lv;
mod mc;
mod size;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use config::{AlgoConfig, Growth};
pub use lv::{
    arbitrary_unbounded_bins as arbitrary_unbounded_lv_bins, common_bounded_restored_bins,
    common_bounded_verifications, common_unbounded_bins,
};
pub use mc::{arbitrary_unbounded_bins as arbitrary_unbounded_mc_bins, size_verifications};
pub use size::SizeEstimate;

use crate::sim::{
    run_program, Coroutine, Execution, ExecutionMetrics, ModelViolation, Processor, RunConfig, SimError, WritePolicy,
};
use crate::{Addr, Word};
use config::{ceil_count, lg, ln, pow_range};

/// Fixed shared variables. Bounded-memory algorithms touch nothing else.
pub(crate) mod cells {
    use crate::Addr;

    pub const PAD: Addr = 0;
    /// `Counter` or `Last-Name`, depending on the algorithm.
    pub const COUNTER: Addr = 1;
    pub const ALL_NAMED: Addr = 2;
    pub const HEADS: Addr = 3;
    pub const TAILS: Addr = 4;
    pub const COLLISION: Addr = 5;
    pub const PROBE: Addr = 6;
    pub const NONEMPTY: Addr = 7;
}

/// Cells reserved for the fixed variables; also the memory window of the
/// bounded-memory algorithms.
pub const FIXED_CELLS: Addr = 8;

/// Final private state of one processor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Named {
    pub name: u64,
    /// Outer-loop iterations the processor went through.
    pub iterations: u64,
}

pub(crate) type Outcome = Result<Named, ModelViolation>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    Common,
    Arbitrary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Guarantee {
    LasVegas,
    MonteCarlo,
}

/// The eight naming algorithms, by write model, memory and guarantee.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "arb-bnd-lv")]
    ArbitraryBoundedLv,
    #[serde(rename = "arb-unb-lv")]
    ArbitraryUnboundedLv,
    #[serde(rename = "com-bnd-lv")]
    CommonBoundedLv,
    #[serde(rename = "com-unb-lv")]
    CommonUnboundedLv,
    #[serde(rename = "arb-bnd-mc")]
    ArbitraryBoundedMc,
    #[serde(rename = "arb-unb-mc")]
    ArbitraryUnboundedMc,
    #[serde(rename = "com-bnd-mc")]
    CommonBoundedMc,
    #[serde(rename = "com-unb-mc")]
    CommonUnboundedMc,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::ArbitraryBoundedLv,
        Algorithm::ArbitraryUnboundedLv,
        Algorithm::CommonBoundedLv,
        Algorithm::CommonUnboundedLv,
        Algorithm::ArbitraryBoundedMc,
        Algorithm::ArbitraryUnboundedMc,
        Algorithm::CommonBoundedMc,
        Algorithm::CommonUnboundedMc,
    ];

    /// Stable identifier used on the command line and in reports.
    pub fn id(self) -> &'static str {
        match self {
            Algorithm::ArbitraryBoundedLv => "arb-bnd-lv",
            Algorithm::ArbitraryUnboundedLv => "arb-unb-lv",
            Algorithm::CommonBoundedLv => "com-bnd-lv",
            Algorithm::CommonUnboundedLv => "com-unb-lv",
            Algorithm::ArbitraryBoundedMc => "arb-bnd-mc",
            Algorithm::ArbitraryUnboundedMc => "arb-unb-mc",
            Algorithm::CommonBoundedMc => "com-bnd-mc",
            Algorithm::CommonUnboundedMc => "com-unb-mc",
        }
    }

    pub fn model(self) -> Model {
        match self {
            Algorithm::ArbitraryBoundedLv
            | Algorithm::ArbitraryUnboundedLv
            | Algorithm::ArbitraryBoundedMc
            | Algorithm::ArbitraryUnboundedMc => Model::Arbitrary,
            _ => Model::Common,
        }
    }

    pub fn guarantee(self) -> Guarantee {
        match self {
            Algorithm::ArbitraryBoundedLv
            | Algorithm::ArbitraryUnboundedLv
            | Algorithm::CommonBoundedLv
            | Algorithm::CommonUnboundedLv => Guarantee::LasVegas,
            _ => Guarantee::MonteCarlo,
        }
    }

    /// Whether the algorithm uses only the [`FIXED_CELLS`] shared cells.
    pub fn bounded_memory(self) -> bool {
        matches!(
            self,
            Algorithm::ArbitraryBoundedLv
                | Algorithm::CommonBoundedLv
                | Algorithm::ArbitraryBoundedMc
                | Algorithm::CommonBoundedMc
        )
    }

    /// Whether every run terminates, so no round cap is needed.
    pub fn always_terminates(self) -> bool {
        matches!(self, Algorithm::ArbitraryBoundedMc | Algorithm::ArbitraryUnboundedMc)
    }

    /// Default `beta`: the smallest value for which the algorithm's failure
    /// or retry probability is polynomially small with exponent about 2.
    pub fn default_beta(self) -> f64 {
        match self {
            Algorithm::ArbitraryBoundedLv => 4.0,
            Algorithm::ArbitraryUnboundedLv => 4.0,
            Algorithm::CommonBoundedLv => 6.0,
            Algorithm::CommonUnboundedLv => 2.0,
            Algorithm::ArbitraryBoundedMc => 6.0,
            Algorithm::ArbitraryUnboundedMc => 9.0,
            Algorithm::CommonBoundedMc => 6.0,
            Algorithm::CommonUnboundedMc => 4.0,
        }
    }

    pub fn default_config(self) -> AlgoConfig {
        AlgoConfig::new(self.default_beta())
    }

    /// Rough expected round count for `n` processors, used to size round
    /// caps. Deliberately on the generous side.
    pub fn nominal_rounds(self, n: u64, config: &AlgoConfig) -> u64 {
        let beta = config.beta;
        let lg_up = |x: u64| ceil_count(lg(x.max(2)));
        let rounds = match self {
            Algorithm::ArbitraryBoundedLv => 4 * n + 2,
            Algorithm::ArbitraryUnboundedLv => {
                let bins = lv::arbitrary_unbounded_bins(n);
                5 * (3 * ceil_count(ln(n.max(2))) + 4) + 2 * lg_up(bins) + 2
            }
            Algorithm::CommonBoundedLv => {
                let v = lv::common_bounded_verifications(n, beta);
                3 * n * (5 * v + 6) + 4
            }
            Algorithm::CommonUnboundedLv => {
                let bins = lv::common_unbounded_bins(n, beta);
                5 * lg_up(n) + 2 * lg_up(bins) + 3
            }
            Algorithm::ArbitraryBoundedMc | Algorithm::ArbitraryUnboundedMc => {
                // runs are not capped; a linear-time figure for reference
                6 * n + 64
            }
            Algorithm::CommonBoundedMc => {
                let size = 6 * n;
                let v = mc::size_verifications(size, beta);
                4 * size * lg_up(size) + 2 * (3 * size * lg_up(size) + n * (5 * v + 6))
            }
            Algorithm::CommonUnboundedMc => {
                let top = ceil_count(lg(n.max(2)) * 2.0 + lg(ceil_count(beta).max(2))) + 2;
                let size = 1u64 << top.min(40);
                let v = mc::size_verifications(size, beta);
                top * (2 * top + 3) + 10 * v + 2 * lg_up(3 * size) + 8
            }
        };
        rounds.max(1)
    }

    /// Round cap for `n` processors: `multiplier` times
    /// [`nominal_rounds`](Self::nominal_rounds), or none for algorithms that
    /// always terminate.
    pub fn round_cap(self, n: u64, config: &AlgoConfig, multiplier: u64) -> Option<u64> {
        (!self.always_terminates()).then(|| self.nominal_rounds(n, config).saturating_mul(multiplier))
    }

    /// Write policy matching the algorithm's model; `selector` is ignored
    /// for Common-model algorithms.
    pub fn policy(self, selector: crate::sim::Selector) -> WritePolicy {
        match self.model() {
            Model::Common => WritePolicy::Common,
            Model::Arbitrary => WritePolicy::Arbitrary(selector),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|alg| alg.id() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

/// Names and costs of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamingRun {
    /// Name of each processor, by simulator-side index.
    pub names: Vec<u64>,
    pub metrics: ExecutionMetrics,
}

/// Checks that `alg` can run with `n` processors under `config`, without
/// running it.
pub fn validate(alg: Algorithm, n: usize, config: &AlgoConfig) -> Result<(), SimError> {
    if n == 0 {
        return Err(SimError::Config("at least one processor is required".into()));
    }
    if !(config.beta.is_finite() && config.beta > 0.0) {
        return Err(SimError::Config(format!("beta must be a positive number, got {}", config.beta)));
    }
    if alg == Algorithm::CommonUnboundedLv && config.beta <= 1.0 {
        return Err(SimError::Config(format!("{alg} requires beta > 1, got {}", config.beta)));
    }
    if matches!(alg, Algorithm::ArbitraryBoundedLv | Algorithm::ArbitraryUnboundedLv) {
        label_range(n as u64, config.beta)?;
    }
    Ok(())
}

fn label_range(n: u64, beta: f64) -> Result<Word, SimError> {
    pow_range(n, beta).ok_or_else(|| SimError::Config(format!("n^beta = {n}^{beta} does not fit a 256-bit cell")))
}

fn check_config(alg: Algorithm, n: usize, config: &AlgoConfig, sim: &RunConfig) -> Result<(), SimError> {
    validate(alg, n, config)?;
    let model_matches = matches!(
        (alg.model(), sim.policy),
        (Model::Common, WritePolicy::Common) | (Model::Arbitrary, WritePolicy::Arbitrary(_))
    );
    if !model_matches {
        return Err(SimError::Config(format!("{alg} cannot run under {:?}", sim.policy)));
    }
    Ok(())
}

fn execute<F, Fut>(n: usize, sim: &RunConfig, body: F) -> Result<Execution<Outcome>, SimError>
where
    F: Fn(Processor) -> Fut + Copy + 'static,
    Fut: std::future::Future<Output = Outcome> + 'static,
{
    run_program(n, || Coroutine::new(body), sim)
}

/// Runs `alg` with `n` processors.
///
/// The memory layout of `sim` is overridden: the first [`FIXED_CELLS`] cells
/// hold the fixed variables, and bounded-memory algorithms are confined to
/// them. Everything else (policy, strictness, round cap, randomness) is taken
/// from `sim`.
pub fn run(alg: Algorithm, n: usize, config: &AlgoConfig, sim: &RunConfig) -> Result<NamingRun, SimError> {
    check_config(alg, n, config, sim)?;
    let mut sim = sim.clone();
    sim.reserved = FIXED_CELLS;
    sim.window = alg.bounded_memory().then_some(FIXED_CELLS);

    let count = n as u64;
    let beta = config.beta;
    let growth = config.growth;
    let exec = match alg {
        Algorithm::ArbitraryBoundedLv => {
            let labels = label_range(count, beta)?;
            execute(n, &sim, move |p| lv::arbitrary_bounded(p, count, labels))?
        }
        Algorithm::ArbitraryUnboundedLv => {
            let labels = label_range(count, beta)?;
            execute(n, &sim, move |p| lv::arbitrary_unbounded(p, count, labels))?
        }
        Algorithm::CommonBoundedLv => execute(n, &sim, move |p| lv::common_bounded(p, count, beta))?,
        Algorithm::CommonUnboundedLv => execute(n, &sim, move |p| lv::common_unbounded(p, count, beta))?,
        Algorithm::ArbitraryBoundedMc => execute(n, &sim, move |p| mc::arbitrary_bounded(p, beta))?,
        Algorithm::ArbitraryUnboundedMc => execute(n, &sim, move |p| mc::arbitrary_unbounded(p, beta, growth))?,
        Algorithm::CommonBoundedMc => execute(n, &sim, move |p| mc::common_bounded(p, beta))?,
        Algorithm::CommonUnboundedMc => execute(n, &sim, move |p| mc::common_unbounded(p, beta, growth))?,
    };

    let mut names = Vec::with_capacity(n);
    let mut iterations = 0;
    for out in exec.outputs {
        let named = out?;
        iterations = iterations.max(named.iterations);
        names.push(named.name);
    }
    let mut metrics = exec.metrics;
    metrics.outer_iterations = iterations;
    Ok(NamingRun { names, metrics })
}

/// Runs the constant-memory size estimator on its own with `n` processors.
/// Every processor learns the same estimate, which is returned once.
pub fn run_estimate_size(n: usize, sim: &RunConfig) -> Result<(SizeEstimate, ExecutionMetrics), SimError> {
    let mut sim = sim.clone();
    sim.policy = WritePolicy::Common;
    sim.reserved = FIXED_CELLS;
    sim.window = Some(FIXED_CELLS);
    let exec = run_program(
        n,
        || Coroutine::new(|p| async move { size::estimate_size(&p).await.0 }),
        &sim,
    )?;
    let estimate = exec.outputs[0];
    debug_assert!(exec.outputs.iter().all(|e| *e == estimate));
    Ok((estimate, exec.metrics))
}

/// Runs the tree-based size gauge on its own with `n` processors and
/// returns the common estimate.
pub fn run_gauge_size(n: usize, config: &AlgoConfig, sim: &RunConfig) -> Result<(u64, ExecutionMetrics), SimError> {
    if !(config.beta.is_finite() && config.beta > 0.0) {
        return Err(SimError::Config(format!("beta must be a positive number, got {}", config.beta)));
    }
    let mut sim = sim.clone();
    sim.policy = WritePolicy::Common;
    sim.reserved = FIXED_CELLS;
    sim.window = None;
    let (beta, growth) = (config.beta, config.growth);
    let exec = run_program(
        n,
        || Coroutine::new(move |p| async move { size::gauge_size(&p, beta, growth).await }),
        &sim,
    )?;
    let mut sizes = exec.outputs.into_iter();
    let size = sizes.next().expect("at least one processor")?;
    Ok((size, exec.metrics))
}
