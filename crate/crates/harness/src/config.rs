use anonpram::naming::{self, AlgoConfig, Algorithm, Growth, Model};
use anonpram::sim::{RunConfig, Selector, WritePolicy};
use serde::{Deserialize, Serialize};

use crate::HarnessError;

/// Round caps are this many times an algorithm's nominal round count unless
/// configured otherwise.
pub const DEFAULT_CAP_MULTIPLIER: u64 = 64;

/// One ensemble: `trials` seeded runs of `algorithm` for every size in `ns`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub ns: Vec<u64>,
    pub trials: u64,
    pub seed: u64,
    pub algo: AlgoConfig,
    /// Arbitrary-model algorithms only. `None` means seeded random choice.
    pub selector: Option<Selector>,
    pub cap_multiplier: u64,
    pub strict: bool,
}

impl ExperimentConfig {
    pub fn new(algorithm: Algorithm, ns: impl Into<Vec<u64>>, trials: u64, seed: u64) -> Self {
        ExperimentConfig {
            algorithm,
            ns: ns.into(),
            trials,
            seed,
            algo: algorithm.default_config(),
            selector: None,
            cap_multiplier: DEFAULT_CAP_MULTIPLIER,
            strict: true,
        }
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.algo.beta = beta;
        self
    }

    pub fn with_growth(mut self, growth: Growth) -> Self {
        self.algo.growth = growth;
        self
    }

    pub fn with_selector(mut self, selector: Selector) -> Self {
        self.selector = Some(selector);
        self
    }

    pub fn with_cap_multiplier(mut self, multiplier: u64) -> Self {
        self.cap_multiplier = multiplier;
        self
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let alg = self.algorithm;
        if self.trials == 0 {
            return Err(HarnessError::Config("at least one trial is required".into()));
        }
        if self.ns.is_empty() {
            return Err(HarnessError::Config("no processor counts given".into()));
        }
        if self.cap_multiplier == 0 {
            return Err(HarnessError::Config("the round-cap multiplier must be positive".into()));
        }
        if self.selector.is_some() && alg.model() == Model::Common {
            return Err(HarnessError::Config(format!(
                "{alg} runs on a Common PRAM; write selectors only apply to Arbitrary-model algorithms"
            )));
        }
        for &n in &self.ns {
            let n = usize::try_from(n).map_err(|_| HarnessError::Config(format!("n = {n} is too large")))?;
            naming::validate(alg, n, &self.algo).map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        Ok(())
    }

    pub fn policy(&self) -> WritePolicy {
        self.algorithm.policy(self.selector.unwrap_or(Selector::SeededRandom))
    }

    /// Simulator settings for one trial with `n` processors.
    pub fn run_config(&self, n: u64, seed: u64) -> RunConfig {
        let mut sim = RunConfig::new(self.policy(), seed).with_strict(self.strict);
        if let Some(cap) = self.algorithm.round_cap(n, &self.algo, self.cap_multiplier) {
            sim = sim.with_round_cap(cap);
        }
        sim
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selector_on_common_model_is_rejected() {
        let config = ExperimentConfig::new(Algorithm::CommonBoundedLv, [8], 1, 0).with_selector(Selector::FirstByProcessorIndex);
        assert!(matches!(config.validate(), Err(HarnessError::Config(_))));
        let config = ExperimentConfig::new(Algorithm::ArbitraryBoundedLv, [8], 1, 0).with_selector(Selector::FirstByProcessorIndex);
        assert!(config.validate().is_ok());
    }

    #[test]
    fn empty_ensembles_are_rejected() {
        assert!(ExperimentConfig::new(Algorithm::ArbitraryBoundedLv, [8], 0, 0).validate().is_err());
        assert!(ExperimentConfig::new(Algorithm::ArbitraryBoundedLv, [0], 1, 0).validate().is_err());
        assert!(ExperimentConfig::new(Algorithm::ArbitraryBoundedLv, Vec::new(), 1, 0).validate().is_err());
    }

    #[test]
    fn oversized_labels_are_rejected() {
        let config = ExperimentConfig::new(Algorithm::ArbitraryBoundedLv, [4096], 1, 0).with_beta(30.0);
        assert!(config.validate().is_err());
    }

    #[test]
    fn monte_carlo_runs_are_uncapped() {
        let config = ExperimentConfig::new(Algorithm::ArbitraryBoundedMc, [8], 1, 0);
        assert_eq!(config.run_config(8, 1).round_cap, None);
        let config = ExperimentConfig::new(Algorithm::CommonUnboundedLv, [8], 1, 0);
        assert!(config.run_config(8, 1).round_cap.is_some());
    }
}
