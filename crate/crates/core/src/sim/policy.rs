use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::error::ModelViolation;
use super::{Addr, Word};

/// Simulator-side rule that picks the surviving value of an Arbitrary-mode
/// concurrent write. Algorithms never observe which rule is in force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selector {
    FirstByProcessorIndex,
    LastByProcessorIndex,
    SeededRandom,
    /// Stores a value attempted by the largest group of writers, ties broken
    /// towards the lowest value. Pushes duplicates through whenever possible.
    MaximizeDistinctSurvivors,
}

impl Selector {
    pub const ALL: [Selector; 4] = [
        Selector::FirstByProcessorIndex,
        Selector::LastByProcessorIndex,
        Selector::SeededRandom,
        Selector::MaximizeDistinctSurvivors,
    ];

    /// Short name used on the command line.
    pub fn flag(self) -> &'static str {
        match self {
            Selector::FirstByProcessorIndex => "first",
            Selector::LastByProcessorIndex => "last",
            Selector::SeededRandom => "random",
            Selector::MaximizeDistinctSurvivors => "adversarial",
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.flag())
    }
}

impl FromStr for Selector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Selector::ALL
            .into_iter()
            .find(|sel| sel.flag() == s)
            .ok_or_else(|| format!("unknown selector `{s}` (expected first, last, random or adversarial)"))
    }
}

/// Concurrent-write semantics of the machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WritePolicy {
    Common,
    Arbitrary(Selector),
}

/// A [`WritePolicy`] together with the randomness the `SeededRandom`
/// selector needs.
#[derive(Debug, Clone)]
pub struct WriteResolver {
    policy: WritePolicy,
    rng: ChaCha8Rng,
}

impl WriteResolver {
    pub fn new(policy: WritePolicy, seed: u64) -> Self {
        WriteResolver {
            policy,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn policy(&self) -> WritePolicy {
        self.policy
    }

    /// Resolves one cell's attempted writes; see [`resolve_concurrent_writes`].
    pub fn resolve(
        &mut self,
        round: u64,
        addr: Addr,
        values: &[(usize, Word)],
    ) -> Result<Word, ModelViolation> {
        assert!(!values.is_empty(), "no writes to resolve");
        let first = values[0].1;
        if values.iter().all(|&(_, v)| v == first) {
            return Ok(first);
        }
        match self.policy {
            WritePolicy::Common => Err(ModelViolation::IllegalCommonWrite { round, addr }),
            WritePolicy::Arbitrary(selector) => Ok(match selector {
                Selector::FirstByProcessorIndex => values.iter().min_by_key(|&&(p, _)| p).unwrap().1,
                Selector::LastByProcessorIndex => values.iter().max_by_key(|&&(p, _)| p).unwrap().1,
                Selector::SeededRandom => values[self.rng.random_range(0..values.len())].1,
                Selector::MaximizeDistinctSurvivors => {
                    let mut groups: BTreeMap<Word, usize> = BTreeMap::new();
                    for &(_, v) in values {
                        *groups.entry(v).or_default() += 1;
                    }
                    // BTreeMap iterates by ascending value, so the first
                    // maximum found is the lowest-valued one.
                    let mut best = (first, 0);
                    for (v, count) in groups {
                        if count > best.1 {
                            best = (v, count);
                        }
                    }
                    best.0
                }
            }),
        }
    }
}

/// Value stored when `values` (processor index, value) are written to `addr`
/// in the same round. The SeededRandom selector draws from a fixed stream;
/// use a [`WriteResolver`] to keep that stream across rounds.
pub fn resolve_concurrent_writes(
    addr: Addr,
    values: &[(usize, Word)],
    policy: WritePolicy,
) -> Result<Word, ModelViolation> {
    WriteResolver::new(policy, 0).resolve(0, addr, values)
}
