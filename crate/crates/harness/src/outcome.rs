use std::fmt;

use anonpram::sim::SimError;
use serde::{Deserialize, Serialize};

/// Verdict on one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    /// Names are exactly `1..=n`.
    CorrectPermutation,
    /// Some name was given to two processors.
    DuplicateNames,
    /// Names are distinct but not `1..=n`.
    InvalidNames,
    CapExceeded,
    ModelViolation,
}

impl Outcome {
    pub const ALL: [Outcome; 5] = [
        Outcome::CorrectPermutation,
        Outcome::DuplicateNames,
        Outcome::InvalidNames,
        Outcome::CapExceeded,
        Outcome::ModelViolation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::CorrectPermutation => "CorrectPermutation",
            Outcome::DuplicateNames => "DuplicateNames",
            Outcome::InvalidNames => "InvalidNames",
            Outcome::CapExceeded => "CapExceeded",
            Outcome::ModelViolation => "ModelViolation",
        }
    }

    /// Label of a run that ended in `err`. Configuration errors are not
    /// outcomes and give `None`.
    pub fn from_error(err: &SimError) -> Option<Outcome> {
        match err {
            SimError::Model(_) => Some(Outcome::ModelViolation),
            SimError::RoundCapExceeded { .. } => Some(Outcome::CapExceeded),
            SimError::Config(_) => None,
        }
    }

    /// Whether the run terminated and handed out names.
    pub fn terminated(self) -> bool {
        matches!(self, Outcome::CorrectPermutation | Outcome::DuplicateNames | Outcome::InvalidNames)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classifies the names of a terminated run with `n` processors.
pub fn classify_outcome(names: &[u64], n: u64) -> Outcome {
    let mut sorted = names.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Outcome::DuplicateNames;
    }
    let permutation = sorted.len() as u64 == n && sorted.iter().zip(1..).all(|(&name, want)| name == want);
    if permutation {
        Outcome::CorrectPermutation
    } else {
        Outcome::InvalidNames
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn small_cases() {
        assert_eq!(classify_outcome(&[2, 1, 3], 3), Outcome::CorrectPermutation);
        assert_eq!(classify_outcome(&[1, 1, 2], 3), Outcome::DuplicateNames);
        assert_eq!(classify_outcome(&[1, 2, 2, 3], 4), Outcome::DuplicateNames);
        assert_eq!(classify_outcome(&[1, 2, 4], 3), Outcome::InvalidNames);
        assert_eq!(classify_outcome(&[0], 1), Outcome::InvalidNames);
    }

    /// Multiset comparison against `1..=n`, the obvious way.
    fn oracle(names: &[u64], n: u64) -> Outcome {
        let mut counts: HashMap<u64, u64> = HashMap::new();
        for &x in names {
            *counts.entry(x).or_default() += 1;
        }
        if counts.values().any(|&c| c > 1) {
            Outcome::DuplicateNames
        } else if names.len() as u64 == n && (1..=n).all(|x| counts.get(&x) == Some(&1)) {
            Outcome::CorrectPermutation
        } else {
            Outcome::InvalidNames
        }
    }

    #[test]
    fn agrees_with_multiset_oracle_exhaustively() {
        // every vector of length n over 0..=n+1, for n up to 6
        for n in 1..=6u64 {
            let base = n + 2;
            let total = base.pow(n as u32);
            for code in 0..total {
                let mut c = code;
                let names: Vec<u64> = (0..n)
                    .map(|_| {
                        let x = c % base;
                        c /= base;
                        x
                    })
                    .collect();
                assert_eq!(classify_outcome(&names, n), oracle(&names, n), "{names:?}");
            }
        }
    }

    #[test]
    fn agrees_with_oracle_on_permutations_up_to_ten() {
        // all permutations of 1..=n with one entry optionally replaced
        fn permute(prefix: &mut Vec<u64>, rest: &mut Vec<u64>, out: &mut dyn FnMut(&[u64])) {
            if rest.is_empty() {
                out(prefix);
                return;
            }
            for i in 0..rest.len() {
                let x = rest.remove(i);
                prefix.push(x);
                permute(prefix, rest, out);
                prefix.pop();
                rest.insert(i, x);
            }
        }
        for n in [7u64, 8] {
            let mut rest: Vec<u64> = (1..=n).collect();
            let mut count = 0;
            permute(&mut Vec::new(), &mut rest, &mut |names| {
                count += 1;
                if count % 97 != 0 {
                    return;
                }
                assert_eq!(classify_outcome(names, n), Outcome::CorrectPermutation);
                let mut broken = names.to_vec();
                broken[0] = broken[1];
                assert_eq!(classify_outcome(&broken, n), oracle(&broken, n));
            });
        }
        for n in 9..=10u64 {
            let names: Vec<u64> = (1..=n).rev().collect();
            assert_eq!(classify_outcome(&names, n), oracle(&names, n));
            let mut shifted = names.clone();
            shifted[0] = n + 1;
            assert_eq!(classify_outcome(&shifted, n), oracle(&shifted, n));
        }
    }

    #[test]
    fn errors_map_to_labels() {
        let cap = SimError::RoundCapExceeded { cap: 3 };
        assert_eq!(Outcome::from_error(&cap), Some(Outcome::CapExceeded));
        assert_eq!(Outcome::from_error(&SimError::Config("x".into())), None);
    }
}
