use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::Word;

/// How the Monte Carlo algorithms for unknown `n` advance their guess `k`
/// of `lg n` between iterations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Growth {
    /// `k -> k + 1`
    Successor,
    /// `k -> 2k`
    #[default]
    Doubling,
}

impl Growth {
    pub fn next(self, k: u32) -> u32 {
        match self {
            Growth::Successor => k + 1,
            Growth::Doubling => 2 * k,
        }
    }

    pub fn flag(self) -> &'static str {
        match self {
            Growth::Successor => "successor",
            Growth::Doubling => "doubling",
        }
    }
}

impl fmt::Display for Growth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.flag())
    }
}

impl FromStr for Growth {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "successor" => Ok(Growth::Successor),
            "doubling" => Ok(Growth::Doubling),
            _ => Err(format!("unknown growth `{s}` (expected successor or doubling)")),
        }
    }
}

/// Tuning of one naming algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgoConfig {
    /// The algorithm's analysis constant. Larger values buy lower failure
    /// probability with more rounds, bits or memory.
    pub beta: f64,
    /// Only read by the Monte Carlo algorithms for unbounded memory.
    pub growth: Growth,
}

impl AlgoConfig {
    pub fn new(beta: f64) -> Self {
        AlgoConfig {
            beta,
            growth: Growth::default(),
        }
    }

    pub fn with_growth(mut self, growth: Growth) -> Self {
        self.growth = growth;
        self
    }
}

pub(crate) fn ln(n: u64) -> f64 {
    (n as f64).ln()
}

pub(crate) fn lg(n: u64) -> f64 {
    (n as f64).log2()
}

/// `ceil(x)` for non-negative reals, as a count.
pub(crate) fn ceil_count(x: f64) -> u64 {
    debug_assert!(x.is_finite());
    x.ceil().max(0.0) as u64
}

/// `2^e` as a cell value, if it fits.
pub(crate) fn pow2(e: u32) -> Option<Word> {
    (e < 256).then(|| Word::ONE << e)
}

/// `ceil(n^beta)` as a cell value, if it fits. Exact for integral `beta`.
pub(crate) fn pow_range(n: u64, beta: f64) -> Option<Word> {
    if beta.fract() == 0.0 && (0.0..=256.0).contains(&beta) {
        return Word::from(n).checked_pow(beta as u32);
    }
    let x = (n as f64).powf(beta).ceil();
    if !x.is_finite() || x >= 2f64.powi(200) {
        return None;
    }
    // Split to stay exact for values past u128.
    let hi = (x / 2f64.powi(64)).floor();
    let lo = x - hi * 2f64.powi(64);
    Some((Word::from(hi as u128) << 64u32) + Word::from(lo as u128))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growth_steps() {
        assert_eq!(Growth::Successor.next(3), 4);
        assert_eq!(Growth::Doubling.next(3), 6);
        assert_eq!("successor".parse::<Growth>().unwrap(), Growth::Successor);
        assert!("tripling".parse::<Growth>().is_err());
    }

    #[test]
    fn integral_powers_are_exact() {
        assert_eq!(pow_range(64, 4.0).unwrap(), Word::ONE << 24u32);
        assert_eq!(pow_range(3, 2.0).unwrap(), Word::from(9u64));
        assert_eq!(pow_range(1, 9.0).unwrap(), Word::ONE);
        assert!(pow_range(1 << 20, 13.0).is_none());
    }

    #[test]
    fn fractional_powers_round_up() {
        assert_eq!(pow_range(4, 1.5).unwrap(), Word::from(8u64));
        assert_eq!(pow_range(2, 0.5).unwrap(), Word::from(2u64));
    }
}
