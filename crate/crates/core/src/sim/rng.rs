use std::collections::VecDeque;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Word;

/// SplitMix64 finalizer. Used for every seed derivation so that seeds, and
/// therefore reports, are identical on every platform.
pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of child stream `index` under `parent`: `mix64(parent ^ mix64(index))`.
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    mix64(parent ^ mix64(index))
}

#[derive(Debug, Clone)]
enum Source {
    Seeded(ChaCha8Rng),
    /// Replays fixed 64-bit words, one per chunk of at most 64 requested
    /// bits, then continues from the fallback stream.
    Scripted {
        script: VecDeque<u64>,
        fallback: ChaCha8Rng,
    },
}

/// Private random bit stream of one processor, with exact bit accounting.
#[derive(Debug, Clone)]
pub struct ProcessorRng {
    // boxed so that moving a stream in and out of a coroutine stays cheap
    source: Box<Source>,
    bits_consumed: u64,
    nominal_bits: u64,
}

impl ProcessorRng {
    pub fn seeded(seed: u64) -> Self {
        ProcessorRng {
            source: Box::new(Source::Seeded(ChaCha8Rng::seed_from_u64(seed))),
            bits_consumed: 0,
            nominal_bits: 0,
        }
    }

    /// A stream that first yields `script` (each word masked to the width of
    /// the request that consumes it) and then falls back to a seeded stream.
    pub fn scripted(script: impl IntoIterator<Item = u64>, fallback_seed: u64) -> Self {
        ProcessorRng {
            source: Box::new(Source::Scripted {
                script: script.into_iter().collect(),
                fallback: ChaCha8Rng::seed_from_u64(fallback_seed),
            }),
            bits_consumed: 0,
            nominal_bits: 0,
        }
    }

    /// Total bits drawn, rejected draws included.
    pub fn bits_consumed(&self) -> u64 {
        self.bits_consumed
    }

    /// Bits charged at `ceil(lg m)` per completed uniform draw, i.e. the
    /// accounting that ignores rejection overhead.
    pub fn nominal_bits(&self) -> u64 {
        self.nominal_bits
    }

    fn chunk(&mut self) -> u64 {
        match &mut *self.source {
            Source::Seeded(rng) => rng.next_u64(),
            Source::Scripted { script, fallback } => {
                script.pop_front().unwrap_or_else(|| fallback.next_u64())
            }
        }
    }

    /// Draws `k <= 256` fresh bits as an unsigned integer.
    pub fn next_bits(&mut self, k: u32) -> Word {
        assert!(k <= 256, "at most 256 bits per draw");
        let mut out = Word::ZERO;
        let mut filled = 0;
        while filled < k {
            let take = (k - filled).min(64);
            let word = self.chunk();
            let masked = if take == 64 { word } else { word & ((1u64 << take) - 1) };
            out |= Word::from(masked) << filled;
            filled += take;
        }
        self.bits_consumed += u64::from(k);
        out
    }

    /// One fair coin flip, one bit.
    pub fn coin(&mut self) -> bool {
        self.nominal_bits += 1;
        self.next_bits(1) == Word::ONE
    }
}

/// Result of [`draw_uniform`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Uniform {
    pub value: Word,
    pub bits: u64,
}

/// Number of bits needed to write every value of `[0, m)`, i.e. `ceil(lg m)`.
pub fn bit_width(m: Word) -> u32 {
    if m <= Word::ONE {
        0
    } else {
        256 - (m - Word::ONE).leading_zeros()
    }
}

/// Uniform integer in `[1, m]` by rejection sampling on `ceil(lg m)`-bit words.
///
/// The reported bit count is exactly what was drawn from the stream, so it is
/// a multiple of `ceil(lg m)` and zero when `m == 1`.
pub fn draw_uniform(rng: &mut ProcessorRng, m: Word) -> Uniform {
    assert!(m >= Word::ONE, "uniform range must be non-empty");
    let width = bit_width(m);
    let before = rng.bits_consumed;
    let value = if width == 0 {
        Word::ONE
    } else {
        loop {
            let candidate = rng.next_bits(width);
            if candidate < m {
                break candidate + Word::ONE;
            }
        }
    };
    rng.nominal_bits += u64::from(width);
    Uniform {
        value,
        bits: rng.bits_consumed - before,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_of_two_range_never_rejects() {
        let mut rng = ProcessorRng::seeded(1);
        for _ in 0..1000 {
            let u = draw_uniform(&mut rng, Word::from(8u64));
            assert!(u.value >= 1 && u.value <= 8);
            assert_eq!(u.bits, 3);
        }
    }

    #[test]
    fn degenerate_range_is_free() {
        let mut rng = ProcessorRng::seeded(1);
        let u = draw_uniform(&mut rng, Word::ONE);
        assert_eq!(u.value, Word::ONE);
        assert_eq!(u.bits, 0);
        assert_eq!(rng.bits_consumed(), 0);
    }

    #[test]
    fn rejection_overhead_matches_geometric_expectation() {
        // Each attempt uses 3 bits and succeeds with probability 6/8, so the
        // expected cost per draw is 3 * 8/6 = 4 bits.
        let mut rng = ProcessorRng::seeded(0xfeed);
        let calls = 100_000u64;
        let mut total = 0;
        for _ in 0..calls {
            let u = draw_uniform(&mut rng, Word::from(6u64));
            assert_eq!(u.bits % 3, 0);
            assert!(u.value >= 1 && u.value <= 6);
            total += u.bits;
        }
        let mean = total as f64 / calls as f64;
        assert!((mean - 4.0).abs() <= 0.05, "mean bits {mean}");
        assert_eq!(rng.bits_consumed(), total);
        assert_eq!(rng.nominal_bits(), 3 * calls);
    }

    #[test]
    fn identical_seeds_give_identical_streams() {
        let mut a = ProcessorRng::seeded(derive_seed(derive_seed(7, 3), 11));
        let mut b = ProcessorRng::seeded(derive_seed(derive_seed(7, 3), 11));
        for k in [1, 7, 64, 65, 200] {
            assert_eq!(a.next_bits(k), b.next_bits(k));
        }
        assert_eq!(a.bits_consumed(), b.bits_consumed());
    }

    #[test]
    fn scripted_words_come_first() {
        let mut rng = ProcessorRng::scripted([5, 0xff], 0);
        assert_eq!(draw_uniform(&mut rng, Word::from(16u64)).value, Word::from(6u64));
        // 0xff masked to 4 bits is 15, accepted for m = 16
        assert_eq!(draw_uniform(&mut rng, Word::from(16u64)).value, Word::from(16u64));
        let v = draw_uniform(&mut rng, Word::from(16u64)).value;
        assert!(v >= 1 && v <= 16);
    }

    #[test]
    fn wide_draws_stay_in_range() {
        let mut rng = ProcessorRng::seeded(3);
        let m = Word::ONE << 144u32;
        for _ in 0..100 {
            let u = draw_uniform(&mut rng, m);
            assert!(u.value >= Word::ONE && u.value <= m);
            assert_eq!(u.bits, 144);
        }
    }

    #[test]
    fn bit_width_is_ceil_lg() {
        assert_eq!(bit_width(Word::ONE), 0);
        assert_eq!(bit_width(Word::from(2u64)), 1);
        assert_eq!(bit_width(Word::from(6u64)), 3);
        assert_eq!(bit_width(Word::from(8u64)), 3);
        assert_eq!(bit_width(Word::from(9u64)), 4);
    }
}
