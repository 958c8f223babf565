//! Size estimation for the Common-model Monte Carlo algorithms, which do
//! not know `n`.

use serde::{Deserialize, Serialize};

use super::cells;
use super::config::{pow2, Growth};
use crate::collectives::{count_occupied, TreeLayout};
use crate::sim::{ModelViolation, Processor};

/// Result of [`estimate_size`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeEstimate {
    /// `3 * 2^k`
    pub size: u64,
    /// `k * 2^k`
    pub number_of_bins: u64,
}

/// Rounds spent per bin while counting nonempty bins.
const COUNT_ROUNDS_PER_BIN: u64 = 2;

/// Constant memory, Common PRAM. For `k = 3, 4, ...` every processor throws
/// a ball into `k * 2^k` bins and the nonempty bins are counted by visiting
/// them in order, the owners of each bin incrementing a shared counter
/// together. Stops at the first `k` with at most `2^k` nonempty bins.
///
/// Returns the estimate together with the caller's bin from the last throw,
/// which the caller goes on to use.
pub(crate) async fn estimate_size(p: &Processor) -> (SizeEstimate, u64) {
    let mut k: u64 = 2;
    loop {
        k += 1;
        let bins = k << k;
        let bin = p.draw(bins);
        p.write(cells::NONEMPTY, 0u64).await;
        p.idle(COUNT_ROUNDS_PER_BIN * (bin - 1)).await;
        let c = p.read_u64(cells::NONEMPTY).await;
        p.write(cells::NONEMPTY, c + 1).await;
        p.idle(COUNT_ROUNDS_PER_BIN * (bins - bin)).await;
        if p.read_u64(cells::NONEMPTY).await <= 1 << k {
            let estimate = SizeEstimate {
                size: 3 << k,
                number_of_bins: bins,
            };
            return (estimate, bin);
        }
    }
}

/// Unbounded memory, Common PRAM. For `k = r(1), r(r(1)), ...` every
/// processor throws a ball into `2^k` bins and the occupied bins are counted
/// with a fresh tree. Stops at the first `k` with at most `2^k / beta`
/// occupied bins and returns `ceil(2^(k+1) / beta)`.
pub(crate) async fn gauge_size(p: &Processor, beta: f64, growth: Growth) -> Result<u64, ModelViolation> {
    let mut k = 1;
    loop {
        k = growth.next(k);
        // leaf indices are u64
        if k >= 63 {
            return Err(ModelViolation::WordOverflow);
        }
        let bins = pow2(k).ok_or(ModelViolation::WordOverflow)?.as_u64();
        let bin = p.draw(bins);
        let tree = TreeLayout::allocate(p, bins).await;
        let occupied = count_occupied(p, tree, Some(bin)).await.occupied;
        if occupied as f64 * beta <= bins as f64 {
            return Ok((2.0 * bins as f64 / beta).ceil() as u64);
        }
    }
}
