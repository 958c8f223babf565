//! Monte Carlo algorithms: `n` is unknown, every run terminates, and with
//! small probability two processors end up with the same name.

use super::config::{ceil_count, lg, pow2, Growth};
use super::size::{estimate_size, gauge_size};
use super::{cells, Named, Outcome};
use crate::collectives::{
    count_occupied, probe, rank_position, verify_bin, verify_collision, HeadsTails, TreeLayout,
    VERIFY_COLLISION_ROUNDS,
};
use crate::sim::{ModelViolation, Processor};
use crate::Word;

const CLAIM_ROUNDS: u64 = 4;

/// Largest guess `k` whose `2^k` bin range still fits a cell.
const MAX_K: u32 = 255;

/// Constant memory, Arbitrary PRAM. Iteration `j` throws balls into `2^k`
/// bins with `k = 2^j`, then a Pad-style claim loop names the surviving bin
/// values one at a time until every processor is named. Stops once the
/// number of names handed out is at most `2^(k / beta)`.
pub(crate) async fn arbitrary_bounded(p: Processor, beta: f64) -> Outcome {
    let mut k: u32 = 1;
    let mut iterations = 0;
    loop {
        iterations += 1;
        p.write(cells::COUNTER, 0u64).await;
        let mut name = 0;
        k *= 2;
        if k > MAX_K {
            return Err(ModelViolation::WordOverflow);
        }
        let bin = p.draw_word(pow2(k).ok_or(ModelViolation::WordOverflow)?);
        loop {
            p.write(cells::ALL_NAMED, 1u64).await;
            if name == 0 {
                p.write(cells::PAD, bin).await;
                if p.read(cells::PAD).await == bin {
                    let c = p.read_u64(cells::COUNTER).await;
                    p.write(cells::COUNTER, c + 1).await;
                    name = c + 1;
                } else {
                    p.idle(1).await;
                    p.write(cells::ALL_NAMED, 0u64).await;
                }
            } else {
                p.idle(CLAIM_ROUNDS).await;
            }
            if p.read(cells::ALL_NAMED).await != Word::ZERO {
                break;
            }
        }
        let last = p.read_u64(cells::COUNTER).await;
        if last as f64 <= (f64::from(k) / beta).exp2() {
            return Ok(Named { name, iterations });
        }
    }
}

/// Bin count of [`arbitrary_unbounded`] for guess `k`: `ceil(2^k / (beta k))`.
pub fn arbitrary_unbounded_bins(k: u32, beta: f64) -> u64 {
    ceil_count(f64::from(k).exp2() / (beta * f64::from(k))).max(1)
}

/// Unbounded memory, Arbitrary PRAM. For growing guesses `k` every processor
/// throws a ball with a label from `[1, 2^(beta k)]` into
/// `ceil(2^k / (beta k))` bins; `ceil(beta k)` claim steps per bin hand out
/// counter values to surviving labels. When every processor obtained a
/// position (bin, counter), names are the lexicographic ranks of positions;
/// otherwise `k` grows and everything starts over on fresh arrays.
pub(crate) async fn arbitrary_unbounded(p: Processor, beta: f64, growth: Growth) -> Outcome {
    let mut k: u32 = 1;
    let mut iterations = 0;
    loop {
        iterations += 1;
        p.write(cells::ALL_NAMED, 1u64).await;
        k = growth.next(k);
        let steps = ceil_count(beta * f64::from(k));
        let label_bits = u32::try_from(steps).map_err(|_| ModelViolation::WordOverflow)?;
        let labels = pow2(label_bits).ok_or(ModelViolation::WordOverflow)?;
        let bins = arbitrary_unbounded_bins(k, beta);
        let pads = p.allocate(bins).await;
        let counters = TreeLayout::allocate(&p, bins).await;
        let bin = p.draw(bins);
        let label = p.draw_word(labels);
        let pad = pads + bin - 1;
        let mut position = None;
        for step in 0..steps {
            p.write(pad, label).await;
            if p.read(pad).await == label {
                let c = p.read_u64(counters.leaf(bin)).await;
                p.write(counters.leaf(bin), c + 1).await;
                position = Some((bin, c + 1));
                p.idle(CLAIM_ROUNDS * (steps - step - 1)).await;
                break;
            }
            p.idle(2).await;
        }
        if position.is_none() {
            p.write(cells::ALL_NAMED, 0u64).await;
        } else {
            p.idle(1).await;
        }
        if p.read(cells::ALL_NAMED).await != Word::ZERO {
            let (_, rank) = rank_position(&p, counters, position).await;
            return Ok(Named {
                name: rank.expect("every processor holds a position"),
                iterations,
            });
        }
    }
}

/// Private state threaded through [`extend_names`].
struct Claim {
    name: u64,
    /// 0 once named.
    bin: u64,
    bins: u64,
}

/// Visits bins `1..=bins`. Owners of an occupied bin run
/// `verifications` collision checks; owners that saw none take the next
/// name. Afterwards the bin range shrinks to `size` and collided processors
/// throw again. Returns whether this processor saw a collision.
async fn extend_names(p: &Processor, claim: &mut Claim, size: u64, verifications: u64) -> bool {
    p.write(cells::COLLISION, 0u64).await;
    let mut collision = false;
    for i in 1..=claim.bins {
        let mine = claim.bin == i;
        if !probe(p, cells::PROBE, mine).await {
            continue;
        }
        if mine {
            for _ in 0..verifications {
                if verify_collision(p, cells::HEADS, cells::TAILS).await {
                    collision = true;
                }
            }
        } else {
            p.idle(VERIFY_COLLISION_ROUNDS * verifications).await;
        }
        if mine && collision {
            p.write(cells::COLLISION, 1u64).await;
        } else {
            p.idle(1).await;
        }
        if mine && !collision {
            let c = p.read_u64(cells::COUNTER).await;
            p.write(cells::COUNTER, c + 1).await;
            claim.name = c + 1;
            claim.bin = 0;
        } else {
            p.idle(2).await;
        }
    }
    claim.bins = claim.bins.min(size);
    if collision {
        claim.bin = p.draw(claim.bins);
    }
    collision
}

/// Verifications per occupied bin for a size estimate: `ceil(beta lg size)`.
pub fn size_verifications(size: u64, beta: f64) -> u64 {
    ceil_count(beta * lg(size))
}

/// Constant memory, Common PRAM. Estimates `n` with [`estimate_size`], then
/// runs up to `ceil(lg size)` passes of name extension, finishing after the
/// first pass in which nobody detects a collision. If every pass detects one,
/// everything starts over.
pub(crate) async fn common_bounded(p: Processor, beta: f64) -> Outcome {
    let mut iterations = 0;
    loop {
        iterations += 1;
        p.write(cells::COUNTER, 0u64).await;
        let (estimate, bin) = estimate_size(&p).await;
        let verifications = size_verifications(estimate.size, beta);
        let mut claim = Claim {
            name: 0,
            bin,
            bins: estimate.number_of_bins,
        };
        for _ in 0..ceil_count(lg(estimate.size)) {
            extend_names(&p, &mut claim, estimate.size, verifications).await;
            if p.read(cells::COLLISION).await == Word::ZERO {
                return Ok(Named {
                    name: claim.name,
                    iterations,
                });
            }
        }
    }
}

/// Unbounded memory, Common PRAM. Gauges `n` with [`gauge_size`], throws a
/// ball into `3 size` bins and runs `ceil(beta lg size)` collision checks,
/// rethrowing on each detection, then as many checks again without
/// rethrowing. If none of the latter fires, names are the ranks of the
/// occupied bins; otherwise everything starts over.
pub(crate) async fn common_unbounded(p: Processor, beta: f64, growth: Growth) -> Outcome {
    let mut iterations = 0;
    loop {
        iterations += 1;
        let size = gauge_size(&p, beta, growth).await?;
        let bins = 3 * size;
        let verifications = size_verifications(size, beta);
        let arrays = HeadsTails::allocate(&p, bins).await;
        let mut bin = p.draw(bins);
        for _ in 0..verifications {
            if verify_bin(&p, arrays, Some(bin)).await {
                bin = p.draw(bins);
            }
        }
        p.write(cells::COLLISION, 0u64).await;
        let mut collision = false;
        for _ in 0..verifications {
            if verify_bin(&p, arrays, Some(bin)).await {
                collision = true;
            }
        }
        if collision {
            p.write(cells::COLLISION, 1u64).await;
        } else {
            p.idle(1).await;
        }
        if p.read(cells::COLLISION).await == Word::ZERO {
            let tree = TreeLayout::allocate(&p, bins).await;
            let occupancy = count_occupied(&p, tree, Some(bin)).await;
            return Ok(Named {
                name: occupancy.rank.expect("participant has a rank"),
                iterations,
            });
        }
    }
}
