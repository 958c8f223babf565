//! Las Vegas algorithms: `n` is known and the result is always a
//! permutation of `1..=n`.

use super::config::{ceil_count, lg, ln};
use super::{cells, Named, Outcome};
use crate::collectives::{count_occupied, probe, rank_position, verify_bin, verify_collision, HeadsTails, TreeLayout};
use crate::collectives::VERIFY_COLLISION_ROUNDS;
use crate::sim::Processor;
use crate::Word;

/// Rounds one processor spends per claim step of a Pad-style loop.
const CLAIM_ROUNDS: u64 = 4;

/// Constant memory, Arbitrary PRAM. Each attempt draws a label in
/// `[1, n^beta]`, then runs `n` claim steps on a single `Pad` cell: every
/// unnamed processor writes its label, and the processors whose label
/// survived take the next value of `Counter`. An attempt succeeds when the
/// counter reaches `n`, i.e. no two processors shared a label.
pub(crate) async fn arbitrary_bounded(p: Processor, n: u64, labels: Word) -> Outcome {
    let mut iterations = 0;
    loop {
        iterations += 1;
        p.write(cells::COUNTER, 0u64).await;
        let label = p.draw_word(labels);
        let mut name = 0;
        for step in 0..n {
            p.write(cells::PAD, label).await;
            if p.read(cells::PAD).await == label {
                let c = p.read_u64(cells::COUNTER).await;
                p.write(cells::COUNTER, c + 1).await;
                name = c + 1;
                p.idle(CLAIM_ROUNDS * (n - step - 1)).await;
                break;
            }
            p.idle(2).await;
        }
        if p.read_u64(cells::COUNTER).await == n {
            return Ok(Named { name, iterations });
        }
    }
}

/// Number of bins used by [`arbitrary_unbounded`]: `ceil(n / ln n)`, and 1
/// for `n = 1`.
pub fn arbitrary_unbounded_bins(n: u64) -> u64 {
    if n < 2 {
        1
    } else {
        ceil_count(n as f64 / ln(n))
    }
}

/// Unbounded memory, Arbitrary PRAM. Each processor throws a ball carrying
/// a random label into one of `ceil(n / ln n)` bins. Per bin, a Pad-style
/// claim loop hands out counter values `1, 2, ...` to the surviving labels,
/// so every processor ends up with a position (bin, counter). Names are the
/// lexicographic ranks of positions; the attempt succeeds when the largest
/// name is `n`.
pub(crate) async fn arbitrary_unbounded(p: Processor, n: u64, labels: Word) -> Outcome {
    let bins = arbitrary_unbounded_bins(n);
    let pads = p.allocate(bins).await;
    let mut iterations = 0;
    loop {
        iterations += 1;
        // counter cells double as the leaves of the ranking tree
        let counters = TreeLayout::allocate(&p, bins).await;
        let bin = p.draw(bins);
        let label = p.draw_word(labels);
        let pad = pads + bin - 1;
        let mut position = None;
        loop {
            p.write(cells::ALL_NAMED, 1u64).await;
            if position.is_none() {
                p.write(pad, label).await;
                if p.read(pad).await == label {
                    let c = p.read_u64(counters.leaf(bin)).await;
                    p.write(counters.leaf(bin), c + 1).await;
                    position = Some((bin, c + 1));
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
        let (max_name, rank) = rank_position(&p, counters, position).await;
        if max_name == n {
            return Ok(Named {
                name: rank.expect("every processor holds a position"),
                iterations,
            });
        }
    }
}

/// Verifications per occupied bin in [`common_bounded`]: `ceil(beta ln n)`.
pub fn common_bounded_verifications(n: u64, beta: f64) -> u64 {
    ceil_count(beta * ln(n))
}

/// Bin count of a restored stage of [`common_bounded`].
///
/// Nominally `n / (beta ln n)`; it is raised to the `ceil(beta ln n)` balls
/// such a stage may hold so that small `n` does not end up with a single bin
/// that can never separate two balls.
pub fn common_bounded_restored_bins(n: u64, beta: f64) -> u64 {
    let spread = beta * ln(n);
    if spread <= 0.0 {
        return n;
    }
    ceil_count(n as f64 / spread).max(ceil_count(spread)).max(1)
}

/// Constant memory, Common PRAM. Proceeds in stages: every unnamed
/// processor throws a ball into `[1, bins]`, then the bins are visited one by
/// one. An occupied bin (found by a constant-time probe) is checked for a
/// collision `ceil(beta ln n)` times; a ball found alone takes the next name.
/// Stages shrink `bins` to the number of processors still unnamed, or
/// restore it to about `n / (beta ln n)` once few remain. The attempt ends
/// with the first stage that detects no collision and succeeds when the
/// last name handed out is `n`.
pub(crate) async fn common_bounded(p: Processor, n: u64, beta: f64) -> Outcome {
    let verifications = common_bounded_verifications(n, beta);
    let restored = common_bounded_restored_bins(n, beta);
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mut bins = n;
        let mut name = 0;
        p.write(cells::COUNTER, 0u64).await;
        let last = loop {
            p.write(cells::COLLISION, 0u64).await;
            let mut collision = false;
            let bin = (name == 0).then(|| p.draw(bins));
            for i in 1..=bins {
                let mine = bin == Some(i);
                if !probe(&p, cells::PROBE, mine).await {
                    continue;
                }
                if mine {
                    for _ in 0..verifications {
                        if verify_collision(&p, cells::HEADS, cells::TAILS).await {
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
                    name = c + 1;
                } else {
                    p.idle(2).await;
                }
            }
            let last = p.read_u64(cells::COUNTER).await;
            let detected = p.read(cells::COLLISION).await != Word::ZERO;
            bins = if n - last > verifications { n - last } else { restored };
            if !detected {
                break last;
            }
        };
        if last == n {
            return Ok(Named { name, iterations });
        }
    }
}

/// Bin range of [`common_unbounded`]: `ceil((beta + 1) n)`.
pub fn common_unbounded_bins(n: u64, beta: f64) -> u64 {
    ceil_count((beta + 1.0) * n as f64)
}

/// Unbounded memory, Common PRAM. Each processor throws a ball into
/// `ceil((beta + 1) n)` bins, then runs `ceil(lg n)` collision checks on its
/// bin, rethrowing immediately whenever one fires. Afterwards the occupied
/// bins are counted; with exactly `n` of them every ball is alone and the
/// names are the ranks of the bins.
pub(crate) async fn common_unbounded(p: Processor, n: u64, beta: f64) -> Outcome {
    let bins = common_unbounded_bins(n, beta);
    let checks = ceil_count(lg(n));
    let arrays = HeadsTails::allocate(&p, bins).await;
    let mut bin = p.draw(bins);
    let mut iterations = 0;
    loop {
        iterations += 1;
        for _ in 0..checks {
            if verify_bin(&p, arrays, Some(bin)).await {
                bin = p.draw(bins);
            }
        }
        let tree = TreeLayout::allocate(&p, bins).await;
        let occupancy = count_occupied(&p, tree, Some(bin)).await;
        if occupancy.occupied == n {
            return Ok(Named {
                name: occupancy.rank.expect("participant has a rank"),
                iterations,
            });
        }
    }
}
