//! PRAM fragments shared by several naming algorithms.
//!
//! Every fragment is an `async fn` over a [`Processor`] that all processors
//! call together. Each fragment costs the same number of rounds for every
//! caller, whatever its private arguments, so callers stay in lock-step.
//! All writes made here are identical-value writes and hence legal on a
//! Common PRAM.

use crate::sim::{run_program, Coroutine, Processor, RunConfig, SimError, WritePolicy};
use crate::{Addr, Word};

/// Rounds taken by [`verify_collision`].
pub const VERIFY_COLLISION_ROUNDS: u64 = 5;

/// Rounds taken by [`global_or`].
pub const GLOBAL_OR_ROUNDS: u64 = 3;

/// Every caller learns whether at least one caller passed `flag = true`.
///
/// Uses `cell` as scratch: clear, conditional write of 1, read.
pub async fn global_or(p: &Processor, cell: Addr, flag: bool) -> bool {
    p.write(cell, 0u64).await;
    if flag {
        p.write(cell, 1u64).await;
    } else {
        p.idle(1).await;
    }
    p.read(cell).await != Word::ZERO
}

/// Constant-round test whether any caller passed `occupied = true`, for a
/// `cell` that holds 0 on entry and is left holding 0.
///
/// Occupants write 1, everybody reads, and if the read saw 1 the occupants
/// clear the cell in a third round. Empty bins thus cost 2 rounds and
/// occupied ones 3, the same for every caller.
pub async fn probe(p: &Processor, cell: Addr, occupied: bool) -> bool {
    if occupied {
        p.write(cell, 1u64).await;
    } else {
        p.idle(1).await;
    }
    let seen = p.read(cell).await != Word::ZERO;
    if seen {
        if occupied {
            p.write(cell, 0u64).await;
        } else {
            p.idle(1).await;
        }
    }
    seen
}

/// Collision check among the processors that call it with the same pair of
/// cells: each clears both cells, sets one of them chosen by a private coin
/// flip, then reads both back and reports a collision when both are set.
///
/// A lone caller never sees a collision; `m >= 2` callers see one unless all
/// their coins agree, i.e. with probability `1 - 2^(1-m)`. All callers
/// return the same verdict.
pub async fn verify_collision(p: &Processor, heads: Addr, tails: Addr) -> bool {
    p.write(heads, 0u64).await;
    p.write(tails, 0u64).await;
    if p.coin() {
        p.write(tails, 1u64).await;
    } else {
        p.write(heads, 1u64).await;
    }
    let t = p.read(tails).await;
    let h = p.read(heads).await;
    t == h
}

/// [`verify_collision`] for processors anchored at `Some(bin)` of a pair of
/// `Heads`/`Tails` arrays; the others idle for the same number of rounds.
pub async fn verify_bin(p: &Processor, arrays: HeadsTails, bin: Option<u64>) -> bool {
    match bin {
        Some(bin) => verify_collision(p, arrays.heads(bin), arrays.tails(bin)).await,
        None => {
            p.idle(VERIFY_COLLISION_ROUNDS).await;
            false
        }
    }
}

/// Two arrays `Heads[1..=bins]` and `Tails[1..=bins]` laid out back to back.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeadsTails {
    base: Addr,
    bins: u64,
}

impl HeadsTails {
    pub async fn allocate(p: &Processor, bins: u64) -> Self {
        HeadsTails {
            base: p.allocate(2 * bins).await,
            bins,
        }
    }

    pub fn bins(&self) -> u64 {
        self.bins
    }

    pub fn heads(&self, bin: u64) -> Addr {
        debug_assert!((1..=self.bins).contains(&bin));
        self.base + bin - 1
    }

    pub fn tails(&self, bin: u64) -> Addr {
        debug_assert!((1..=self.bins).contains(&bin));
        self.base + self.bins + bin - 1
    }
}

/// Complete binary tree over `m` leaves, padded to the next power of two.
///
/// Nodes are numbered heap-style from 1 (the root); node `j` lives at
/// `base + j`, and leaf `i` (1-based) is node `width + i - 1`. The region
/// spans `2 * width` cells, the first of which is unused.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeLayout {
    base: Addr,
    leaves: u64,
    width: u64,
}

impl TreeLayout {
    pub fn new(base: Addr, leaves: u64) -> Self {
        assert!(leaves >= 1, "a tree needs at least one leaf");
        TreeLayout {
            base,
            leaves,
            width: leaves.next_power_of_two(),
        }
    }

    /// Cells needed for a tree over `leaves` leaves.
    pub fn cells(leaves: u64) -> u64 {
        2 * leaves.max(1).next_power_of_two()
    }

    /// Allocates a fresh, zeroed tree region.
    pub async fn allocate(p: &Processor, leaves: u64) -> Self {
        let base = p.allocate(Self::cells(leaves)).await;
        TreeLayout::new(base, leaves)
    }

    pub fn leaves(&self) -> u64 {
        self.leaves
    }

    /// Number of levels above the leaves, `ceil(lg m)`.
    pub fn height(&self) -> u32 {
        self.width.trailing_zeros()
    }

    pub fn node(&self, j: u64) -> Addr {
        debug_assert!(j >= 1 && j < 2 * self.width);
        self.base + j
    }

    pub fn leaf(&self, i: u64) -> Addr {
        assert!((1..=self.leaves).contains(&i), "leaf {i} out of range 1..={}", self.leaves);
        self.node(self.width + i - 1)
    }

    pub fn root(&self) -> Addr {
        self.node(1)
    }

    /// Rounds taken by [`tree_sum`] on this layout.
    pub fn sum_rounds(&self) -> u64 {
        2 * u64::from(self.height()) + 2
    }

    /// Rounds taken by [`count_occupied`] on this layout.
    pub fn count_rounds(&self) -> u64 {
        self.sum_rounds() + 1
    }
}

/// Result of a [`tree_sum`] as seen by one processor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeSum {
    /// Sum over all leaves.
    pub total: u64,
    /// Sum over the leaves strictly before the caller's leaf; 0 for callers
    /// without a leaf.
    pub before: u64,
    /// Value of the caller's own leaf; 0 for callers without a leaf.
    pub own: u64,
}

/// Sums the leaf values already stored in `tree`, bottom-up.
///
/// Callers anchored at a leaf climb from it: at each level they read the
/// sibling and write the parent. Processors sharing a subtree compute the
/// same partial sums, so their writes are identical. Everyone finally reads
/// the root. Internal nodes must be zero or stale-free on entry, which a
/// freshly allocated tree guarantees.
pub async fn tree_sum(p: &Processor, tree: TreeLayout, leaf: Option<u64>) -> TreeSum {
    let levels = u64::from(tree.height());
    let mut out = TreeSum {
        total: 0,
        before: 0,
        own: 0,
    };
    match leaf {
        Some(i) => {
            let mut j = tree.width + i - 1;
            let mut acc = p.read_u64(tree.node(j)).await;
            out.own = acc;
            for _ in 0..levels {
                let sibling = p.read_u64(tree.node(j ^ 1)).await;
                if j & 1 == 1 {
                    out.before += sibling;
                }
                acc += sibling;
                j >>= 1;
                p.write(tree.node(j), acc).await;
            }
        }
        None => p.idle(1 + 2 * levels).await,
    }
    out.total = p.read_u64(tree.root()).await;
    out
}

/// Result of a [`count_occupied`] as seen by one processor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occupancy {
    /// Number of distinct leaves that received at least one participant.
    pub occupied: u64,
    /// 1-based rank of the caller's leaf among occupied leaves.
    pub rank: Option<u64>,
}

/// Counts the distinct leaves chosen by the participants (callers passing
/// `Some(leaf)`) and ranks every occupied leaf. Several participants may
/// share a leaf. `tree` must be freshly allocated.
pub async fn count_occupied(p: &Processor, tree: TreeLayout, leaf: Option<u64>) -> Occupancy {
    match leaf {
        Some(i) => p.write(tree.leaf(i), 1u64).await,
        None => p.idle(1).await,
    }
    let sum = tree_sum(p, tree, leaf).await;
    Occupancy {
        occupied: sum.total,
        rank: leaf.map(|_| sum.before + 1),
    }
}

/// Rank of the position `(leaf, offset)` in lexicographic order, where each
/// leaf of `tree` already holds the number of positions anchored there and
/// `offset` is 1-based within the leaf. Returns the total alongside.
pub async fn rank_position(p: &Processor, tree: TreeLayout, position: Option<(u64, u64)>) -> (u64, Option<u64>) {
    let sum = tree_sum(p, tree, position.map(|(leaf, _)| leaf)).await;
    (sum.total, position.map(|(_, offset)| sum.before + offset))
}

/// What one processor learned from a standalone collective run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollectiveView {
    pub total: u64,
    pub rank: Option<u64>,
}

/// Outcome of running a collective on its own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollectiveRun {
    pub views: Vec<CollectiveView>,
    pub rounds: u64,
}

fn standalone(n: usize, policy: WritePolicy) -> (usize, RunConfig) {
    // A run needs at least one processor; an extra bystander is harmless.
    (n.max(1), RunConfig::new(policy, 0))
}

/// Runs [`count_occupied`] over `m` leaves with one processor per entry of
/// `anchors` (`None` for non-participants).
pub fn simulate_count_occupied(m: u64, anchors: &[Option<u64>], policy: WritePolicy) -> Result<CollectiveRun, SimError> {
    let (n, config) = standalone(anchors.len(), policy);
    let mut next = 0;
    let exec = run_program(
        n,
        || {
            let anchor = anchors.get(next).copied().flatten();
            next += 1;
            Coroutine::new(move |p| async move {
                let tree = TreeLayout::allocate(&p, m).await;
                let occ = count_occupied(&p, tree, anchor).await;
                CollectiveView {
                    total: occ.occupied,
                    rank: occ.rank,
                }
            })
        },
        &config,
    )?;
    Ok(CollectiveRun {
        views: exec.outputs.into_iter().take(anchors.len()).collect(),
        rounds: exec.metrics.rounds,
    })
}

/// Runs [`rank_position`] over `m` leaves, one processor per position
/// `(leaf, offset)`. Offsets within a leaf must be `1..=c` for some `c`.
///
/// Leaf counts are stored the way a claiming loop would: in round `t` the
/// holder of offset `t` writes `t` to its leaf, so every leaf ends up
/// holding its largest offset.
pub fn simulate_rank_positions(m: u64, positions: &[(u64, u64)], policy: WritePolicy) -> Result<CollectiveRun, SimError> {
    let (n, config) = standalone(positions.len(), policy);
    let stagger = positions.iter().map(|&(_, c)| c).max().unwrap_or(0);
    let mut next = 0;
    let exec = run_program(
        n,
        || {
            let position = positions.get(next).copied();
            next += 1;
            Coroutine::new(move |p| async move {
                let tree = TreeLayout::allocate(&p, m).await;
                match position {
                    Some((leaf, c)) => {
                        p.idle(c - 1).await;
                        p.write(tree.leaf(leaf), c).await;
                        p.idle(stagger - c).await;
                    }
                    None => p.idle(stagger).await,
                }
                let (total, rank) = rank_position(&p, tree, position).await;
                CollectiveView { total, rank }
            })
        },
        &config,
    )?;
    Ok(CollectiveRun {
        views: exec.outputs.into_iter().take(positions.len()).collect(),
        rounds: exec.metrics.rounds,
    })
}

/// Runs [`global_or`] with one processor per flag.
pub fn simulate_global_or(flags: &[bool], policy: WritePolicy) -> Result<Vec<bool>, SimError> {
    let (n, config) = standalone(flags.len(), policy);
    let mut next = 0;
    let exec = run_program(
        n,
        || {
            let flag = flags.get(next).copied().unwrap_or(false);
            next += 1;
            Coroutine::new(move |p| async move { global_or(&p, 0, flag).await })
        },
        &config,
    )?;
    Ok(exec.outputs.into_iter().take(flags.len()).collect())
}

/// Runs [`verify_collision`] with `m` participants whose coin flips are
/// `coins` (bit `i` is participant `i`'s flip), or fresh seeded flips when
/// `coins` is `None`. Returns each participant's verdict.
pub fn simulate_verify_collision(m: usize, coins: Option<u64>, seed: u64) -> Result<Vec<bool>, SimError> {
    let mut config = RunConfig::new(WritePolicy::Common, seed);
    if let Some(bits) = coins {
        config = config.with_scripts((0..m).map(|i| vec![(bits >> i) & 1]).collect());
    }
    let exec = run_program(m, || Coroutine::new(|p| async move { verify_collision(&p, 0, 1).await }), &config)?;
    debug_assert_eq!(exec.metrics.rounds, VERIFY_COLLISION_ROUNDS);
    Ok(exec.outputs)
}
