use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::error::SimError;
use super::memory::SharedMemory;
use super::policy::{WritePolicy, WriteResolver};
use super::program::{Action, ProcessorProgram};
use super::rng::{derive_seed, ProcessorRng};
use super::round::{MemoryOp, Pram};
use super::{Addr, Word};

/// Where processors' random bits come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Randomness {
    /// Processor `i` draws from a stream seeded with `derive_seed(seed, i)`.
    Seeded(u64),
    /// Processor `i` first replays `scripts[i]` (see
    /// [`ProcessorRng::scripted`]) and then continues as under `Seeded`.
    Scripted { seed: u64, scripts: Vec<Vec<u64>> },
}

impl Randomness {
    fn seed(&self) -> u64 {
        match self {
            Randomness::Seeded(seed) | Randomness::Scripted { seed, .. } => *seed,
        }
    }

    fn stream(&self, proc: usize) -> ProcessorRng {
        let seed = derive_seed(self.seed(), proc as u64);
        match self {
            Randomness::Scripted { scripts, .. } if proc < scripts.len() => {
                ProcessorRng::scripted(scripts[proc].iter().copied(), seed)
            }
            _ => ProcessorRng::seeded(seed),
        }
    }
}

/// Stream index reserved for the SeededRandom write selector.
const SELECTOR_STREAM: u64 = u64::MAX;

/// Machine and limits for one execution.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub policy: WritePolicy,
    /// Forbid reading and writing one cell in the same round.
    pub strict: bool,
    /// Fail with [`SimError::RoundCapExceeded`] past this many rounds.
    pub round_cap: Option<u64>,
    /// Confine all accesses to `[0, window)`.
    pub window: Option<u64>,
    /// Cells below this address are never handed out by allocation.
    pub reserved: Addr,
    pub randomness: Randomness,
}

impl RunConfig {
    pub fn new(policy: WritePolicy, seed: u64) -> Self {
        RunConfig {
            policy,
            strict: true,
            round_cap: None,
            window: None,
            reserved: 64,
            randomness: Randomness::Seeded(seed),
        }
    }

    pub fn with_round_cap(mut self, cap: u64) -> Self {
        self.round_cap = Some(cap);
        self
    }

    pub fn with_window(mut self, window: u64) -> Self {
        self.window = Some(window);
        self.reserved = self.reserved.min(window);
        self
    }

    pub fn with_strict(mut self, strict: bool) -> Self {
        self.strict = strict;
        self
    }

    pub fn with_scripts(mut self, scripts: Vec<Vec<u64>>) -> Self {
        self.randomness = Randomness::Scripted {
            seed: self.randomness.seed(),
            scripts,
        };
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionMetrics {
    /// Rounds until the last processor halted.
    pub rounds: u64,
    /// Random bits drawn by all processors, rejected draws included.
    pub random_bits: u64,
    /// Random bits charged at `ceil(lg m)` per uniform draw.
    pub nominal_bits: u64,
    pub bits_per_processor: Vec<u64>,
    /// Distinct shared cells ever read or written.
    pub cells_touched: u64,
    /// Outer-loop iterations of the algorithm; filled in by the algorithm layer.
    pub outer_iterations: u64,
}

#[derive(Debug, Clone)]
pub struct Execution<T> {
    /// Final output of each processor, by simulator-side index.
    pub outputs: Vec<T>,
    pub metrics: ExecutionMetrics,
    pub memory: SharedMemory,
}

struct Slot<P: ProcessorProgram> {
    program: P,
    rng: ProcessorRng,
    input: Option<Word>,
    allocations: usize,
    output: Option<P::Output>,
}

/// Runs `n` processors, each a fresh program from `spawn`, in lock-step until
/// all of them halt.
///
/// Only processors that act in a round are stepped; idle processors sleep
/// until their wake-up round, and rounds in which nobody acts are skipped
/// while still being counted.
pub fn run_program<P, F>(n: usize, mut spawn: F, config: &RunConfig) -> Result<Execution<P::Output>, SimError>
where
    P: ProcessorProgram,
    F: FnMut() -> P,
{
    if n == 0 {
        return Err(SimError::Config("at least one processor is required".into()));
    }
    let memory = SharedMemory::with_layout(config.reserved, config.window);
    let resolver = WriteResolver::new(config.policy, derive_seed(config.randomness.seed(), SELECTOR_STREAM));
    let mut pram = Pram::new(memory, resolver, config.strict);

    let mut slots: Vec<Slot<P>> = (0..n)
        .map(|i| Slot {
            program: spawn(),
            rng: config.randomness.stream(i),
            input: None,
            allocations: 0,
            output: None,
        })
        .collect();

    // Processors acting in the current round, and sleepers keyed by wake-up round.
    let mut due: Vec<usize> = (0..n).collect();
    let mut next: Vec<usize> = Vec::with_capacity(n);
    let mut sleepers: BinaryHeap<Reverse<(u64, usize)>> = BinaryHeap::new();
    let mut ops: Vec<(usize, MemoryOp)> = Vec::new();
    let mut round = 0u64;
    let mut finish = 0u64;

    loop {
        if due.is_empty() {
            match sleepers.peek() {
                Some(&Reverse((wake, _))) => round = wake,
                None => break,
            }
        }
        while let Some(&Reverse((wake, idx))) = sleepers.peek() {
            if wake != round {
                break;
            }
            sleepers.pop();
            due.push(idx);
        }
        if let Some(cap) = config.round_cap {
            if round > cap {
                return Err(SimError::RoundCapExceeded { cap });
            }
        }
        pram.advance_to(round);
        ops.clear();
        for &idx in &due {
            let slot = &mut slots[idx];
            loop {
                let input = slot.input.take();
                match slot.program.step(input, &mut slot.rng) {
                    Action::Op(op) => {
                        ops.push((idx, op));
                        break;
                    }
                    Action::Idle(0) => continue,
                    Action::Idle(k) => {
                        sleepers.push(Reverse((round + k, idx)));
                        break;
                    }
                    Action::Allocate(size) => {
                        let base = pram.memory_mut().collective_region(slot.allocations, size)?;
                        slot.allocations += 1;
                        slot.input = Some(Word::from(base));
                    }
                    Action::Halt(out) => {
                        slot.output = Some(out);
                        finish = finish.max(round);
                        break;
                    }
                }
            }
        }
        due.clear();
        if ops.is_empty() {
            continue;
        }
        if let Some(cap) = config.round_cap {
            if round >= cap {
                return Err(SimError::RoundCapExceeded { cap });
            }
        }
        let outcome = pram.submit_round(&ops)?;
        for (idx, value) in outcome.reads {
            slots[idx].input = Some(value);
        }
        next.extend(ops.iter().map(|&(idx, _)| idx));
        std::mem::swap(&mut due, &mut next);
        round += 1;
        finish = finish.max(round);
    }

    let bits_per_processor: Vec<u64> = slots.iter().map(|s| s.rng.bits_consumed()).collect();
    let metrics = ExecutionMetrics {
        rounds: finish,
        random_bits: bits_per_processor.iter().sum(),
        nominal_bits: slots.iter().map(|s| s.rng.nominal_bits()).sum(),
        bits_per_processor,
        cells_touched: pram.memory().touched_count(),
        outer_iterations: 0,
    };
    let outputs = slots
        .into_iter()
        .map(|s| s.output.expect("every processor halted"))
        .collect();
    Ok(Execution {
        outputs,
        metrics,
        memory: pram.memory().clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{Coroutine, Selector};

    fn common(seed: u64) -> RunConfig {
        RunConfig::new(WritePolicy::Common, seed)
    }

    #[test]
    fn immediate_halt_costs_nothing() {
        let exec = run_program(3, || Coroutine::new(|_p| async move { 7u64 }), &common(0)).unwrap();
        assert_eq!(exec.outputs, vec![7, 7, 7]);
        assert_eq!(exec.metrics.rounds, 0);
        assert_eq!(exec.metrics.random_bits, 0);
        assert_eq!(exec.metrics.cells_touched, 0);
    }

    #[test]
    fn zero_processors_is_a_config_error() {
        let err = run_program(0, || Coroutine::new(|_p| async move {}), &common(0)).unwrap_err();
        assert!(matches!(err, SimError::Config(_)));
    }

    #[test]
    fn idle_rounds_are_counted() {
        let exec = run_program(
            2,
            || {
                Coroutine::new(|p| async move {
                    p.idle(10).await;
                    p.read(0).await;
                })
            },
            &common(0),
        )
        .unwrap();
        assert_eq!(exec.metrics.rounds, 11);
        assert_eq!(exec.metrics.cells_touched, 1);
    }

    #[test]
    fn rounds_follow_the_slowest_processor() {
        let mut next = 0u64;
        let exec = run_program(
            3,
            || {
                next += 1;
                let k = next;
                Coroutine::new(move |p| async move {
                    p.idle(k).await;
                    p.write(k, k).await;
                })
            },
            &common(0),
        )
        .unwrap();
        assert_eq!(exec.metrics.rounds, 4);
        assert_eq!(exec.memory.peek(3), Word::from(3u64));
    }

    #[test]
    fn bits_are_summed_over_processors() {
        let exec = run_program(
            4,
            || Coroutine::new(|p| async move { (p.draw(256), p.coin()) }),
            &common(5),
        )
        .unwrap();
        assert_eq!(exec.metrics.bits_per_processor, vec![9; 4]);
        assert_eq!(exec.metrics.random_bits, 36);
        assert_eq!(exec.metrics.nominal_bits, 36);
    }

    #[test]
    fn runs_are_deterministic_per_seed() {
        let go = |seed| {
            let config = RunConfig::new(WritePolicy::Arbitrary(Selector::SeededRandom), seed);
            run_program(
                8,
                || {
                    Coroutine::new(|p| async move {
                        let v = p.draw(1000);
                        p.write(0, v).await;
                        p.read_u64(0).await
                    })
                },
                &config,
            )
            .unwrap()
        };
        let (a, b, c) = (go(1), go(1), go(2));
        assert_eq!(a.outputs, b.outputs);
        assert_eq!(a.metrics, b.metrics);
        assert!(a.outputs.iter().all(|&x| x == a.outputs[0]));
        assert_ne!(a.metrics.bits_per_processor.len(), 0);
        assert!(a.outputs != c.outputs || a.metrics != c.metrics);
    }

    #[test]
    fn cap_counts_rounds_including_idle_ones() {
        let config = common(0).with_round_cap(5);
        let ok = run_program(1, || Coroutine::new(|p| async move { p.idle(4).await; p.read(0).await }), &config);
        assert_eq!(ok.unwrap().metrics.rounds, 5);
        let over = run_program(1, || Coroutine::new(|p| async move { p.idle(5).await; p.read(0).await }), &config);
        assert_eq!(over.unwrap_err(), SimError::RoundCapExceeded { cap: 5 });
    }
}
