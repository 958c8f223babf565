use super::error::{ModelViolation, SimError};
use super::memory::SharedMemory;
use super::policy::{WritePolicy, WriteResolver};
use super::{Addr, Word};

/// What one processor does with shared memory in one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemoryOp {
    Read(Addr),
    Write(Addr, Word),
    NoOp,
}

/// Effect of one round on the processors that acted in it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoundOutcome {
    /// (processor index, value) for every read, as of the start of the round.
    pub reads: Vec<(usize, Word)>,
    /// Cells written this round, ascending.
    pub written: Vec<Addr>,
}

/// Shared memory plus the round clock and write semantics of one execution.
#[derive(Debug, Clone)]
pub struct Pram {
    memory: SharedMemory,
    resolver: WriteResolver,
    strict: bool,
    round: u64,
    reads: Vec<Addr>,
    writes: Vec<(Addr, usize, Word)>,
    group: Vec<(usize, Word)>,
}

impl Pram {
    pub fn new(memory: SharedMemory, resolver: WriteResolver, strict: bool) -> Self {
        Pram {
            memory,
            resolver,
            strict,
            round: 0,
            reads: Vec::new(),
            writes: Vec::new(),
            group: Vec::new(),
        }
    }

    pub fn memory(&self) -> &SharedMemory {
        &self.memory
    }

    pub fn memory_mut(&mut self) -> &mut SharedMemory {
        &mut self.memory
    }

    pub fn policy(&self) -> WritePolicy {
        self.resolver.policy()
    }

    /// Index of the next round to execute.
    pub fn round(&self) -> u64 {
        self.round
    }

    /// Skips rounds in which no processor touches memory.
    pub fn advance_to(&mut self, round: u64) {
        assert!(round >= self.round, "rounds cannot go backwards");
        self.round = round;
    }

    /// Executes one round. `ops` pairs each acting processor's index with its
    /// operation; processors not listed perform no operation.
    ///
    /// All reads observe the memory as it was at the start of the round and
    /// writes become visible from the next round on.
    pub fn submit_round(&mut self, ops: &[(usize, MemoryOp)]) -> Result<RoundOutcome, SimError> {
        let round = self.round;
        self.reads.clear();
        self.writes.clear();
        for &(proc, op) in ops {
            match op {
                MemoryOp::Read(addr) => self.reads.push(addr),
                MemoryOp::Write(addr, value) => self.writes.push((addr, proc, value)),
                MemoryOp::NoOp => {}
            }
        }
        self.writes.sort_unstable_by_key(|&(addr, proc, _)| (addr, proc));
        if self.strict && !self.reads.is_empty() && !self.writes.is_empty() {
            self.reads.sort_unstable();
            for &(addr, _, _) in &self.writes {
                if self.reads.binary_search(&addr).is_ok() {
                    return Err(ModelViolation::ReadWriteClash { round, addr }.into());
                }
            }
        }

        let mut outcome = RoundOutcome::default();
        for &(proc, op) in ops {
            if let MemoryOp::Read(addr) = op {
                outcome.reads.push((proc, self.memory.read(addr)?));
            }
        }

        let mut i = 0;
        while i < self.writes.len() {
            let addr = self.writes[i].0;
            self.group.clear();
            while i < self.writes.len() && self.writes[i].0 == addr {
                self.group.push((self.writes[i].1, self.writes[i].2));
                i += 1;
            }
            let value = self.resolver.resolve(round, addr, &self.group)?;
            self.memory.write(addr, value)?;
            outcome.written.push(addr);
        }
        self.round += 1;
        Ok(outcome)
    }
}
