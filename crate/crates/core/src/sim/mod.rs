//! Cycle-accurate lock-step engine for the anonymous synchronous PRAM.

mod engine;
mod error;
mod memory;
mod policy;
mod program;
mod rng;
mod round;

pub use engine::{run_program, Execution, ExecutionMetrics, Randomness, RunConfig};
pub use error::{ModelViolation, SimError};
pub use memory::SharedMemory;
pub use policy::{resolve_concurrent_writes, Selector, WritePolicy, WriteResolver};
pub use program::{Action, Coroutine, Processor, ProcessorProgram};
pub use rng::{bit_width, derive_seed, draw_uniform, mix64, ProcessorRng, Uniform};
pub use round::{MemoryOp, Pram, RoundOutcome};

/// Address of a shared memory cell.
pub type Addr = u64;

/// Contents of a shared memory cell.
///
/// Cells conceptually hold unbounded integers. The algorithms only ever need
/// O(log n) bits per cell, but the label ranges of some Monte Carlo
/// algorithms grow past 128 bits at moderate `n`, so cells are 256 bits wide.
pub type Word = ethnum::U256;
