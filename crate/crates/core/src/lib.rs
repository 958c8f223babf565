//! Deterministic simulator of the anonymous synchronous PRAM and the
//! randomized naming algorithms that run on it.
//!
//! The crate is layered bottom-up:
//!
//! * [`sim`]: shared memory, concurrent-write resolution, bit-accounted
//!   randomness and the lock-step execution engine.
//! * [`collectives`]: PRAM fragments reused by several algorithms
//!   (global OR, collision verification, tree-based counting and ranking).
//! * [`naming`]: the eight naming algorithms plus their size-estimation
//!   subroutines, addressable through [`naming::Algorithm`].
//!
//! Processor code is written as `async` functions over a
//! [`sim::Processor`] handle; every `.await` on a memory operation is one
//! PRAM round. The engine drives all processors in lock-step and never
//! reveals a processor index to the code it runs.

pub mod collectives;
pub mod naming;
pub mod sim;

pub use sim::{Addr, Word};
