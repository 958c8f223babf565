use thiserror::Error;

use super::Addr;

/// A violation of the PRAM model by the running program.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelViolation {
    #[error("round {round}: distinct values written concurrently to cell {addr} under Common policy")]
    IllegalCommonWrite { round: u64, addr: Addr },
    #[error("round {round}: cell {addr} is both read and written in strict mode")]
    ReadWriteClash { round: u64, addr: Addr },
    #[error("cell {addr} lies outside the configured window of {window} cells")]
    WindowExceeded { addr: Addr, window: u64 },
    #[error("collective allocation #{seq} requested with {requested} cells, but was created with {existing}")]
    AllocationMismatch { seq: usize, requested: u64, existing: u64 },
    #[error("value does not fit in a memory cell")]
    WordOverflow,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("model violation: {0}")]
    Model(#[from] ModelViolation),
    #[error("round cap of {cap} exceeded")]
    RoundCapExceeded { cap: u64 },
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl SimError {
    pub fn is_model_violation(&self) -> bool {
        matches!(self, SimError::Model(_))
    }
}
