use rustc_hash::FxHashMap;

use super::error::ModelViolation;
use super::{Addr, Word};

/// Zero-initialized, sparsely stored shared memory.
///
/// Every address reads as 0 until written. Each address ever read or
/// written is remembered, which is what the memory metrics report. The
/// reserved low cells are kept in a flat array, everything above them in a
/// sparse map. Fresh regions are handed out from a bump cursor that starts just past the
/// reserved low cells; when a window is configured, no access or allocation
/// may reach past it.
#[derive(Debug, Clone, Default)]
pub struct SharedMemory {
    /// Reserved cells `[0, low.len())`: value and whether ever touched.
    low: Vec<(Word, bool)>,
    low_touched: u64,
    /// Every touched cell at or above the reserved ones, zeros included.
    high: FxHashMap<Addr, Word>,
    cursor: Addr,
    window: Option<u64>,
    regions: Vec<(Addr, u64)>,
}

impl SharedMemory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Memory whose first `reserved` cells are kept for fixed variables and
    /// whose addresses are confined to `[0, window)` when a window is given.
    pub fn with_layout(reserved: Addr, window: Option<u64>) -> Self {
        SharedMemory {
            low: vec![(Word::ZERO, false); reserved as usize],
            cursor: reserved,
            window,
            ..Self::default()
        }
    }

    pub fn window(&self) -> Option<u64> {
        self.window
    }

    fn check(&self, addr: Addr) -> Result<(), ModelViolation> {
        match self.window {
            Some(window) if addr >= window => Err(ModelViolation::WindowExceeded { addr, window }),
            _ => Ok(()),
        }
    }

    fn low_mark(&mut self, addr: Addr) -> Option<&mut Word> {
        let (value, touched) = self.low.get_mut(addr as usize)?;
        if !*touched {
            *touched = true;
            self.low_touched += 1;
        }
        Some(value)
    }

    pub fn read(&mut self, addr: Addr) -> Result<Word, ModelViolation> {
        self.check(addr)?;
        if let Some(value) = self.low_mark(addr) {
            return Ok(*value);
        }
        Ok(*self.high.entry(addr).or_insert(Word::ZERO))
    }

    pub fn write(&mut self, addr: Addr, value: Word) -> Result<(), ModelViolation> {
        self.check(addr)?;
        if let Some(cell) = self.low_mark(addr) {
            *cell = value;
        } else {
            self.high.insert(addr, value);
        }
        Ok(())
    }

    /// Reads a cell without marking it touched. Simulator-side inspection only.
    pub fn peek(&self, addr: Addr) -> Word {
        match self.low.get(addr as usize) {
            Some(&(value, _)) => value,
            None => self.high.get(&addr).copied().unwrap_or(Word::ZERO),
        }
    }

    /// Number of distinct cells ever read or written.
    pub fn touched_count(&self) -> u64 {
        self.low_touched + self.high.len() as u64
    }

    pub fn was_touched(&self, addr: Addr) -> bool {
        match self.low.get(addr as usize) {
            Some(&(_, touched)) => touched,
            None => self.high.contains_key(&addr),
        }
    }

    /// Returns the base of `size` never-touched cells and advances the cursor.
    pub fn allocate_region(&mut self, size: u64) -> Result<Addr, ModelViolation> {
        assert!(size >= 1, "region size must be positive");
        let base = self.cursor;
        let end = base.checked_add(size).ok_or(ModelViolation::WordOverflow)?;
        if let Some(window) = self.window {
            if end > window {
                return Err(ModelViolation::WindowExceeded { addr: end - 1, window });
            }
        }
        self.cursor = end;
        Ok(base)
    }

    /// Allocation shared by all processors: the `seq`-th allocation request
    /// of every processor resolves to the same region, created on first use.
    ///
    /// Processors run identical control flow around allocations, so the
    /// sequence number is the same for all of them and reveals no identity.
    pub fn collective_region(&mut self, seq: usize, size: u64) -> Result<Addr, ModelViolation> {
        if let Some(&(base, existing)) = self.regions.get(seq) {
            if existing != size {
                return Err(ModelViolation::AllocationMismatch {
                    seq,
                    requested: size,
                    existing,
                });
            }
            return Ok(base);
        }
        debug_assert_eq!(seq, self.regions.len());
        let base = self.allocate_region(size)?;
        self.regions.push((base, size));
        Ok(base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unwritten_cells_read_zero() {
        let mut mem = SharedMemory::new();
        assert_eq!(mem.read(7).unwrap(), Word::ZERO);
        assert!(mem.was_touched(7));
    }

    #[test]
    fn successive_allocations_are_disjoint() {
        let mut mem = SharedMemory::with_layout(16, None);
        let a = mem.allocate_region(4).unwrap();
        let b = mem.allocate_region(4).unwrap();
        assert!(a + 4 <= b);
        assert!(a >= 16);
    }

    #[test]
    fn allocated_region_reads_zero() {
        let mut mem = SharedMemory::with_layout(4, None);
        mem.write(0, Word::from(9u64)).unwrap();
        let base = mem.allocate_region(8).unwrap();
        for addr in base..base + 8 {
            assert!(!mem.was_touched(addr));
            assert_eq!(mem.read(addr).unwrap(), Word::ZERO);
        }
    }

    #[test]
    fn window_rejects_oversized_allocation() {
        let mut mem = SharedMemory::with_layout(0, Some(10));
        assert!(matches!(
            mem.allocate_region(16),
            Err(ModelViolation::WindowExceeded { window: 10, .. })
        ));
    }

    #[test]
    fn window_rejects_out_of_range_access() {
        let mut mem = SharedMemory::with_layout(0, Some(4));
        assert!(mem.write(3, Word::ONE).is_ok());
        assert!(mem.read(4).is_err());
    }

    #[test]
    fn collective_regions_resolve_by_sequence_number() {
        let mut mem = SharedMemory::with_layout(8, None);
        let first = mem.collective_region(0, 5).unwrap();
        let again = mem.collective_region(0, 5).unwrap();
        let second = mem.collective_region(1, 3).unwrap();
        assert_eq!(first, again);
        assert_eq!(second, first + 5);
        assert!(mem.collective_region(1, 4).is_err());
    }
}
