//! Cost accounting for bandwidth and computation claims.
//!
//! Every decode and repair path threads a [`CostLedger`] through its XOR and
//! transfer primitives, so bandwidth-optimality and XOR-count bounds are
//! asserted against measured values rather than trusted. Counters are atomic
//! increments; a ledger may be shared across worker threads.

use core::sync::atomic::{AtomicU64, Ordering};

/// Monotone operation counters for one measurement session.
#[derive(Debug, Default)]
pub struct CostLedger {
    bits_transferred: AtomicU64,
    xor_bit_ops: AtomicU64,
    xor_word_ops: AtomicU64,
    integer_ops: AtomicU64,
    aux_seq_bytes_cur: AtomicU64,
    aux_seq_bytes_peak: AtomicU64,
}

/// A point-in-time copy of the counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LedgerSnapshot {
    pub bits_transferred: u64,
    pub xor_bit_ops: u64,
    pub xor_word_ops: u64,
    pub integer_ops: u64,
    pub aux_seq_bytes_peak: u64,
}

impl CostLedger {
    pub fn new() -> Self {
        CostLedger::default()
    }

    /// Meters a transfer of `n` bits. This counter is the bandwidth figure.
    pub fn add_transferred_bits(&self, n: u64) {
        self.bits_transferred.fetch_add(n, Ordering::Relaxed);
    }

    /// Meters an XOR of `bits` bits executed as `words` word operations.
    pub fn add_xor(&self, bits: u64, words: u64) {
        self.xor_bit_ops.fetch_add(bits, Ordering::Relaxed);
        self.xor_word_ops.fetch_add(words, Ordering::Relaxed);
    }

    /// Meters bookkeeping integer operations (index arithmetic, worklists).
    pub fn add_integer_ops(&self, n: u64) {
        self.integer_ops.fetch_add(n, Ordering::Relaxed);
    }

    /// Records allocation of `bytes` of auxiliary sequence storage and
    /// updates the peak.
    pub fn aux_alloc(&self, bytes: u64) {
        let cur = self.aux_seq_bytes_cur.fetch_add(bytes, Ordering::Relaxed) + bytes;
        self.aux_seq_bytes_peak.fetch_max(cur, Ordering::Relaxed);
    }

    /// Records release of `bytes` of auxiliary sequence storage.
    pub fn aux_free(&self, bytes: u64) {
        self.aux_seq_bytes_cur.fetch_sub(bytes, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> LedgerSnapshot {
        LedgerSnapshot {
            bits_transferred: self.bits_transferred.load(Ordering::Relaxed),
            xor_bit_ops: self.xor_bit_ops.load(Ordering::Relaxed),
            xor_word_ops: self.xor_word_ops.load(Ordering::Relaxed),
            integer_ops: self.integer_ops.load(Ordering::Relaxed),
            aux_seq_bytes_peak: self.aux_seq_bytes_peak.load(Ordering::Relaxed),
        }
    }

    /// Clears all counters. Only meaningful between measurement sessions.
    pub fn reset(&self) {
        self.bits_transferred.store(0, Ordering::Relaxed);
        self.xor_bit_ops.store(0, Ordering::Relaxed);
        self.xor_word_ops.store(0, Ordering::Relaxed);
        self.integer_ops.store(0, Ordering::Relaxed);
        self.aux_seq_bytes_cur.store(0, Ordering::Relaxed);
        self.aux_seq_bytes_peak.store(0, Ordering::Relaxed);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counters_accumulate_and_reset() {
        let l = CostLedger::new();
        l.add_transferred_bits(10);
        l.add_xor(5, 1);
        l.add_integer_ops(3);
        let s = l.snapshot();
        assert_eq!(s.bits_transferred, 10);
        assert_eq!(s.xor_bit_ops, 5);
        assert_eq!(s.xor_word_ops, 1);
        assert_eq!(s.integer_ops, 3);
        l.reset();
        assert_eq!(l.snapshot(), LedgerSnapshot::default());
    }

    #[test]
    fn aux_peak_tracks_high_water_mark() {
        let l = CostLedger::new();
        l.aux_alloc(100);
        l.aux_alloc(50);
        l.aux_free(120);
        l.aux_alloc(10);
        assert_eq!(l.snapshot().aux_seq_bytes_peak, 150);
    }
}
