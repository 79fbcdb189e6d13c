//! Bit-packed binary sequences.
//!
//! A [`BitSeq`] is the carrier for every message, coded and intermediate
//! sequence in the crate. Bits are packed LSB-first into `u64` words: bit
//! position `l` (1-based) lives at word `(l-1)/64`, bit `(l-1)%64`. All bits
//! past `len_bits` in the last word are kept zero (canonical padding), so
//! whole-word XOR never contaminates results.
//!
//! Positions in the public API are 1-based. Reads outside `1..=len_bits`
//! return zero; writes outside the sequence are contract violations and
//! panic.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::ledger::CostLedger;

const WORD_BITS: usize = 64;

/// A binary sequence of `len_bits` bits packed into `u64` words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitSeq {
    len_bits: usize,
    words: Vec<u64>,
}

#[inline]
fn words_for(len_bits: usize) -> usize {
    len_bits.div_ceil(WORD_BITS)
}

/// XOR `count` bits of `src` starting at 0-based bit `s0` into `dst`
/// starting at 0-based bit `d0`. Returns the number of word operations.
///
/// Unaligned spans use a two-word fetch/shift/mask per destination word.
/// Callers guarantee both bit ranges are in bounds.
fn xor_range(dst: &mut [u64], d0: usize, src: &[u64], s0: usize, count: usize) -> u64 {
    let mut remaining = count;
    let mut d = d0;
    let mut s = s0;
    let mut word_ops = 0u64;
    while remaining > 0 {
        let d_word = d / WORD_BITS;
        let d_bit = d % WORD_BITS;
        let chunk = (WORD_BITS - d_bit).min(remaining);
        let s_word = s / WORD_BITS;
        let s_bit = s % WORD_BITS;
        let mut v = src[s_word] >> s_bit;
        if s_bit != 0 && s_bit + chunk > WORD_BITS {
            v |= src[s_word + 1] << (WORD_BITS - s_bit);
        }
        if chunk < WORD_BITS {
            v &= (1u64 << chunk) - 1;
        }
        dst[d_word] ^= v << d_bit;
        word_ops += 1;
        remaining -= chunk;
        d += chunk;
        s += chunk;
    }
    word_ops
}

impl BitSeq {
    /// An all-zero sequence of `len_bits` bits. `len_bits = 0` is valid.
    pub fn zeros(len_bits: usize) -> Self {
        BitSeq {
            len_bits,
            words: vec![0; words_for(len_bits)],
        }
    }

    /// Builds a sequence from bits in position order: `bits[0]` is position 1.
    pub fn from_bits(bits: &[bool]) -> Self {
        let mut seq = BitSeq::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                seq.words[i / WORD_BITS] |= 1u64 << (i % WORD_BITS);
            }
        }
        seq
    }

    /// Parses a string of `0`/`1` characters, first character = position 1.
    pub fn from_bit_str(s: &str) -> Self {
        let bits: Vec<bool> = s.chars().map(|c| c == '1').collect();
        BitSeq::from_bits(&bits)
    }

    /// Rebuilds a sequence from LSB-first-within-byte packed bytes.
    ///
    /// `bytes` must hold exactly `ceil(len_bits / 8)` bytes; bits past
    /// `len_bits` in the final byte must be zero.
    pub fn from_bytes_le(bytes: &[u8], len_bits: usize) -> Option<Self> {
        if bytes.len() != len_bits.div_ceil(8) {
            return None;
        }
        let mut words = vec![0u64; words_for(len_bits)];
        for (i, &b) in bytes.iter().enumerate() {
            words[i / 8] |= u64::from(b) << ((i % 8) * 8);
        }
        let seq = BitSeq { len_bits, words };
        seq.has_canonical_padding().then_some(seq)
    }

    /// Packs the sequence into bytes, LSB-first within each byte.
    pub fn to_bytes_le(&self) -> Vec<u8> {
        let n = self.len_bits.div_ceil(8);
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push((self.words[i / 8] >> ((i % 8) * 8)) as u8);
        }
        out
    }

    pub fn len_bits(&self) -> usize {
        self.len_bits
    }

    pub fn is_empty(&self) -> bool {
        self.len_bits == 0
    }

    /// Reads position `l` (1-based). Positions outside `1..=len_bits` read
    /// as zero.
    #[inline]
    pub fn get(&self, l: usize) -> bool {
        if l == 0 || l > self.len_bits {
            return false;
        }
        let b = l - 1;
        (self.words[b / WORD_BITS] >> (b % WORD_BITS)) & 1 == 1
    }

    /// Sets position `l` (1-based). Panics when `l` is out of range.
    pub fn set(&mut self, l: usize, v: bool) {
        assert!(l >= 1 && l <= self.len_bits, "set out of range");
        let b = l - 1;
        let mask = 1u64 << (b % WORD_BITS);
        if v {
            self.words[b / WORD_BITS] |= mask;
        } else {
            self.words[b / WORD_BITS] &= !mask;
        }
    }

    /// The shift operator `z^t`: pads `t` zeros in front.
    ///
    /// The result has `len_bits + t` bits with `result[l] = self[l - t]`.
    pub fn shift_pad(&self, t: usize) -> BitSeq {
        let mut out = BitSeq::zeros(self.len_bits + t);
        if self.len_bits > 0 {
            xor_range(&mut out.words, t, &self.words, 0, self.len_bits);
        }
        out
    }

    /// XOR addition: `result[l] = self[l] ^ other[l]` over
    /// `max(len, other.len)` bits, shorter operand zero-extended.
    pub fn add(&self, other: &BitSeq) -> BitSeq {
        let mut out = BitSeq::zeros(self.len_bits.max(other.len_bits));
        if self.len_bits > 0 {
            xor_range(&mut out.words, 0, &self.words, 0, self.len_bits);
        }
        if other.len_bits > 0 {
            xor_range(&mut out.words, 0, &other.words, 0, other.len_bits);
        }
        out
    }

    /// The subsequence from position `from` to position `to`, inclusive and
    /// 1-based. `to` may exceed `len_bits`: out-of-range positions read as
    /// zero. `to < from` yields the empty sequence.
    pub fn subseq(&self, from: usize, to: usize) -> BitSeq {
        assert!(from >= 1, "subseq from must be positive");
        if to < from {
            return BitSeq::zeros(0);
        }
        let out_len = to - from + 1;
        let mut out = BitSeq::zeros(out_len);
        if from <= self.len_bits {
            let count = (to.min(self.len_bits)) - from + 1;
            xor_range(&mut out.words, 0, &self.words, from - 1, count);
        }
        out
    }

    /// In-place XOR of a subrange of `src` into `self`:
    /// `self[dst_offset + j] ^= src[src_from + j - 1]` for `j = 1..=count`.
    ///
    /// `dst_offset` is the number of positions skipped at the front of the
    /// destination (the write covers positions `dst_offset+1 ..=
    /// dst_offset+count`); `src_from` is 1-based. Both ranges must be fully
    /// in bounds: unlike reads, out-of-range writes are caller bugs and
    /// panic. Word operations and bit count are added to `ledger`.
    pub fn xor_into(
        &mut self,
        dst_offset: usize,
        src: &BitSeq,
        src_from: usize,
        count: usize,
        ledger: &CostLedger,
    ) {
        assert!(src_from >= 1, "xor_into src_from must be positive");
        if count == 0 {
            return;
        }
        assert!(
            dst_offset + count <= self.len_bits,
            "xor_into destination range out of bounds"
        );
        assert!(
            src_from + count - 1 <= src.len_bits,
            "xor_into source range out of bounds"
        );
        let word_ops = xor_range(&mut self.words, dst_offset, &src.words, src_from - 1, count);
        ledger.add_xor(count as u64, word_ops);
    }

    /// Bit-at-a-time reference implementation of [`BitSeq::xor_into`], kept
    /// as a differential oracle for the word-level path.
    #[doc(hidden)]
    pub fn xor_into_bitwise(
        &mut self,
        dst_offset: usize,
        src: &BitSeq,
        src_from: usize,
        count: usize,
        ledger: &CostLedger,
    ) {
        assert!(src_from >= 1, "xor_into src_from must be positive");
        if count == 0 {
            return;
        }
        assert!(dst_offset + count <= self.len_bits);
        assert!(src_from + count - 1 <= src.len_bits);
        for j in 1..=count {
            let bit = src.get(src_from + j - 1);
            if bit {
                let l = dst_offset + j;
                let cur = self.get(l);
                self.set(l, !cur);
            }
        }
        ledger.add_xor(count as u64, count as u64);
    }

    /// Shrinks the sequence in place to the window of `new_len` bits that
    /// starts after `start` skipped positions, reusing the existing
    /// allocation. Panics when the window is out of bounds.
    pub fn crop_window(&mut self, start: usize, new_len: usize) {
        assert!(start + new_len <= self.len_bits, "crop window out of bounds");
        let off_word = start / WORD_BITS;
        let off_bit = start % WORD_BITS;
        let new_words = words_for(new_len);
        if off_bit == 0 {
            let end = (off_word + new_words).min(self.words.len());
            self.words.copy_within(off_word..end, 0);
        } else {
            for w in 0..new_words {
                let lo = self.words[off_word + w] >> off_bit;
                let hi = match self.words.get(off_word + w + 1) {
                    Some(&next) => next << (WORD_BITS - off_bit),
                    None => 0,
                };
                self.words[w] = lo | hi;
            }
        }
        self.words.truncate(new_words);
        self.len_bits = new_len;
        let rem = new_len % WORD_BITS;
        if rem != 0 {
            let last = self.words.len() - 1;
            self.words[last] &= (1u64 << rem) - 1;
        }
    }

    /// True when every bit past `len_bits` in the final word is zero.
    pub fn has_canonical_padding(&self) -> bool {
        if self.words.len() != words_for(self.len_bits) {
            return false;
        }
        let rem = self.len_bits % WORD_BITS;
        if rem == 0 {
            return true;
        }
        self.words[self.words.len() - 1] & !((1u64 << rem) - 1) == 0
    }

    /// The sequence as a `0`/`1` string, position 1 first.
    pub fn to_bit_string(&self) -> String {
        (1..=self.len_bits)
            .map(|l| if self.get(l) { '1' } else { '0' })
            .collect()
    }

    /// Lowercase hex of [`BitSeq::to_bytes_le`].
    pub fn to_hex(&self) -> String {
        const DIGITS: &[u8; 16] = b"0123456789abcdef";
        let mut s = String::new();
        for b in self.to_bytes_le() {
            s.push(DIGITS[(b >> 4) as usize] as char);
            s.push(DIGITS[(b & 0xf) as usize] as char);
        }
        s
    }

    /// Parses lowercase/uppercase hex produced by [`BitSeq::to_hex`].
    pub fn from_hex(hex: &str, len_bits: usize) -> Option<Self> {
        if !hex.len().is_multiple_of(2) {
            return None;
        }
        let mut bytes = Vec::with_capacity(hex.len() / 2);
        let raw = hex.as_bytes();
        for pair in raw.chunks(2) {
            let hi = (pair[0] as char).to_digit(16)?;
            let lo = (pair[1] as char).to_digit(16)?;
            bytes.push(((hi << 4) | lo) as u8);
        }
        BitSeq::from_bytes_le(&bytes, len_bits)
    }
}

/// Accumulates the window `[w0+1, w0+out.len_bits]` of
/// `sum_u z^{shift_u} seq_u` into the zeroed buffer `out`.
///
/// The first term initializes the buffer (a copy, not metered); every
/// further term is a metered XOR round. Only the bits overlapping the
/// window are touched.
pub(crate) fn accumulate_window(
    out: &mut BitSeq,
    w0: usize,
    terms: &[(usize, &BitSeq)],
    ledger: &CostLedger,
) {
    let win_len = out.len_bits();
    let scratch = CostLedger::new();
    for (u, &(shift, seq)) in terms.iter().enumerate() {
        // term occupies positions [shift+1, shift+seq.len] of the sum
        let lo = (w0 + 1).max(shift + 1);
        let hi = (w0 + win_len).min(shift + seq.len_bits());
        if lo <= hi {
            let meter = if u == 0 { &scratch } else { ledger };
            out.xor_into(lo - (w0 + 1), seq, lo - shift, hi - lo + 1, meter);
        }
    }
}

impl core::fmt::Debug for BitSeq {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.len_bits <= 96 {
            write!(f, "BitSeq({})", self.to_bit_string())
        } else {
            write!(f, "BitSeq(len={})", self.len_bits)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ledger() -> CostLedger {
        CostLedger::new()
    }

    #[test]
    fn shift_pad_pads_zeros_in_front() {
        let a = BitSeq::from_bit_str("101");
        assert_eq!(a.shift_pad(2).to_bit_string(), "00101");
        assert_eq!(a.shift_pad(0), a);
        let one = BitSeq::from_bit_str("1");
        assert_eq!(one.shift_pad(3).to_bit_string(), "0001");
    }

    #[test]
    fn add_is_bitwise_xor_with_zero_extension() {
        let a = BitSeq::from_bit_str("101");
        assert_eq!(a.add(&a).to_bit_string(), "000");
        let b = BitSeq::from_bit_str("11011");
        assert_eq!(a.add(&b).to_bit_string(), "01111");
        assert_eq!(a.add(&BitSeq::zeros(0)), a);
    }

    #[test]
    fn subseq_follows_reads_as_zero_convention() {
        let a = BitSeq::from_bit_str("10110");
        assert_eq!(a.subseq(3, 5).to_bit_string(), "110");
        let b = BitSeq::from_bit_str("101");
        assert_eq!(b.subseq(2, 5).to_bit_string(), "0100");
        assert!(a.subseq(4, 3).is_empty());
    }

    #[test]
    fn xor_into_matches_contract() {
        let l = ledger();
        let mut dst = BitSeq::from_bit_str("0000");
        let src = BitSeq::from_bit_str("111");
        dst.xor_into(1, &src, 1, 3, &l);
        assert_eq!(dst.to_bit_string(), "0111");
        // count = 0 leaves dst unchanged
        let before = dst.clone();
        dst.xor_into(0, &src, 1, 0, &l);
        assert_eq!(dst, before);
        // applying the same xor twice restores dst
        dst.xor_into(1, &src, 1, 3, &l);
        dst.xor_into(1, &src, 1, 3, &l);
        assert_eq!(dst.to_bit_string(), "0111");
    }

    #[test]
    #[should_panic(expected = "out of bounds")]
    fn xor_into_rejects_out_of_range_writes() {
        let l = ledger();
        let mut dst = BitSeq::zeros(4);
        let src = BitSeq::zeros(8);
        dst.xor_into(2, &src, 1, 3, &l);
    }

    #[test]
    fn xor_into_counts_bits_and_words() {
        let l = ledger();
        let mut dst = BitSeq::zeros(200);
        let src = BitSeq::zeros(200);
        dst.xor_into(3, &src, 2, 150, &l);
        let snap = l.snapshot();
        assert_eq!(snap.xor_bit_ops, 150);
        assert!(snap.xor_word_ops >= 3);
    }

    #[test]
    fn bytes_round_trip_is_canonical() {
        let a = BitSeq::from_bit_str("1011001110001");
        let bytes = a.to_bytes_le();
        assert_eq!(bytes.len(), 2);
        assert_eq!(BitSeq::from_bytes_le(&bytes, 13).unwrap(), a);
        assert_eq!(BitSeq::from_hex(&a.to_hex(), 13).unwrap(), a);
        // non-canonical padding is refused
        assert!(BitSeq::from_bytes_le(&[0xff, 0xff], 13).is_none());
    }

    #[test]
    fn crop_window_matches_subseq() {
        let mut state = 7u64;
        let mut bits = alloc::vec::Vec::new();
        for _ in 0..200 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            bits.push(state >> 61 & 1 == 1);
        }
        let src = BitSeq::from_bits(&bits);
        for (start, len) in [(0, 200), (3, 100), (64, 64), (65, 70), (130, 0), (1, 199)] {
            let mut cropped = src.clone();
            cropped.crop_window(start, len);
            assert_eq!(cropped, src.subseq(start + 1, start + len), "start={start} len={len}");
            assert!(cropped.has_canonical_padding());
        }
    }

    #[test]
    fn unaligned_xor_matches_bitwise_oracle() {
        let l = ledger();
        // deterministic pseudo-random fill, crossing several word boundaries
        let mut src = BitSeq::zeros(300);
        let mut state = 0x9e3779b97f4a7c15u64;
        for i in 1..=300 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            if state >> 63 == 1 {
                src.set(i, true);
            }
        }
        for (d0, s0, count) in [(0, 1, 300), (1, 2, 250), (63, 65, 100), (64, 2, 64), (7, 130, 171)] {
            let mut fast = BitSeq::zeros(400);
            let mut slow = fast.clone();
            fast.xor_into(d0, &src, s0, count, &l);
            slow.xor_into_bitwise(d0, &src, s0, count, &l);
            assert_eq!(fast, slow, "d0={d0} s0={s0} count={count}");
            assert!(fast.has_canonical_padding());
        }
    }
}
