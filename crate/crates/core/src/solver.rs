//! Solving k x k systems of shift-XOR equations.
//!
//! A system `y_r = sum_j z^{t_{r,j}} x_j` with an RID exponent matrix is
//! solved by *shift-XOR elimination*: each unknown `x_i` is recovered
//! inside the `L`-bit subsequence
//! `x-hat_i = y_{k+1-i}[t_{k+1-i,i} + (1:L)]`, so exactly `kL` input bits
//! are consumed (zero bandwidth overhead) and the buffers holding the
//! subsequences end up holding the solutions (in-place, `O(1)` auxiliary
//! integers).
//!
//! Iterations run in `k` phases following [`crate::genmatrix::PhasePlan`]:
//! iteration `s` of phase `b` solves bit `x_i[s - L_{1:(i-1)}]` for
//! `i = 1..=b` in order, back-substituting each solved bit into the other
//! equations at offset `l + t_{k+1-j,i} - t_{k+1-j,j}` when that position
//! lies in `(0, L]`.
//!
//! The module also carries the zigzag baseline (successive cancellation on
//! full coded sequences, with bandwidth overhead) and a dense GF(2)
//! Gaussian-elimination oracle used for differential testing. The oracle
//! builds its linear system directly from the encoding definition and never
//! shares offset algebra with the elimination path.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bitseq::BitSeq;
use crate::genmatrix::{MatrixError, ShiftMatrix};
use crate::ledger::CostLedger;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverError {
    /// Exponent matrix not square, or row count mismatch.
    ShapeMismatch,
    /// The exponent matrix does not satisfy the RID property.
    NotRid,
    /// An input sequence is shorter than the selection or system needs.
    InsufficientLength { row: usize, needed: usize, got: usize },
    /// A window does not fit inside its backing sequence.
    WindowOutOfBounds,
    /// The dense oracle met a singular system (would contradict RID
    /// solvability; indicates a transcription bug).
    Singular,
    /// Zigzag ran out of solvable bits (same contradiction as above).
    Stuck,
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::ShapeMismatch => write!(f, "system shape mismatch"),
            SolverError::NotRid => write!(f, "exponent matrix is not RID"),
            SolverError::InsufficientLength { row, needed, got } => {
                write!(f, "input {row} too short: need {needed} bits, got {got}")
            }
            SolverError::WindowOutOfBounds => write!(f, "window exceeds backing sequence"),
            SolverError::Singular => write!(f, "singular system"),
            SolverError::Stuck => write!(f, "no solvable bit found"),
        }
    }
}

impl core::error::Error for SolverError {}

impl From<MatrixError> for SolverError {
    fn from(e: MatrixError) -> Self {
        match e {
            MatrixError::NotRid => SolverError::NotRid,
            _ => SolverError::ShapeMismatch,
        }
    }
}

/// A solver row: an `L`-bit window at a bit offset inside a larger buffer.
///
/// Window position `l` (1-based) is backing-sequence position `start + l`.
/// Operating on windows lets the MBR/MSR decoders run eliminations in place
/// on subsequences of retrieved or intermediate buffers without copying.
pub struct SeqWindow<'a> {
    seq: &'a mut BitSeq,
    start: usize,
}

impl<'a> SeqWindow<'a> {
    /// A window covering the whole sequence from position 1.
    pub fn whole(seq: &'a mut BitSeq) -> Self {
        SeqWindow { seq, start: 0 }
    }

    /// A window skipping `start` positions at the front.
    pub fn at_offset(seq: &'a mut BitSeq, start: usize) -> Self {
        SeqWindow { seq, start }
    }

    pub fn start(&self) -> usize {
        self.start
    }

    #[inline]
    fn get(&self, l: usize) -> bool {
        self.seq.get(self.start + l)
    }

    #[inline]
    fn xor_bit(&mut self, l: usize, v: bool, ledger: &CostLedger) {
        if v {
            let pos = self.start + l;
            let cur = self.seq.get(pos);
            self.seq.set(pos, !cur);
        }
        ledger.add_xor(1, 1);
    }
}

/// One step of an instrumented elimination, reported in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceEvent {
    /// Iteration `s` solved bit `x_i[l]` (1-based `i`, `l`).
    Solved { s: usize, i: usize, l: usize },
    /// Bit `x_i[l]` was back-substituted into equation `j` at position `pos`.
    Substituted { i: usize, l: usize, j: usize, pos: usize },
}

fn validate_system(
    rows: &[SeqWindow<'_>],
    exps: &ShiftMatrix,
    len: usize,
) -> Result<(), SolverError> {
    let k = rows.len();
    if exps.rows() != k || exps.cols() != k {
        return Err(SolverError::ShapeMismatch);
    }
    if !exps.check_rid() {
        return Err(SolverError::NotRid);
    }
    for w in rows {
        if w.start + len > w.seq.len_bits() {
            return Err(SolverError::WindowOutOfBounds);
        }
    }
    Ok(())
}

/// Shift-XOR elimination, in place: on return, the window that held
/// `x-hat_i` holds the solution `x_i`.
///
/// `rows[i-1]` must be the `len`-bit subsequence `x-hat_i` (see
/// [`select_subsequences`]); `exps` is the `k x k` RID exponent matrix with
/// equation rows in ascending node order. Beyond the inputs the algorithm
/// keeps a constant number of loop integers; every back-substitution is a
/// single metered bit XOR.
pub fn shift_xor_eliminate(
    rows: &mut [SeqWindow<'_>],
    exps: &ShiftMatrix,
    len: usize,
    ledger: &CostLedger,
) -> Result<(), SolverError> {
    eliminate_with(rows, exps, len, ledger, |_| {})
}

/// [`shift_xor_eliminate`] with a per-event trace callback, for schedule
/// golden tests and solvability audits.
pub fn shift_xor_eliminate_traced(
    rows: &mut [SeqWindow<'_>],
    exps: &ShiftMatrix,
    len: usize,
    ledger: &CostLedger,
    trace: impl FnMut(TraceEvent),
) -> Result<(), SolverError> {
    eliminate_with(rows, exps, len, ledger, trace)
}

fn eliminate_with(
    rows: &mut [SeqWindow<'_>],
    exps: &ShiftMatrix,
    len: usize,
    ledger: &CostLedger,
    mut trace: impl FnMut(TraceEvent),
) -> Result<(), SolverError> {
    validate_system(rows, exps, len)?;
    let k = rows.len();
    let plan = exps.phase_plan(len)?;
    let mut s = 0usize;
    for b in 1..=k {
        for _ in 0..plan.phase_len(b) {
            s += 1;
            for i in 1..=b {
                let l = s - plan.prefix(i - 1);
                if l > len {
                    // bits past L are solvable as zero and never substituted
                    continue;
                }
                trace(TraceEvent::Solved { s, i, l });
                let bit = rows[i - 1].get(l);
                for j in 1..=k {
                    if j == i {
                        continue;
                    }
                    let row = k + 1 - j;
                    let pos =
                        l as i64 + i64::from(exps.exp(row, i)) - i64::from(exps.exp(row, j));
                    ledger.add_integer_ops(1);
                    if pos >= 1 && pos <= len as i64 {
                        rows[j - 1].xor_bit(pos as usize, bit, ledger);
                        trace(TraceEvent::Substituted { i, l, j, pos: pos as usize });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Word-batched variant of [`shift_xor_eliminate`]: back-substitutions for
/// ordered pairs whose write-to-read slack is at least a word are deferred
/// and flushed as word-level range XORs when the consuming equation catches
/// up; tight pairs stay bit-at-a-time. The set of substituted (source,
/// destination) bit pairs — and therefore the ledger's bit-XOR count — is
/// identical to the per-bit algorithm.
pub fn shift_xor_eliminate_batched(
    rows: &mut [SeqWindow<'_>],
    exps: &ShiftMatrix,
    len: usize,
    ledger: &CostLedger,
) -> Result<(), SolverError> {
    validate_system(rows, exps, len)?;
    let k = rows.len();
    let plan = exps.phase_plan(len)?;

    const BATCH: i64 = 64;
    let idx = |i: usize, j: usize| (i - 1) * k + (j - 1);
    // delta[(i,j)]: destination offset of x_i's substitution into equation j.
    // slack = read iteration of the target minus write iteration of the
    // source; a pair is batched when every deferred write still lands at
    // least a word of iterations before its read.
    let mut delta = vec![0i64; k * k];
    let mut batched = vec![false; k * k];
    let mut pending_from = vec![1usize; k * k]; // next unflushed source bit
    for i in 1..=k {
        for j in 1..=k {
            if i == j {
                continue;
            }
            let row = k + 1 - j;
            let d = i64::from(exps.exp(row, i)) - i64::from(exps.exp(row, j));
            delta[idx(i, j)] = d;
            let slack = d + plan.prefix(j - 1) as i64 - plan.prefix(i - 1) as i64;
            batched[idx(i, j)] = slack > BATCH;
        }
    }

    let mut s = 0usize;
    for b in 1..=k {
        for _ in 0..plan.phase_len(b) {
            s += 1;
            for i in 1..=b {
                let l = s - plan.prefix(i - 1);
                if l > len {
                    continue;
                }
                // Flush batched incoming pairs whose deferred writes have
                // reached this read position, up to the source's solved
                // frontier (writing ahead of the read is safe).
                for u in 1..=b {
                    if u == i || !batched[idx(u, i)] {
                        continue;
                    }
                    let src_needed = l as i64 - delta[idx(u, i)];
                    if src_needed >= pending_from[idx(u, i)] as i64 {
                        let solved_u = (s as i64 - 1 - plan.prefix(u - 1) as i64
                            + i64::from(u < i))
                        .clamp(0, len as i64);
                        flush_pair(
                            rows,
                            &mut pending_from,
                            &delta,
                            k,
                            len,
                            u,
                            i,
                            solved_u as usize,
                            ledger,
                        );
                    }
                }
                let bit = rows[i - 1].get(l);
                for j in 1..=k {
                    if j == i || batched[idx(i, j)] {
                        continue;
                    }
                    let pos = l as i64 + delta[idx(i, j)];
                    if pos >= 1 && pos <= len as i64 {
                        rows[j - 1].xor_bit(pos as usize, bit, ledger);
                    }
                }
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn flush_pair(
    rows: &mut [SeqWindow<'_>],
    pending_from: &mut [usize],
    delta: &[i64],
    k: usize,
    len: usize,
    i: usize,
    j: usize,
    upto: usize,
    ledger: &CostLedger,
) {
    let slot = (i - 1) * k + (j - 1);
    let from = pending_from[slot];
    if upto < from {
        return;
    }
    let d = delta[slot];
    // clip to source bits whose destination lands in (0, len]
    let lo = (from as i64).max(1 - d).max(1);
    let hi = (upto as i64).min(len as i64 - d);
    if lo <= hi {
        let count = (hi - lo + 1) as usize;
        let (src, dst) = two_rows_mut(rows, i - 1, j - 1);
        let dst_pos = (lo + d) as usize; // 1-based first destination position
        dst.seq
            .xor_into(dst.start + dst_pos - 1, src.seq, src.start + lo as usize, count, ledger);
    }
    pending_from[slot] = upto + 1;
}

fn two_rows_mut<'a, 'b>(
    rows: &'a mut [SeqWindow<'b>],
    a: usize,
    b: usize,
) -> (&'a SeqWindow<'b>, &'a mut SeqWindow<'b>) {
    debug_assert_ne!(a, b);
    if a < b {
        let (lo, hi) = rows.split_at_mut(b);
        (&lo[a], &mut hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(a);
        (&hi[0], &mut lo[b])
    }
}

/// Extracts the elimination's input subsequences from full coded sequences:
/// `x-hat_i = y_{k+1-i}[t_{k+1-i,i} + (1:len)]`, exactly `k * len` bits.
pub fn select_subsequences(
    y: &[BitSeq],
    exps: &ShiftMatrix,
    len: usize,
) -> Result<Vec<BitSeq>, SolverError> {
    let k = y.len();
    if exps.rows() != k || exps.cols() != k {
        return Err(SolverError::ShapeMismatch);
    }
    let mut xhat = Vec::with_capacity(k);
    for i in 1..=k {
        let r = k + 1 - i;
        let t = exps.exp(r, i) as usize;
        let needed = t + len;
        if y[r - 1].len_bits() < needed {
            return Err(SolverError::InsufficientLength {
                row: r,
                needed,
                got: y[r - 1].len_bits(),
            });
        }
        xhat.push(y[r - 1].subseq(t + 1, t + len));
    }
    Ok(xhat)
}

/// Encodes `y_r = sum_j z^{t_{r,j}} x_j` for every row of `exps`; each
/// output has `len + t_{r,cols}` bits. Test and CLI plumbing.
pub fn encode_system(x: &[BitSeq], exps: &ShiftMatrix) -> Vec<BitSeq> {
    assert_eq!(x.len(), exps.cols());
    let len = x.iter().map(|s| s.len_bits()).max().unwrap_or(0);
    let scratch = CostLedger::new();
    let mut y = Vec::with_capacity(exps.rows());
    for r in 1..=exps.rows() {
        let mut out = BitSeq::zeros(len + exps.exp(r, exps.cols()) as usize);
        for j in 1..=exps.cols() {
            if x[j - 1].len_bits() > 0 {
                out.xor_into(
                    exps.exp(r, j) as usize,
                    &x[j - 1],
                    1,
                    x[j - 1].len_bits(),
                    &scratch,
                );
            }
        }
        y.push(out);
    }
    y
}

/// The number of XOR operations needed to generate the subsequences
/// `x-hat_1..x-hat_k` from `x_1..x_k`: one per in-range cross term of each
/// subsequence bit. The elimination performs exactly this many bit XORs.
pub fn xhat_generation_xor_count(exps: &ShiftMatrix, len: usize) -> u64 {
    let k = exps.rows();
    debug_assert_eq!(k, exps.cols());
    let mut count = 0u64;
    for i in 1..=k {
        let r = k + 1 - i;
        for j in 1..=k {
            if j == i {
                continue;
            }
            // x_j[l + t_{r,i} - t_{r,j}] in range 1..=len
            let d = i64::from(exps.exp(r, i)) - i64::from(exps.exp(r, j));
            let lo = 1.max(1 - d);
            let hi = (len as i64).min(len as i64 - d);
            if hi >= lo {
                count += (hi - lo + 1) as u64;
            }
        }
    }
    count
}

/// Zigzag decoding: successive cancellation on the full coded sequences.
///
/// Consumes all `k*len + sum_r t_{r,k}` input bits (bandwidth overhead
/// `sum_r t_{r,k}`) and keeps a solvable-position worklist backed by
/// per-position contributor counts, `O(k*len)` auxiliary integers. When
/// several bits are solvable at once the lowest (sequence, position) pair
/// is taken; the output does not depend on this tie-break.
pub fn zigzag_solve(
    y: &[BitSeq],
    exps: &ShiftMatrix,
    len: usize,
    ledger: &CostLedger,
) -> Result<Vec<BitSeq>, SolverError> {
    let k = y.len();
    if exps.rows() != k || exps.cols() != k {
        return Err(SolverError::ShapeMismatch);
    }
    if !exps.check_rid() {
        return Err(SolverError::NotRid);
    }
    for r in 1..=k {
        let needed = len + exps.exp(r, k) as usize;
        if y[r - 1].len_bits() < needed {
            return Err(SolverError::InsufficientLength {
                row: r,
                needed,
                got: y[r - 1].len_bits(),
            });
        }
    }
    let mut work: Vec<BitSeq> = y.to_vec();
    let mut x: Vec<BitSeq> = (0..k).map(|_| BitSeq::zeros(len)).collect();
    let mut solved: Vec<BitSeq> = (0..k).map(|_| BitSeq::zeros(len)).collect();

    // cnt[r][p]: unsolved contributors to y_r position p (0-based p here)
    let mut cnt: Vec<Vec<u16>> = Vec::with_capacity(k);
    for r in 1..=k {
        let len_r = len + exps.exp(r, k) as usize;
        let mut row = vec![0u16; len_r];
        for j in 1..=k {
            let t = exps.exp(r, j) as usize;
            for c in row[t..(t + len).min(len_r)].iter_mut() {
                *c += 1;
            }
        }
        cnt.push(row);
    }

    // candidates ordered by (sequence, position): the fixed tie-break
    let mut queue: BTreeSet<(usize, usize, usize)> = BTreeSet::new(); // (j, m, r)
    let find_unsolved = |solved: &[BitSeq], exps: &ShiftMatrix, r: usize, p: usize| {
        // the unique unsolved contributor at y_r position p, if any
        for j in 1..=exps.rows() {
            let t = exps.exp(r, j) as usize;
            if p >= t {
                let m = p - t + 1;
                if m >= 1 && m <= len && !solved[j - 1].get(m) {
                    return Some((j, m));
                }
            }
        }
        None
    };
    for r in 1..=k {
        for (p0, &c) in cnt[r - 1].iter().enumerate() {
            if c == 1 {
                if let Some((j, m)) = find_unsolved(&solved, exps, r, p0) {
                    queue.insert((j, m, r));
                    ledger.add_integer_ops(1);
                }
            }
        }
    }

    let mut remaining = k * len;
    while remaining > 0 {
        let Some(&(j, m, r)) = queue.iter().next() else {
            return Err(SolverError::Stuck);
        };
        queue.remove(&(j, m, r));
        ledger.add_integer_ops(1);
        if solved[j - 1].get(m) {
            continue; // stale entry, already solved elsewhere
        }
        let p0 = exps.exp(r, j) as usize + m - 1;
        let bit = work[r - 1].get(p0 + 1);
        x[j - 1].set(m, bit);
        solved[j - 1].set(m, true);
        remaining -= 1;
        // substitute into every equation the bit contributes to
        for rp in 1..=k {
            let pp = exps.exp(rp, j) as usize + m - 1;
            if rp != r {
                if bit {
                    let cur = work[rp - 1].get(pp + 1);
                    work[rp - 1].set(pp + 1, !cur);
                }
                ledger.add_xor(1, 1);
            }
            let c = &mut cnt[rp - 1][pp];
            *c -= 1;
            ledger.add_integer_ops(1);
            if *c == 1 {
                if let Some((ju, mu)) = find_unsolved(&solved, exps, rp, pp) {
                    queue.insert((ju, mu, rp));
                    ledger.add_integer_ops(1);
                }
            }
        }
    }
    Ok(x)
}

/// Dense GF(2) oracle: builds the full binary linear system relating the
/// `k*len` unknown bits to the observed bits of the selected subsequences
/// (straight from the encoding definition `y_r[p] = sum_j x_j[p - t_{r,j}]`)
/// and solves it by Gaussian elimination. Intended for small instances.
pub fn gf2_oracle_solve(
    y: &[BitSeq],
    exps: &ShiftMatrix,
    len: usize,
) -> Result<Vec<BitSeq>, SolverError> {
    let k = y.len();
    if exps.rows() != k || exps.cols() != k {
        return Err(SolverError::ShapeMismatch);
    }
    let unknowns = k * len;
    let row_words = (unknowns + 1).div_ceil(64);
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(unknowns);
    for i in 1..=k {
        let r = k + 1 - i;
        let t = exps.exp(r, i) as usize;
        for l in 1..=len {
            let p = t + l; // observed position in y_r
            if y[r - 1].len_bits() < p {
                return Err(SolverError::InsufficientLength {
                    row: r,
                    needed: p,
                    got: y[r - 1].len_bits(),
                });
            }
            let mut row = vec![0u64; row_words];
            for j in 1..=k {
                let tj = exps.exp(r, j) as usize;
                if p > tj && p - tj <= len {
                    let col = (j - 1) * len + (p - tj - 1);
                    row[col / 64] |= 1 << (col % 64);
                }
            }
            if y[r - 1].get(p) {
                row[unknowns / 64] |= 1 << (unknowns % 64);
            }
            rows.push(row);
        }
    }

    // Gaussian elimination over GF(2)
    let mut pivot_of_col = vec![usize::MAX; unknowns];
    let mut next_row = 0;
    for col in 0..unknowns {
        let Some(p) = (next_row..rows.len()).find(|&r| rows[r][col / 64] >> (col % 64) & 1 == 1)
        else {
            continue;
        };
        rows.swap(next_row, p);
        let (pivot, rest) = {
            let (a, b) = rows.split_at_mut(next_row + 1);
            (&a[next_row], b)
        };
        for row in rest.iter_mut() {
            if row[col / 64] >> (col % 64) & 1 == 1 {
                for (w, pw) in row.iter_mut().zip(pivot.iter()) {
                    *w ^= pw;
                }
            }
        }
        pivot_of_col[col] = next_row;
        next_row += 1;
        if next_row == rows.len() {
            break;
        }
    }
    // back substitution
    let mut solution = vec![false; unknowns];
    for col in (0..unknowns).rev() {
        let pr = pivot_of_col[col];
        if pr == usize::MAX {
            return Err(SolverError::Singular);
        }
        let mut v = rows[pr][unknowns / 64] >> (unknowns % 64) & 1 == 1;
        for c2 in (col + 1)..unknowns {
            if rows[pr][c2 / 64] >> (c2 % 64) & 1 == 1 && solution[c2] {
                v = !v;
            }
        }
        solution[col] = v;
    }
    // any remaining nonzero row with zero coefficients would be inconsistent
    for row in rows.iter().skip(next_row) {
        let rhs = row[unknowns / 64] >> (unknowns % 64) & 1 == 1;
        let coeffs_zero = (0..unknowns).all(|c| row[c / 64] >> (c % 64) & 1 == 0);
        if coeffs_zero && rhs {
            return Err(SolverError::Singular);
        }
    }
    let mut x = Vec::with_capacity(k);
    for j in 0..k {
        let mut seq = BitSeq::zeros(len);
        for m in 0..len {
            if solution[j * len + m] {
                seq.set(m + 1, true);
            }
        }
        x.push(seq);
    }
    Ok(x)
}
