//! Shift-XOR MBR codes.
//!
//! An `[n, k, d]` minimum-bandwidth-regenerating code stores `alpha = d`
//! coded sequences per node. The message matrix is
//!
//! ```text
//! M = | S  T |      S: k x k symmetric, first k(k+1)/2 message sequences
//!     | T' O |      T: k x (d-k), remaining k(d-k); O: zero block
//! ```
//!
//! so `B = k(k+1)/2 + k(d-k)` distinct sequences of `L` bits. Node `i`
//! stores `Y^i = Psi^i M`, `d` sequences of `L + t_{i,d}` bits.
//!
//! Decoding retrieves exactly `B*L` bits (the subsequences
//! `m-hat_{v,u} = y_{i_v,u}[t_{i_v,v} + (1:L)]` from `k` nodes
//! `i_1 > ... > i_k`) and solves them fully in place: first the `T` columns
//! as `k x k` shift-XOR systems, then the `S` columns in descending order
//! as shrinking systems, back-substituting each decoded sequence into the
//! not-yet-decoded buffers. Repair of node `i` retrieves one
//! `(L + t_{i,d})`-bit subsequence of `r_j = Y^j (Psi^i)^T` from each of
//! `d` helpers and solves one `d x d` system, reconstructing the lost
//! share bit-exactly.

use alloc::vec::Vec;

use crate::bitseq::{accumulate_window, BitSeq};
use crate::genmatrix::{NodeSet, ShiftMatrix};
use crate::ledger::CostLedger;
use crate::share::{CodeError, NodeShare};
use crate::solver::{shift_xor_eliminate, SeqWindow};

/// Parameter bundle for an `[n, k, d]` shift-XOR MBR code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MbrCode {
    n: usize,
    k: usize,
    d: usize,
    len_bits: usize,
    psi: ShiftMatrix,
}

impl MbrCode {
    /// Builds a code over an explicit `n x d` RID generator matrix.
    pub fn new(
        n: usize,
        k: usize,
        d: usize,
        len_bits: usize,
        psi: ShiftMatrix,
    ) -> Result<Self, CodeError> {
        if k < 1 || k > d || d >= n {
            return Err(CodeError::InvalidParameters("require 1 <= k <= d < n"));
        }
        if len_bits == 0 {
            return Err(CodeError::InvalidParameters("sequence length must be positive"));
        }
        if psi.rows() != n || psi.cols() != d {
            return Err(CodeError::InvalidParameters("generator matrix must be n x d"));
        }
        if !psi.check_rid() {
            return Err(CodeError::NotRid);
        }
        Ok(MbrCode { n, k, d, len_bits, psi })
    }

    /// The storage-overhead-minimizing Vandermonde instance.
    pub fn vandermonde(n: usize, k: usize, d: usize, len_bits: usize) -> Result<Self, CodeError> {
        MbrCode::new(n, k, d, len_bits, ShiftMatrix::vandermonde(n, d))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len_bits(&self) -> usize {
        self.len_bits
    }

    pub fn psi(&self) -> &ShiftMatrix {
        &self.psi
    }

    /// `B = k(k+1)/2 + k(d-k)`.
    pub fn message_count(&self) -> usize {
        self.k * (self.k + 1) / 2 + self.k * (self.d - self.k)
    }

    /// Stored length of every sequence at `node`: `L + t_{node,d}`.
    pub fn share_seq_len(&self, node: usize) -> usize {
        self.len_bits + self.psi.exp(node, self.d) as usize
    }

    fn check_node(&self, node: usize) -> Result<(), CodeError> {
        if node >= 1 && node <= self.n {
            Ok(())
        } else {
            Err(CodeError::NodeOutOfRange)
        }
    }
}

/// The message matrix `M`, backed by `B` distinct sequences.
///
/// Symmetric entries alias the same backing sequence by index, so a decoded
/// sequence is back-substituted exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MbrMessage {
    k: usize,
    d: usize,
    seqs: Vec<BitSeq>,
}

impl MbrMessage {
    /// Packs `B` sequences of `L` bits: the first `k(k+1)/2` fill the upper
    /// triangle of `S` row-major, the remaining `k(d-k)` fill `T` row-major.
    pub fn pack(msgs: Vec<BitSeq>, code: &MbrCode) -> Result<Self, CodeError> {
        let b = code.message_count();
        if msgs.len() != b {
            return Err(CodeError::WrongSequenceCount { expected: b, got: msgs.len() });
        }
        for s in &msgs {
            if s.len_bits() != code.len_bits {
                return Err(CodeError::WrongSequenceLength {
                    expected: code.len_bits,
                    got: s.len_bits(),
                });
            }
        }
        Ok(MbrMessage { k: code.k, d: code.d, seqs: msgs })
    }

    /// Backing index of entry `(i, j)` of `M`, or `None` inside the zero
    /// block. Symmetric positions map to the same index.
    fn index_of(&self, i: usize, j: usize) -> Option<usize> {
        let (k, d) = (self.k, self.d);
        debug_assert!(i >= 1 && i <= d && j >= 1 && j <= d);
        if i <= k && j <= k {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            // start of row a of the packed upper triangle
            let start = (a - 1) * k - (a - 1) * a.saturating_sub(2) / 2;
            Some(start + (b - a))
        } else if i <= k {
            Some(k * (k + 1) / 2 + (i - 1) * (d - k) + (j - k - 1))
        } else if j <= k {
            Some(k * (k + 1) / 2 + (j - 1) * (d - k) + (i - k - 1))
        } else {
            None
        }
    }

    /// Entry `(i, j)` of `M`; `None` inside the zero block.
    pub fn entry(&self, i: usize, j: usize) -> Option<&BitSeq> {
        self.index_of(i, j).map(|ix| &self.seqs[ix])
    }

    pub fn seqs(&self) -> &[BitSeq] {
        &self.seqs
    }

    pub fn into_seqs(self) -> Vec<BitSeq> {
        self.seqs
    }
}

/// Encodes node `node`'s share: `y_{node,u} = sum_j z^{t_{node,j}} m_{j,u}`,
/// `d` sequences each stored at the uniform length `L + t_{node,d}`.
pub fn mbr_encode(msg: &MbrMessage, code: &MbrCode, node: usize) -> Result<NodeShare, CodeError> {
    code.check_node(node)?;
    let scratch = CostLedger::new();
    let len = code.share_seq_len(node);
    let mut seqs = Vec::with_capacity(code.d);
    for u in 1..=code.d {
        let mut y = BitSeq::zeros(len);
        for j in 1..=code.d {
            if let Some(m) = msg.entry(j, u) {
                y.xor_into(code.psi.exp(node, j) as usize, m, 1, code.len_bits, &scratch);
            }
        }
        seqs.push(y);
    }
    Ok(NodeShare::new(node, seqs))
}

/// The subsequences node `share.node` transmits when it is rank `v` in the
/// descending decode set: `m-hat_{v,u} = y_{i_v,u}[t_{i_v,v} + (1:L)]` for
/// `u = v..=d`, each exactly `L` bits.
pub fn mbr_extract_for_decode(
    share: &NodeShare,
    v: usize,
    code: &MbrCode,
) -> Result<Vec<BitSeq>, CodeError> {
    code.check_node(share.node)?;
    if v < 1 || v > code.k {
        return Err(CodeError::RankOutOfRange);
    }
    let expected = code.share_seq_len(share.node);
    if share.seqs.len() != code.d {
        return Err(CodeError::WrongSequenceCount { expected: code.d, got: share.seqs.len() });
    }
    let t = code.psi.exp(share.node, v) as usize;
    let mut out = Vec::with_capacity(code.d - v + 1);
    for u in v..=code.d {
        let y = &share.seqs[u - 1];
        if y.len_bits() != expected {
            return Err(CodeError::WrongSequenceLength { expected, got: y.len_bits() });
        }
        out.push(y.subseq(t + 1, t + code.len_bits));
    }
    Ok(out)
}

/// The retrieved triangular collection `m-hat_{v,u}` (`1 <= v <= min(u,k)`,
/// `1 <= u <= d`), stored column-major so each column is one contiguous
/// elimination system. After [`mbr_decode`] the same buffers hold the
/// decoded `m_{v,u}`.
#[derive(Debug, Clone)]
pub struct MbrHat {
    k: usize,
    d: usize,
    len_bits: usize,
    cols: Vec<Vec<BitSeq>>,
}

impl MbrHat {
    /// Assembles the collection from per-column sequences
    /// (`cols[u-1][v-1] = m-hat_{v,u}`).
    pub fn from_cols(cols: Vec<Vec<BitSeq>>, code: &MbrCode) -> Result<Self, CodeError> {
        if cols.len() != code.d {
            return Err(CodeError::WrongSequenceCount { expected: code.d, got: cols.len() });
        }
        for (u0, col) in cols.iter().enumerate() {
            let expect = (u0 + 1).min(code.k);
            if col.len() != expect {
                return Err(CodeError::WrongSequenceCount { expected: expect, got: col.len() });
            }
            for s in col {
                if s.len_bits() != code.len_bits {
                    return Err(CodeError::WrongSequenceLength {
                        expected: code.len_bits,
                        got: s.len_bits(),
                    });
                }
            }
        }
        Ok(MbrHat { k: code.k, d: code.d, len_bits: code.len_bits, cols })
    }

    /// Extracts the collection from `k` full shares (unmetered; the storage
    /// harness performs metered extraction instead).
    pub fn gather(
        shares: &[NodeShare],
        nodes: &NodeSet,
        code: &MbrCode,
    ) -> Result<Self, CodeError> {
        if nodes.len() != code.k || shares.len() != code.k {
            return Err(CodeError::BadNodeSet("decode needs exactly k shares"));
        }
        let mut cols: Vec<Vec<BitSeq>> = (1..=code.d)
            .map(|u| Vec::with_capacity(u.min(code.k)))
            .collect();
        for v in 1..=code.k {
            let node = nodes.node_at_rank(v);
            let share = shares
                .iter()
                .find(|s| s.node == node)
                .ok_or(CodeError::BadNodeSet("share missing for node"))?;
            let slices = mbr_extract_for_decode(share, v, code)?;
            for (offset, seq) in slices.into_iter().enumerate() {
                cols[v + offset - 1].push(seq);
            }
        }
        MbrHat::from_cols(cols, code)
    }

    /// `m-hat_{v,u}` (after decode: `m_{v,u}`).
    pub fn entry(&self, v: usize, u: usize) -> &BitSeq {
        &self.cols[u - 1][v - 1]
    }

    /// Raw column access for external execution schedulers. Column `u` is
    /// `cols_mut()[u-1]`; the per-column systems of step 1 are independent.
    pub fn cols_mut(&mut self) -> &mut [Vec<BitSeq>] {
        &mut self.cols
    }

    /// Moves the decoded message out in pack order.
    pub fn into_message(mut self, code: &MbrCode) -> Vec<BitSeq> {
        let mut out = Vec::with_capacity(code.message_count());
        for a in 1..=self.k {
            for b in a..=self.k {
                out.push(core::mem::replace(&mut self.cols[b - 1][a - 1], BitSeq::zeros(0)));
            }
        }
        for a in 1..=self.k {
            for c in 1..=(self.d - self.k) {
                out.push(core::mem::replace(
                    &mut self.cols[self.k + c - 1][a - 1],
                    BitSeq::zeros(0),
                ));
            }
        }
        out
    }
}

/// Eliminates the column-`u` system in place: `min(u, k)` equations over
/// the rows of the `min(u, k)` highest-ranked nodes.
pub fn mbr_eliminate_column(
    col: &mut [BitSeq],
    u: usize,
    nodes: &NodeSet,
    code: &MbrCode,
    ledger: &CostLedger,
) -> Result<(), CodeError> {
    let m = u.min(code.k);
    debug_assert_eq!(col.len(), m);
    let set = NodeSet::new(&nodes.descending()[..m]).expect("subset of valid set");
    let cols: Vec<usize> = (1..=m).collect();
    let exps = set.ascending_submatrix(&code.psi, &cols).map_err(|_| CodeError::NotRid)?;
    let mut windows: Vec<SeqWindow<'_>> = col.iter_mut().map(SeqWindow::whole).collect();
    shift_xor_eliminate(&mut windows, &exps, code.len_bits, ledger)?;
    Ok(())
}

/// Back-substitutes the decoded column `u` into the still-coded buffers:
/// `m-hat_{w,v}[t_{i_w,u} - t_{i_w,w} + (1:...)] ^= m_{v,u}` for
/// `w <= v <= v_max`.
pub fn mbr_substitute_column(
    cols: &mut [Vec<BitSeq>],
    u: usize,
    v_max: usize,
    nodes: &NodeSet,
    code: &MbrCode,
    ledger: &CostLedger,
) {
    let len = code.len_bits;
    for v in 1..=v_max {
        // source m_{v,u} lives in column u, destinations in columns v < u
        let (dst_cols, src_cols) = cols.split_at_mut(u - 1);
        let src = &src_cols[0][v - 1];
        for w in 1..=v {
            let i_w = nodes.node_at_rank(w);
            let off = (code.psi.exp(i_w, u) - code.psi.exp(i_w, w)) as usize;
            if off < len {
                dst_cols[v - 1][w - 1].xor_into(off, src, 1, len - off, ledger);
            }
        }
    }
}

/// Decodes the full message in place on the retrieved buffers.
///
/// Step 1 solves the `T` columns (`u = d` down to `k+1`), substituting each
/// decoded sequence into the `S`-column buffers it contributes to. Step 2
/// solves the `S` columns (`u = k` down to `2`) the same way; column 1 is
/// fully reduced by then. No sequence-length scratch is allocated.
pub fn mbr_decode(
    hat: &mut MbrHat,
    nodes: &NodeSet,
    code: &MbrCode,
    ledger: &CostLedger,
) -> Result<(), CodeError> {
    validate_decode_set(nodes, code)?;
    if hat.k != code.k || hat.d != code.d || hat.len_bits != code.len_bits {
        return Err(CodeError::InvalidParameters("collection does not match code"));
    }
    for u in ((code.k + 1)..=code.d).rev() {
        mbr_eliminate_column(&mut hat.cols[u - 1], u, nodes, code, ledger)?;
        mbr_substitute_column(&mut hat.cols, u, code.k, nodes, code, ledger);
    }
    for u in (2..=code.k).rev() {
        mbr_eliminate_column(&mut hat.cols[u - 1], u, nodes, code, ledger)?;
        mbr_substitute_column(&mut hat.cols, u, u - 1, nodes, code, ledger);
    }
    Ok(())
}

fn validate_decode_set(nodes: &NodeSet, code: &MbrCode) -> Result<(), CodeError> {
    if nodes.len() != code.k {
        return Err(CodeError::BadNodeSet("decode needs exactly k nodes"));
    }
    if nodes.node_at_rank(1) > code.n {
        return Err(CodeError::NodeOutOfRange);
    }
    Ok(())
}

/// Computes the repair subsequence helper `share.node` sends for failed
/// node `failed` at rank `v` in the descending helper list:
/// `r-hat_v = r_j[t_{j,v} + (1 : L + t_{failed,d})]` where
/// `r_j = sum_u z^{t_{failed,u}} y_{j,u}` is computed locally. Only the
/// transmitted window is materialized.
pub fn mbr_repair_helper(
    share: &NodeShare,
    failed: usize,
    v: usize,
    code: &MbrCode,
    ledger: &CostLedger,
) -> Result<BitSeq, CodeError> {
    code.check_node(failed)?;
    code.check_node(share.node)?;
    if share.node == failed {
        return Err(CodeError::BadNodeSet("helper cannot be the failed node"));
    }
    if v < 1 || v > code.d {
        return Err(CodeError::RankOutOfRange);
    }
    if share.seqs.len() != code.d {
        return Err(CodeError::WrongSequenceCount { expected: code.d, got: share.seqs.len() });
    }
    let repair_len = code.share_seq_len(failed);
    let w0 = code.psi.exp(share.node, v) as usize;
    let mut out = BitSeq::zeros(repair_len);
    let terms: Vec<(usize, &BitSeq)> = (1..=code.d)
        .map(|u| (code.psi.exp(failed, u) as usize, &share.seqs[u - 1]))
        .collect();
    accumulate_window(&mut out, w0, &terms, ledger);
    Ok(out)
}

/// Repairs a failed node from `d` helper subsequences: one `d x d`
/// elimination with unknown length `L + t_{failed,d}`, in place on the
/// received buffers, which become the repaired share.
pub fn mbr_repair(
    mut rhat: Vec<BitSeq>,
    helpers: &NodeSet,
    failed: usize,
    code: &MbrCode,
    ledger: &CostLedger,
) -> Result<NodeShare, CodeError> {
    code.check_node(failed)?;
    if helpers.len() != code.d {
        return Err(CodeError::BadNodeSet("repair needs exactly d helpers"));
    }
    if helpers.rank_of(failed).is_some() {
        return Err(CodeError::BadNodeSet("helper set contains the failed node"));
    }
    if helpers.node_at_rank(1) > code.n {
        return Err(CodeError::NodeOutOfRange);
    }
    let repair_len = code.share_seq_len(failed);
    if rhat.len() != code.d {
        return Err(CodeError::WrongSequenceCount { expected: code.d, got: rhat.len() });
    }
    for s in &rhat {
        if s.len_bits() != repair_len {
            return Err(CodeError::WrongSequenceLength {
                expected: repair_len,
                got: s.len_bits(),
            });
        }
    }
    let cols: Vec<usize> = (1..=code.d).collect();
    let exps = helpers.ascending_submatrix(&code.psi, &cols).map_err(|_| CodeError::NotRid)?;
    let mut windows: Vec<SeqWindow<'_>> = rhat.iter_mut().map(SeqWindow::whole).collect();
    shift_xor_eliminate(&mut windows, &exps, repair_len, ledger)?;
    Ok(NodeShare::new(failed, rhat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn test_code(len: usize) -> MbrCode {
        MbrCode::vandermonde(6, 3, 4, len).unwrap()
    }

    fn numbered_messages(code: &MbrCode) -> Vec<BitSeq> {
        // message x_m has exactly bit m set (tests use L >= B)
        (1..=code.message_count())
            .map(|m| {
                let mut s = BitSeq::zeros(code.len_bits());
                s.set(m, true);
                s
            })
            .collect()
    }

    #[test]
    fn code_parameters_are_validated() {
        assert!(MbrCode::vandermonde(6, 3, 4, 8).is_ok());
        assert!(MbrCode::vandermonde(4, 3, 4, 8).is_err()); // d >= n
        assert!(MbrCode::vandermonde(6, 5, 4, 8).is_err()); // k > d
        assert!(MbrCode::vandermonde(6, 3, 4, 0).is_err());
        let bad = ShiftMatrix::new(6, 4, vec![1; 24]).unwrap();
        assert_eq!(MbrCode::new(6, 3, 4, 8, bad).unwrap_err(), CodeError::NotRid);
    }

    #[test]
    fn pack_layout_matches_message_matrix() {
        let code = test_code(16);
        assert_eq!(code.message_count(), 9);
        let msg = MbrMessage::pack(numbered_messages(&code), &code).unwrap();
        // S = ((x1,x2,x3),(x2,x4,x5),(x3,x5,x6)), T column = (x7,x8,x9)
        let expect = [
            (1, 1, 1),
            (1, 2, 2),
            (2, 1, 2),
            (2, 2, 4),
            (2, 3, 5),
            (3, 3, 6),
            (1, 4, 7),
            (2, 4, 8),
            (3, 4, 9),
            (4, 1, 7),
            (4, 2, 8),
            (4, 3, 9),
        ];
        for (i, j, m) in expect {
            assert!(msg.entry(i, j).unwrap().get(m), "entry ({i},{j}) should be x{m}");
        }
        assert!(msg.entry(4, 4).is_none());
        // symmetric access aliases the same backing sequence
        assert_eq!(msg.entry(2, 1).unwrap(), msg.entry(1, 2).unwrap());
    }

    #[test]
    fn pack_with_k_equals_d_has_no_t_block() {
        let code = MbrCode::vandermonde(5, 3, 3, 8).unwrap();
        assert_eq!(code.message_count(), 6);
        let msg = MbrMessage::pack(numbered_messages(&code), &code).unwrap();
        assert!(msg.entry(3, 3).is_some());
    }

    #[test]
    fn encode_matches_worked_example() {
        let code = test_code(16);
        let msgs = numbered_messages(&code);
        let msg = MbrMessage::pack(msgs.clone(), &code).unwrap();
        for node in 1..=6 {
            let share = mbr_encode(&msg, &code, node).unwrap();
            let t = node - 1;
            // y_{i,4} = x7 + z^{i-1} x8 + z^{2(i-1)} x9, padded to L + 3(i-1)
            let mut y4 = msgs[6].add(&msgs[7].shift_pad(t)).add(&msgs[8].shift_pad(2 * t));
            y4 = y4.add(&BitSeq::zeros(code.share_seq_len(node)));
            assert_eq!(share.seqs[3], y4, "node {node}");
        }
        // node 1 has all shifts zero: y_{1,1} = x1 + x2 + x3 + x7 bitwise
        let share1 = mbr_encode(&msg, &code, 1).unwrap();
        let y11 = msgs[0].add(&msgs[1]).add(&msgs[2]).add(&msgs[6]);
        assert_eq!(share1.seqs[0], y11);
    }

    #[test]
    fn zero_message_encodes_to_zero_shares() {
        let code = test_code(8);
        let zero = MbrMessage::pack(vec![BitSeq::zeros(8); 9], &code).unwrap();
        let share = mbr_encode(&zero, &code, 4).unwrap();
        assert!(share.seqs.iter().all(|s| s == &BitSeq::zeros(code.share_seq_len(4))));
    }

    #[test]
    fn extract_matches_worked_decode_set() {
        let code = test_code(16);
        let msg = MbrMessage::pack(numbered_messages(&code), &code).unwrap();
        // decode set {4,3,1}: rank-2 node 3 sends y_{3,u}[3:(L+2)], u=2..4
        let share3 = mbr_encode(&msg, &code, 3).unwrap();
        let slices = mbr_extract_for_decode(&share3, 2, &code).unwrap();
        assert_eq!(slices.len(), 3);
        for (ix, u) in (2..=4).enumerate() {
            assert_eq!(slices[ix], share3.seqs[u - 1].subseq(3, 16 + 2));
        }
        // rank-1 node sends all d subsequences
        let share4 = mbr_encode(&msg, &code, 4).unwrap();
        assert_eq!(mbr_extract_for_decode(&share4, 1, &code).unwrap().len(), 4);
        // total bits across ranks = B * L
        let nodes = NodeSet::new(&[4, 3, 1]).unwrap();
        let mut total = 0;
        for v in 1..=3 {
            let node = nodes.node_at_rank(v);
            let share = mbr_encode(&msg, &code, node).unwrap();
            total += mbr_extract_for_decode(&share, v, &code)
                .unwrap()
                .iter()
                .map(|s| s.len_bits())
                .sum::<usize>();
        }
        assert_eq!(total, code.message_count() * 16);
    }

    #[test]
    fn decode_round_trip_single_subset() {
        let code = test_code(16);
        let msgs = numbered_messages(&code);
        let msg = MbrMessage::pack(msgs.clone(), &code).unwrap();
        let nodes = NodeSet::new(&[4, 3, 1]).unwrap();
        let shares: Vec<NodeShare> = [4, 3, 1]
            .iter()
            .map(|&i| mbr_encode(&msg, &code, i).unwrap())
            .collect();
        let mut hat = MbrHat::gather(&shares, &nodes, &code).unwrap();
        let ledger = CostLedger::new();
        mbr_decode(&mut hat, &nodes, &code, &ledger).unwrap();
        assert_eq!(hat.into_message(&code), msgs);
    }

    #[test]
    fn repair_helper_matches_worked_example() {
        let code = test_code(16);
        let msg = MbrMessage::pack(numbered_messages(&code), &code).unwrap();
        let ledger = CostLedger::new();
        // repair node 3 with helpers {5,4,2,1}: r-hat_2 = r_4[4:(L+9)]
        let share4 = mbr_encode(&msg, &code, 4).unwrap();
        let rhat2 = mbr_repair_helper(&share4, 3, 2, &code, &ledger).unwrap();
        let mut r4_full = BitSeq::zeros(0);
        for u in 1..=4 {
            r4_full = r4_full.add(&share4.seqs[u - 1].shift_pad(code.psi().exp(3, u) as usize));
        }
        assert_eq!(rhat2, r4_full.subseq(4, 16 + 9));
        assert_eq!(rhat2.len_bits(), code.share_seq_len(3));
        // helper 1 sends r_1 whole (all shifts of node 1 are zero)
        let share1 = mbr_encode(&msg, &code, 1).unwrap();
        let rhat4 = mbr_repair_helper(&share1, 3, 4, &code, &ledger).unwrap();
        let r1 = share1.seqs[0]
            .add(&share1.seqs[1].shift_pad(2))
            .add(&share1.seqs[2].shift_pad(4))
            .add(&share1.seqs[3].shift_pad(6));
        assert_eq!(rhat4, r1.subseq(1, code.share_seq_len(3)));
    }

    #[test]
    fn repair_rejects_bad_helper_sets() {
        let code = test_code(8);
        let ledger = CostLedger::new();
        let helpers = NodeSet::new(&[5, 4, 3, 1]).unwrap();
        let rhat = vec![BitSeq::zeros(code.share_seq_len(3)); 4];
        assert!(matches!(
            mbr_repair(rhat.clone(), &helpers, 3, &code, &ledger),
            Err(CodeError::BadNodeSet(_))
        ));
        let three = NodeSet::new(&[5, 4, 1]).unwrap();
        assert!(matches!(
            mbr_repair(rhat[..3].to_vec(), &three, 3, &code, &ledger),
            Err(CodeError::BadNodeSet(_))
        ));
    }
}
