//! Shift-XOR MSR codes with `d = 2k-2`, `alpha = k-1`.
//!
//! The message matrix stacks two `alpha x alpha` symmetric blocks,
//! `M = [S; T]`, `B = k * alpha` sequences of `L` bits. The generator is
//! `Psi = [Phi  Lambda*Phi]` where `Phi` is `n x alpha` and `Lambda` is
//! diagonal with entries `z^{lambda_i}`; the composite `n x 2*alpha`
//! exponent matrix must satisfy the RID property. Node `i` stores
//! `Y^i = Phi^i S + z^{lambda_i} Phi^i T`, `alpha` sequences of
//! `L + t_{i,alpha} + lambda_i` bits.
//!
//! Decoding retrieves `k` full shares and decomposes into shift-XOR
//! systems: for each node pair the decoder forms
//! `c_{u,v} = Y^{i_u} (Phi^{i_v})^T = p_{u,v} + z^{lambda_{i_u}} q_{u,v}`
//! and solves a 2x2 system per pair (step 1), then per-row and per-column
//! `alpha x alpha` systems peel `S` out of `p` (and `T` out of `q`)
//! entirely in place on the pair buffers (step 2). Repair of node `i`
//! solves one `d x d` system over the composite exponents for
//! `X^i = (Phi^i S, Phi^i T)` and rebuilds
//! `Y^i = X^i_{1:alpha} + z^{lambda_i} X^i_{alpha+1:2alpha}`.

use alloc::vec::Vec;

use crate::bitseq::{accumulate_window, BitSeq};
use crate::genmatrix::{NodeSet, ShiftMatrix};
use crate::ledger::CostLedger;
use crate::share::{CodeError, NodeShare};
use crate::solver::{shift_xor_eliminate, SeqWindow};

/// Parameter bundle for an `[n, k, 2k-2]` shift-XOR MSR code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MsrCode {
    n: usize,
    k: usize,
    len_bits: usize,
    phi: ShiftMatrix,
    lambda: Vec<u32>,
    composite: ShiftMatrix,
}

impl MsrCode {
    /// Builds a code from an `n x (k-1)` matrix `phi` and diagonal shift
    /// exponents `lambda`; the composite `[Phi  Lambda*Phi]` exponents must
    /// satisfy the RID property.
    pub fn new(
        n: usize,
        k: usize,
        len_bits: usize,
        phi: ShiftMatrix,
        lambda: Vec<u32>,
    ) -> Result<Self, CodeError> {
        if k < 2 {
            return Err(CodeError::InvalidParameters("require k >= 2"));
        }
        let alpha = k - 1;
        let d = 2 * k - 2;
        if d >= n {
            return Err(CodeError::InvalidParameters("require d = 2k-2 < n"));
        }
        if len_bits == 0 {
            return Err(CodeError::InvalidParameters("sequence length must be positive"));
        }
        if phi.rows() != n || phi.cols() != alpha {
            return Err(CodeError::InvalidParameters("phi must be n x (k-1)"));
        }
        if lambda.len() != n {
            return Err(CodeError::InvalidParameters("lambda must have n entries"));
        }
        let mut entries = Vec::with_capacity(n * 2 * alpha);
        for i in 1..=n {
            for j in 1..=alpha {
                entries.push(phi.exp(i, j));
            }
            for j in 1..=alpha {
                entries.push(lambda[i - 1] + phi.exp(i, j));
            }
        }
        let composite = ShiftMatrix::new(n, 2 * alpha, entries)
            .map_err(|_| CodeError::InvalidParameters("composite matrix"))?;
        if !composite.check_rid() {
            return Err(CodeError::NotRid);
        }
        Ok(MsrCode { n, k, len_bits, phi, lambda, composite })
    }

    /// The Vandermonde instance: `phi` Vandermonde and
    /// `lambda_i = (i-1) * alpha`, making the composite Vandermonde.
    pub fn vandermonde(n: usize, k: usize, len_bits: usize) -> Result<Self, CodeError> {
        if k < 2 {
            return Err(CodeError::InvalidParameters("require k >= 2"));
        }
        let alpha = k - 1;
        let phi = ShiftMatrix::vandermonde(n, alpha);
        let lambda = (0..n).map(|i| (i * alpha) as u32).collect();
        MsrCode::new(n, k, len_bits, phi, lambda)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        2 * self.k - 2
    }

    pub fn alpha(&self) -> usize {
        self.k - 1
    }

    pub fn len_bits(&self) -> usize {
        self.len_bits
    }

    pub fn phi(&self) -> &ShiftMatrix {
        &self.phi
    }

    pub fn lambda(&self, node: usize) -> u32 {
        self.lambda[node - 1]
    }

    pub fn lambdas(&self) -> &[u32] {
        &self.lambda
    }

    /// The `n x 2*alpha` exponent matrix of `[Phi  Lambda*Phi]`.
    pub fn composite(&self) -> &ShiftMatrix {
        &self.composite
    }

    /// `B = k * alpha`.
    pub fn message_count(&self) -> usize {
        self.k * self.alpha()
    }

    /// Stored length of every sequence at `node`:
    /// `L + t_{node,alpha} + lambda_node`.
    pub fn share_seq_len(&self, node: usize) -> usize {
        self.len_bits + self.phi.exp(node, self.alpha()) as usize + self.lambda[node - 1] as usize
    }

    /// Length of `p`/`q` for the node pair `(a, b)`:
    /// `L + t_{a,alpha} + t_{b,alpha}`.
    pub fn pair_len(&self, a: usize, b: usize) -> usize {
        let alpha = self.alpha();
        self.len_bits + self.phi.exp(a, alpha) as usize + self.phi.exp(b, alpha) as usize
    }

    /// Length of the repair unknowns for a failed node:
    /// `L + t_{failed,alpha}`.
    pub fn repair_len(&self, failed: usize) -> usize {
        self.len_bits + self.phi.exp(failed, self.alpha()) as usize
    }

    fn check_node(&self, node: usize) -> Result<(), CodeError> {
        if node >= 1 && node <= self.n {
            Ok(())
        } else {
            Err(CodeError::NodeOutOfRange)
        }
    }
}

/// The two symmetric message blocks, each backed by `alpha(alpha+1)/2`
/// distinct sequences (upper triangle, row-major).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MsrMessage {
    alpha: usize,
    s: Vec<BitSeq>,
    t: Vec<BitSeq>,
}

fn tri_index(alpha: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    (a - 1) * alpha - (a - 1) * a.saturating_sub(2) / 2 + (b - a)
}

impl MsrMessage {
    /// Packs `B` sequences: the first `alpha(alpha+1)/2` fill `S`'s upper
    /// triangle row-major, the rest fill `T`'s.
    pub fn pack(msgs: Vec<BitSeq>, code: &MsrCode) -> Result<Self, CodeError> {
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
        let half = b / 2;
        let mut msgs = msgs;
        let t = msgs.split_off(half);
        Ok(MsrMessage { alpha: code.alpha(), s: msgs, t })
    }

    pub fn s_entry(&self, i: usize, j: usize) -> &BitSeq {
        &self.s[tri_index(self.alpha, i, j)]
    }

    pub fn t_entry(&self, i: usize, j: usize) -> &BitSeq {
        &self.t[tri_index(self.alpha, i, j)]
    }

    /// All backing sequences in pack order (`S` triangle then `T` triangle).
    pub fn into_seqs(self) -> Vec<BitSeq> {
        let mut out = self.s;
        out.extend(self.t);
        out
    }
}

/// Encodes node `node`'s share:
/// `y_{node,u} = sum_j z^{t_{node,j}} s_{j,u} + sum_j z^{lambda+t_{node,j}} t_{j,u}`.
pub fn msr_encode(msg: &MsrMessage, code: &MsrCode, node: usize) -> Result<NodeShare, CodeError> {
    code.check_node(node)?;
    let alpha = code.alpha();
    let scratch = CostLedger::new();
    let len = code.share_seq_len(node);
    let lam = code.lambda(node) as usize;
    let mut seqs = Vec::with_capacity(alpha);
    for u in 1..=alpha {
        let mut y = BitSeq::zeros(len);
        for j in 1..=alpha {
            let t = code.phi.exp(node, j) as usize;
            y.xor_into(t, msg.s_entry(j, u), 1, code.len_bits, &scratch);
            y.xor_into(lam + t, msg.t_entry(j, u), 1, code.len_bits, &scratch);
        }
        seqs.push(y);
    }
    Ok(NodeShare::new(node, seqs))
}

/// The elimination input extracted from `c = Y^{share} (Phi^{partner})^T`.
///
/// When `share.node > partner` the window is `c[1 : L2]`; otherwise it is
/// `c[lambda_{share.node} + (1 : L2)]`, with
/// `L2 = L + t_{share,alpha} + t_{partner,alpha}`. Only the window is
/// materialized; every accumulation round after the first is metered.
pub fn msr_c_hat(
    share: &NodeShare,
    partner: usize,
    code: &MsrCode,
    ledger: &CostLedger,
) -> Result<BitSeq, CodeError> {
    code.check_node(share.node)?;
    code.check_node(partner)?;
    if share.node == partner {
        return Err(CodeError::BadNodeSet("pair nodes must differ"));
    }
    let alpha = code.alpha();
    if share.seqs.len() != alpha {
        return Err(CodeError::WrongSequenceCount { expected: alpha, got: share.seqs.len() });
    }
    let expect = code.share_seq_len(share.node);
    for s in &share.seqs {
        if s.len_bits() != expect {
            return Err(CodeError::WrongSequenceLength { expected: expect, got: s.len_bits() });
        }
    }
    let l2 = code.pair_len(share.node, partner);
    let w0 = if share.node > partner { 0 } else { code.lambda(share.node) as usize };
    let mut out = BitSeq::zeros(l2);
    let terms: Vec<(usize, &BitSeq)> = (1..=alpha)
        .map(|j| (code.phi.exp(partner, j) as usize, &share.seqs[j - 1]))
        .collect();
    accumulate_window(&mut out, w0, &terms, ledger);
    Ok(out)
}

/// The `c-hat` buffers for all ordered rank pairs, indexed by
/// (share rank, partner rank).
pub struct MsrChat {
    k: usize,
    bufs: Vec<Option<BitSeq>>,
}

impl MsrChat {
    fn slot(&self, su: usize, pv: usize) -> usize {
        (su - 1) * self.k + (pv - 1)
    }

    /// Removes the buffer computed from share rank `su` against partner
    /// rank `pv` (for external execution schedulers).
    pub fn take(&mut self, su: usize, pv: usize) -> Option<BitSeq> {
        let slot = self.slot(su, pv);
        self.bufs[slot].take()
    }

    /// Computes every `c-hat` from `k` full shares. `shares` must contain
    /// exactly the nodes of `nodes` (any order).
    pub fn gather(
        shares: &[NodeShare],
        nodes: &NodeSet,
        code: &MsrCode,
        ledger: &CostLedger,
    ) -> Result<Self, CodeError> {
        let k = code.k;
        if nodes.len() != k || shares.len() != k {
            return Err(CodeError::BadNodeSet("decode needs exactly k shares"));
        }
        if nodes.node_at_rank(1) > code.n {
            return Err(CodeError::NodeOutOfRange);
        }
        let mut chat = MsrChat { k, bufs: (0..k * k).map(|_| None).collect() };
        for su in 1..=k {
            let node = nodes.node_at_rank(su);
            let share = shares
                .iter()
                .find(|s| s.node == node)
                .ok_or(CodeError::BadNodeSet("share missing for node"))?;
            for pv in 1..=k {
                if pv == su {
                    continue;
                }
                let c = msr_c_hat(share, nodes.node_at_rank(pv), code, ledger)?;
                ledger.aux_alloc(seq_bytes(&c));
                let slot = chat.slot(su, pv);
                chat.bufs[slot] = Some(c);
            }
        }
        Ok(chat)
    }
}

/// The solved pair sequences: `p[(u,v)]` for `u > v` are the eliminated
/// buffers, `p[(v,u)]` for `v < u <= alpha` are the copies step 2 consumes
/// destructively; likewise `q`.
pub struct MsrPairs {
    k: usize,
    /// indexed `(row-1)*k + (col-1)`
    pub p: Vec<Option<BitSeq>>,
    pub q: Vec<Option<BitSeq>>,
}

impl MsrPairs {
    pub fn new(k: usize) -> Self {
        MsrPairs {
            k,
            p: (0..k * k).map(|_| None).collect(),
            q: (0..k * k).map(|_| None).collect(),
        }
    }

    pub fn slot(&self, row: usize, col: usize) -> usize {
        (row - 1) * self.k + (col - 1)
    }
}

fn seq_bytes(s: &BitSeq) -> u64 {
    (s.len_bits().div_ceil(64) * 8) as u64
}

/// Eliminates one step-1 pair system in place. `big` is the unshifted
/// window from the larger node, `small` the shifted window from the
/// smaller; on return `big` holds `p` and `small` holds `q`.
pub fn msr_step1_pair(
    big: &mut BitSeq,
    small: &mut BitSeq,
    node_big: usize,
    node_small: usize,
    code: &MsrCode,
    ledger: &CostLedger,
) -> Result<(), CodeError> {
    let lam_small = code.lambda(node_small);
    let lam_big = code.lambda(node_big);
    if lam_small >= lam_big {
        // equal lambdas would contradict the composite RID property
        return Err(CodeError::InvalidParameters("lambda must increase with node index"));
    }
    let l2 = code.pair_len(node_big, node_small);
    if big.len_bits() != l2 || small.len_bits() != l2 {
        return Err(CodeError::WrongSequenceLength {
            expected: l2,
            got: big.len_bits().min(small.len_bits()),
        });
    }
    let exps =
        ShiftMatrix::new(2, 2, alloc::vec![0, lam_small, 0, lam_big]).expect("2x2 exponents");
    let mut rows = [SeqWindow::whole(big), SeqWindow::whole(small)];
    shift_xor_eliminate(&mut rows, &exps, l2, ledger)?;
    Ok(())
}

/// Step 1: for every rank pair `v < u`, eliminate the 2x2 system
/// `(c_{u,v}, c_{v,u}) = ((1, z^{lambda_{i_u}}), (1, z^{lambda_{i_v}})) (p, q)`
/// in place on the `c-hat` buffers, then install the transposed copies
/// step 2 needs.
pub fn msr_step1(
    chat: MsrChat,
    nodes: &NodeSet,
    code: &MsrCode,
    ledger: &CostLedger,
) -> Result<MsrPairs, CodeError> {
    let k = code.k;
    if nodes.len() != k || chat.k != k {
        return Err(CodeError::BadNodeSet("step 1 needs k ranks"));
    }
    let mut chat = chat;
    let mut pairs = MsrPairs {
        k,
        p: (0..k * k).map(|_| None).collect(),
        q: (0..k * k).map(|_| None).collect(),
    };
    for u in 2..=k {
        for v in 1..=u - 1 {
            // ranks v < u, nodes i_v > i_u, lambda_{i_v} > lambda_{i_u}
            let node_u = nodes.node_at_rank(u);
            let node_v = nodes.node_at_rank(v);
            let slot_big = chat.slot(v, u); // share i_v, the unshifted window
            let slot_small = chat.slot(u, v); // share i_u, shifted by lambda_{i_u}
            let mut big =
                chat.bufs[slot_big].take().ok_or(CodeError::BadNodeSet("missing c-hat"))?;
            let mut small =
                chat.bufs[slot_small].take().ok_or(CodeError::BadNodeSet("missing c-hat"))?;
            msr_step1_pair(&mut big, &mut small, node_v, node_u, code, ledger)?;
            // big now holds p_{u,v}, small holds q_{u,v}
            install_pair(&mut pairs, u, v, big, small, ledger);
        }
    }
    Ok(pairs)
}

/// Stores a solved pair at `(u, v)` and, when step 2 will need the
/// transposed entry, installs fresh copies at `(v, u)`.
pub fn install_pair(
    pairs: &mut MsrPairs,
    u: usize,
    v: usize,
    p: BitSeq,
    q: BitSeq,
    ledger: &CostLedger,
) {
    if u < pairs.k {
        let pc = p.clone();
        let qc = q.clone();
        ledger.aux_alloc(seq_bytes(&pc) + seq_bytes(&qc));
        let slot = pairs.slot(v, u);
        pairs.p[slot] = Some(pc);
        pairs.q[slot] = Some(qc);
    }
    let slot = pairs.slot(u, v);
    pairs.p[slot] = Some(p);
    pairs.q[slot] = Some(q);
}

/// Location of `s-tilde_{v,m}` after the row-`v` system of step 2: the
/// grid position it lives in and the bit offset of its window.
fn stilde_location(v: usize, m: usize, nodes: &NodeSet, code: &MsrCode) -> (usize, usize, usize) {
    let u = if m < v { m } else { m + 1 };
    let node = nodes.node_at_rank(u);
    (u, v, code.phi.exp(node, m) as usize)
}

/// Step 2 for one symmetric block: solves the `alpha x alpha` systems
/// `p_{.,v} = [Phi^{i_u}]_{u != v} (S-tilde^v)^T` per row `v`, then the
/// final systems recovering each column of the block, all in place on the
/// pair buffers; returns the `alpha(alpha+1)/2` distinct entries (upper
/// triangle, row-major), reusing the buffer allocations.
pub fn msr_step2(
    grid: &mut [Option<BitSeq>],
    nodes: &NodeSet,
    code: &MsrCode,
    ledger: &CostLedger,
) -> Result<Vec<BitSeq>, CodeError> {
    let k = code.k;
    let alpha = code.alpha();
    let len = code.len_bits;
    let slot = |row: usize, col: usize| (row - 1) * k + (col - 1);

    // per-row systems: unknowns s-tilde_{v,1..alpha}, length L'_v
    for v in 1..=alpha {
        let node_v = nodes.node_at_rank(v);
        let lv = len + code.phi.exp(node_v, alpha) as usize;
        let mut plan: Vec<(usize, usize)> = Vec::with_capacity(alpha); // (slot, window offset)
        for m in 1..=alpha {
            let u = if m < v { m } else { m + 1 };
            let node_u = nodes.node_at_rank(u);
            // p-hat slice offset: t_{i_u, m}
            plan.push((slot(u, v), code.phi.exp(node_u, m) as usize));
        }
        let mut asc_nodes: Vec<usize> =
            (1..=k).filter(|&u| u != v).map(|u| nodes.node_at_rank(u)).collect();
        asc_nodes.sort_unstable();
        let asc_set = NodeSet::new(&asc_nodes).map_err(|_| CodeError::BadNodeSet("ranks"))?;
        let cols: Vec<usize> = (1..=alpha).collect();
        let exps =
            asc_set.ascending_submatrix(&code.phi, &cols).map_err(|_| CodeError::NotRid)?;
        let mut windows = disjoint_windows(grid, &plan, lv)?;
        shift_xor_eliminate(&mut windows, &exps, lv, ledger)?;
    }

    // final systems: column u of the block from s-hat_{v,u}, length L
    let mut out: Vec<Option<BitSeq>> = (0..alpha * (alpha + 1) / 2).map(|_| None).collect();
    for u in 1..=alpha {
        let mut plan: Vec<(usize, usize)> = Vec::with_capacity(alpha);
        for m in 1..=alpha {
            let (row, col, base) = stilde_location(m, u, nodes, code);
            let node_m = nodes.node_at_rank(m);
            // s-hat_{m,u} = s-tilde_{m,u}[t_{i_m,m} + (1:L)] within its window
            plan.push((slot(row, col), base + code.phi.exp(node_m, m) as usize));
        }
        let asc_nodes: Vec<usize> = {
            let mut v: Vec<usize> = (1..=alpha).map(|m| nodes.node_at_rank(m)).collect();
            v.sort_unstable();
            v
        };
        let asc_set = NodeSet::new(&asc_nodes).map_err(|_| CodeError::BadNodeSet("ranks"))?;
        let cols: Vec<usize> = (1..=alpha).collect();
        let exps =
            asc_set.ascending_submatrix(&code.phi, &cols).map_err(|_| CodeError::NotRid)?;
        {
            let mut windows = disjoint_windows(grid, &plan, len)?;
            shift_xor_eliminate(&mut windows, &exps, len, ledger)?;
        }
        // the window of unknown m now holds entry (m, u); keep m <= u by
        // cropping the buffer in place (no new allocation)
        for m in 1..=u {
            let (gslot, off) = plan[m - 1];
            let mut buf = grid[gslot].take().ok_or(CodeError::BadNodeSet("missing pair"))?;
            ledger.aux_free(seq_bytes(&buf));
            buf.crop_window(off, len);
            out[tri_index(alpha, m, u)] = Some(buf);
        }
    }
    Ok(out.into_iter().map(|o| o.expect("all entries extracted")).collect())
}

/// Builds mutable windows into distinct grid slots, returned in plan order.
fn disjoint_windows<'a>(
    grid: &'a mut [Option<BitSeq>],
    plan: &[(usize, usize)],
    len: usize,
) -> Result<Vec<SeqWindow<'a>>, CodeError> {
    let mut order: Vec<usize> = (0..plan.len()).collect();
    order.sort_unstable_by_key(|&ix| plan[ix].0);
    for w in order.windows(2) {
        if plan[w[0]].0 == plan[w[1]].0 {
            return Err(CodeError::BadNodeSet("aliased pair buffers"));
        }
    }
    let mut picked: Vec<Option<SeqWindow<'a>>> = (0..plan.len()).map(|_| None).collect();
    let mut rest: &'a mut [Option<BitSeq>] = grid;
    let mut base = 0usize;
    for &ix in &order {
        let (gslot, off) = plan[ix];
        let (head, tail) = rest.split_at_mut(gslot - base + 1);
        let seq = head[gslot - base].as_mut().ok_or(CodeError::BadNodeSet("missing pair"))?;
        if off + len > seq.len_bits() {
            return Err(CodeError::WrongSequenceLength {
                expected: off + len,
                got: seq.len_bits(),
            });
        }
        picked[ix] = Some(SeqWindow::at_offset(seq, off));
        rest = tail;
        base = gslot + 1;
    }
    Ok(picked.into_iter().map(|w| w.expect("window built")).collect())
}

/// Decodes the `B` message sequences from `k` full shares. Returns them in
/// pack order (`S` triangle then `T` triangle).
pub fn msr_decode(
    shares: &[NodeShare],
    code: &MsrCode,
    ledger: &CostLedger,
) -> Result<Vec<BitSeq>, CodeError> {
    let node_ids: Vec<usize> = shares.iter().map(|s| s.node).collect();
    let nodes = NodeSet::new(&node_ids).map_err(|_| CodeError::BadNodeSet("duplicate nodes"))?;
    if nodes.len() != code.k {
        return Err(CodeError::BadNodeSet("decode needs exactly k shares"));
    }
    let chat = MsrChat::gather(shares, &nodes, code, ledger)?;
    let mut pairs = msr_step1(chat, &nodes, code, ledger)?;
    let mut out = msr_step2(&mut pairs.p, &nodes, code, ledger)?;
    let t = msr_step2(&mut pairs.q, &nodes, code, ledger)?;
    out.extend(t);
    Ok(out)
}

/// Computes the repair subsequence helper `share.node` sends for failed
/// node `failed` at rank `v` in the descending helper list:
/// `r-hat_v = r_j[tt_{j,v} + (1 : L + t_{failed,alpha})]` where
/// `r_j = Y^j (Phi^{failed})^T` and `tt` is the composite exponent matrix.
pub fn msr_repair_helper(
    share: &NodeShare,
    failed: usize,
    v: usize,
    code: &MsrCode,
    ledger: &CostLedger,
) -> Result<BitSeq, CodeError> {
    code.check_node(failed)?;
    code.check_node(share.node)?;
    if share.node == failed {
        return Err(CodeError::BadNodeSet("helper cannot be the failed node"));
    }
    let d = code.d();
    if v < 1 || v > d {
        return Err(CodeError::RankOutOfRange);
    }
    let alpha = code.alpha();
    if share.seqs.len() != alpha {
        return Err(CodeError::WrongSequenceCount { expected: alpha, got: share.seqs.len() });
    }
    let repair_len = code.repair_len(failed);
    let w0 = code.composite.exp(share.node, v) as usize;
    let mut out = BitSeq::zeros(repair_len);
    let terms: Vec<(usize, &BitSeq)> = (1..=alpha)
        .map(|u| (code.phi.exp(failed, u) as usize, &share.seqs[u - 1]))
        .collect();
    accumulate_window(&mut out, w0, &terms, ledger);
    Ok(out)
}

/// Repairs a failed node from `d` helper subsequences: eliminates the
/// `d x d` composite-exponent system for `X^i` in place, then rebuilds
/// `Y^i = X^i_{1:alpha} + z^{lambda_i} X^i_{alpha+1:2alpha}`; the result is
/// bit-identical to a fresh encode of the lost share.
pub fn msr_repair(
    mut rhat: Vec<BitSeq>,
    helpers: &NodeSet,
    failed: usize,
    code: &MsrCode,
    ledger: &CostLedger,
) -> Result<NodeShare, CodeError> {
    code.check_node(failed)?;
    let d = code.d();
    let alpha = code.alpha();
    if helpers.len() != d {
        return Err(CodeError::BadNodeSet("repair needs exactly d helpers"));
    }
    if helpers.rank_of(failed).is_some() {
        return Err(CodeError::BadNodeSet("helper set contains the failed node"));
    }
    if helpers.node_at_rank(1) > code.n {
        return Err(CodeError::NodeOutOfRange);
    }
    let repair_len = code.repair_len(failed);
    if rhat.len() != d {
        return Err(CodeError::WrongSequenceCount { expected: d, got: rhat.len() });
    }
    for s in &rhat {
        if s.len_bits() != repair_len {
            return Err(CodeError::WrongSequenceLength {
                expected: repair_len,
                got: s.len_bits(),
            });
        }
    }
    let cols: Vec<usize> = (1..=d).collect();
    let exps =
        helpers.ascending_submatrix(&code.composite, &cols).map_err(|_| CodeError::NotRid)?;
    {
        let mut windows: Vec<SeqWindow<'_>> = rhat.iter_mut().map(SeqWindow::whole).collect();
        shift_xor_eliminate(&mut windows, &exps, repair_len, ledger)?;
    }
    // rhat[u-1] now holds x^i_u; rebuild the stored sequences
    let lam = code.lambda(failed) as usize;
    let mut seqs = Vec::with_capacity(alpha);
    for u in 1..=alpha {
        let mut y = BitSeq::zeros(code.share_seq_len(failed));
        accumulate_window(&mut y, 0, &[(0, &rhat[u - 1]), (lam, &rhat[alpha + u - 1])], ledger);
        seqs.push(y);
    }
    Ok(NodeShare::new(failed, seqs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn test_code(len: usize) -> MsrCode {
        MsrCode::vandermonde(6, 3, len).unwrap()
    }

    fn numbered_messages(code: &MsrCode) -> Vec<BitSeq> {
        (1..=code.message_count())
            .map(|m| {
                let mut s = BitSeq::zeros(code.len_bits());
                s.set(m, true);
                s
            })
            .collect()
    }

    /// Direct product route: `Phi^a Block (Phi^b)^T` from the message
    /// entries, independent of the elimination path.
    fn direct_pair_product(
        entry: impl Fn(usize, usize) -> BitSeq,
        code: &MsrCode,
        a: usize,
        b: usize,
    ) -> BitSeq {
        let alpha = code.alpha();
        let mut acc = BitSeq::zeros(0);
        for i in 1..=alpha {
            for j in 1..=alpha {
                let shift = (code.phi().exp(a, i) + code.phi().exp(b, j)) as usize;
                acc = acc.add(&entry(i, j).shift_pad(shift));
            }
        }
        acc.add(&BitSeq::zeros(code.pair_len(a, b)))
    }

    #[test]
    fn code_parameters_are_validated() {
        assert!(MsrCode::vandermonde(6, 3, 8).is_ok());
        assert!(MsrCode::vandermonde(4, 3, 8).is_err()); // d = 4 >= n
        assert!(MsrCode::vandermonde(6, 1, 8).is_err());
        // zero lambdas break the composite RID property
        let phi = ShiftMatrix::vandermonde(6, 2);
        assert_eq!(MsrCode::new(6, 3, 8, phi, vec![0; 6]).unwrap_err(), CodeError::NotRid);
    }

    #[test]
    fn vandermonde_composite_matches_worked_example() {
        let code = test_code(8);
        // Lambda = diag{1, z^2, z^4, ...}; composite row i is
        // (0, i-1, 2(i-1), 3(i-1))
        for i in 1..=6usize {
            assert_eq!(code.lambda(i), 2 * (i as u32 - 1));
            for j in 1..=4usize {
                assert_eq!(code.composite().exp(i, j), ((i - 1) * (j - 1)) as u32);
            }
        }
    }

    #[test]
    fn encode_matches_worked_example() {
        let code = test_code(16);
        let msgs = numbered_messages(&code);
        let msg = MsrMessage::pack(msgs.clone(), &code).unwrap();
        for node in 1..=6 {
            let share = msr_encode(&msg, &code, node).unwrap();
            let t = node - 1;
            // y_{i,1} = x1 + z^{i-1} x2 + z^{2(i-1)} x4 + z^{3(i-1)} x5
            let y1 = msgs[0]
                .add(&msgs[1].shift_pad(t))
                .add(&msgs[3].shift_pad(2 * t))
                .add(&msgs[4].shift_pad(3 * t))
                .add(&BitSeq::zeros(code.share_seq_len(node)));
            assert_eq!(share.seqs[0], y1, "node {node}");
            // y_{i,2} = x2 + z^{i-1} x3 + z^{2(i-1)} x5 + z^{3(i-1)} x6
            let y2 = msgs[1]
                .add(&msgs[2].shift_pad(t))
                .add(&msgs[4].shift_pad(2 * t))
                .add(&msgs[5].shift_pad(3 * t))
                .add(&BitSeq::zeros(code.share_seq_len(node)));
            assert_eq!(share.seqs[1], y2, "node {node}");
        }
    }

    #[test]
    fn c_hat_windows_match_worked_example() {
        let code = test_code(16);
        let len = 16;
        let msg = MsrMessage::pack(numbered_messages(&code), &code).unwrap();
        let ledger = CostLedger::new();
        // decode set {4,3,1}: i_1 = 4, i_2 = 3, i_3 = 1
        let share4 = msr_encode(&msg, &code, 4).unwrap();
        let share3 = msr_encode(&msg, &code, 3).unwrap();
        let share1 = msr_encode(&msg, &code, 1).unwrap();

        let full = |share: &NodeShare, partner: usize| {
            let mut acc = BitSeq::zeros(0);
            for j in 1..=2usize {
                acc = acc.add(&share.seqs[j - 1].shift_pad(code.phi().exp(partner, j) as usize));
            }
            acc
        };
        // c-hat_{1,2} = (Y^4 (Phi^3)^T)[1:(L+5)]
        let c12 = msr_c_hat(&share4, 3, &code, &ledger).unwrap();
        assert_eq!(c12, full(&share4, 3).subseq(1, len + 5));
        // c-hat_{2,1} = (Y^3 (Phi^4)^T)[5:(L+9)] (lambda_3 = 4)
        let c21 = msr_c_hat(&share3, 4, &code, &ledger).unwrap();
        assert_eq!(c21, full(&share3, 4).subseq(5, len + 9));
        // c-hat_{2,3} = (Y^3 (Phi^1)^T)[1:(L+2)]
        let c23 = msr_c_hat(&share3, 1, &code, &ledger).unwrap();
        assert_eq!(c23, full(&share3, 1).subseq(1, len + 2));
        // c-hat_{3,1} = (Y^1 (Phi^4)^T)[1:(L+3)] (lambda_1 = 0)
        let c31 = msr_c_hat(&share1, 4, &code, &ledger).unwrap();
        assert_eq!(c31, full(&share1, 4).subseq(1, len + 3));
        // zero shares give zero c-hat
        let zero = NodeShare::new(2, vec![BitSeq::zeros(code.share_seq_len(2)); 2]);
        let cz = msr_c_hat(&zero, 5, &code, &ledger).unwrap();
        assert_eq!(cz, BitSeq::zeros(code.pair_len(2, 5)));
    }

    #[test]
    fn step1_recovers_pair_products() {
        let code = test_code(16);
        let msgs = numbered_messages(&code);
        let msg = MsrMessage::pack(msgs, &code).unwrap();
        let ledger = CostLedger::new();
        let nodes = NodeSet::new(&[4, 3, 1]).unwrap();
        let shares: Vec<NodeShare> =
            [4, 3, 1].iter().map(|&i| msr_encode(&msg, &code, i).unwrap()).collect();
        let chat = MsrChat::gather(&shares, &nodes, &code, &ledger).unwrap();
        let pairs = msr_step1(chat, &nodes, &code, &ledger).unwrap();
        for u in 2..=3usize {
            for v in 1..=u - 1 {
                let a = nodes.node_at_rank(u);
                let b = nodes.node_at_rank(v);
                let p_direct = direct_pair_product(|i, j| msg.s_entry(i, j).clone(), &code, a, b);
                let q_direct = direct_pair_product(|i, j| msg.t_entry(i, j).clone(), &code, a, b);
                // block symmetry makes the product symmetric in the nodes
                assert_eq!(
                    p_direct,
                    direct_pair_product(|i, j| msg.s_entry(i, j).clone(), &code, b, a)
                );
                let slot = pairs.slot(u, v);
                assert_eq!(pairs.p[slot].as_ref().unwrap(), &p_direct, "p ({u},{v})");
                assert_eq!(pairs.q[slot].as_ref().unwrap(), &q_direct, "q ({u},{v})");
            }
        }
    }

    #[test]
    fn decode_round_trip_single_subset() {
        let code = test_code(16);
        let msgs = numbered_messages(&code);
        let msg = MsrMessage::pack(msgs.clone(), &code).unwrap();
        let ledger = CostLedger::new();
        let shares: Vec<NodeShare> =
            [4, 3, 1].iter().map(|&i| msr_encode(&msg, &code, i).unwrap()).collect();
        let decoded = msr_decode(&shares, &code, &ledger).unwrap();
        assert_eq!(decoded, msgs);
    }

    #[test]
    fn repair_helper_matches_worked_example() {
        let code = test_code(16);
        let len = 16;
        let msg = MsrMessage::pack(numbered_messages(&code), &code).unwrap();
        let ledger = CostLedger::new();
        // repair node 3 from helpers {5,4,2,1}
        let share5 = msr_encode(&msg, &code, 5).unwrap();
        let r1 = msr_repair_helper(&share5, 3, 1, &code, &ledger).unwrap();
        let full5 = share5.seqs[0].add(&share5.seqs[1].shift_pad(2));
        // r-hat_1 = (Y^5 (Phi^3)^T)[1:(L+2)]
        assert_eq!(r1, full5.subseq(1, len + 2));
        // r-hat_4 = r_1 whole (composite t_{1,4} = 0)
        let share1 = msr_encode(&msg, &code, 1).unwrap();
        let r4 = msr_repair_helper(&share1, 3, 4, &code, &ledger).unwrap();
        let full1 = share1.seqs[0].add(&share1.seqs[1].shift_pad(2));
        assert_eq!(r4, full1.subseq(1, len + 2));
    }

    #[test]
    fn repair_rebuilds_exact_share() {
        let code = test_code(16);
        let msg = MsrMessage::pack(numbered_messages(&code), &code).unwrap();
        let ledger = CostLedger::new();
        let helpers = NodeSet::new(&[5, 4, 2, 1]).unwrap();
        let mut rhat = Vec::new();
        for v in 1..=4 {
            let helper = helpers.node_at_rank(v);
            let share = msr_encode(&msg, &code, helper).unwrap();
            rhat.push(msr_repair_helper(&share, 3, v, &code, &ledger).unwrap());
        }
        let repaired = msr_repair(rhat, &helpers, 3, &code, &ledger).unwrap();
        assert_eq!(repaired, msr_encode(&msg, &code, 3).unwrap());
    }

    #[test]
    fn repair_rejects_bad_helper_sets() {
        let code = test_code(8);
        let ledger = CostLedger::new();
        let with_failed = NodeSet::new(&[5, 4, 3, 1]).unwrap();
        let rhat = vec![BitSeq::zeros(code.repair_len(3)); 4];
        assert!(matches!(
            msr_repair(rhat.clone(), &with_failed, 3, &code, &ledger),
            Err(CodeError::BadNodeSet(_))
        ));
        let short = NodeSet::new(&[5, 4, 1]).unwrap();
        assert!(matches!(
            msr_repair(rhat[..3].to_vec(), &short, 3, &code, &ledger),
            Err(CodeError::BadNodeSet(_))
        ));
    }
}
