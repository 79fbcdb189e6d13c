//! Shift-exponent matrices and the refined increasing difference property.
//!
//! A [`ShiftMatrix`] stores the nonnegative exponents `t_{i,j}` of a matrix
//! of shift operators `(z^{t_{i,j}})`. The refined increasing difference
//! (RID) property — for all row pairs `i < i'` and column pairs `j < j'`,
//! `0 <= t_{i,j'} - t_{i,j} < t_{i',j'} - t_{i',j}`, with equality on the
//! left permitted only for `i = 1` — is what makes the shift-XOR systems in
//! [`crate::solver`] uniquely solvable. Vandermonde exponents
//! `t_{i,j} = (i-1)(j-1)` satisfy it and minimize storage overhead.
//!
//! All indices in the public API are 1-based.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Errors from matrix construction, subsetting and phase planning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixError {
    EmptyDimension,
    WrongEntryCount { expected: usize, got: usize },
    IndexOutOfRange,
    IndicesNotAscending,
    NotSquare,
    NotRid,
    DuplicateNode,
    ParseText,
}

impl fmt::Display for MatrixError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixError::EmptyDimension => write!(f, "matrix dimensions must be positive"),
            MatrixError::WrongEntryCount { expected, got } => {
                write!(f, "expected {expected} entries, got {got}")
            }
            MatrixError::IndexOutOfRange => write!(f, "index out of range"),
            MatrixError::IndicesNotAscending => write!(f, "indices must be strictly ascending"),
            MatrixError::NotSquare => write!(f, "matrix must be square"),
            MatrixError::NotRid => write!(f, "matrix does not satisfy the RID property"),
            MatrixError::DuplicateNode => write!(f, "node indices must be distinct"),
            MatrixError::ParseText => write!(f, "malformed exponent matrix text"),
        }
    }
}

impl core::error::Error for MatrixError {}

/// A matrix of nonnegative shift exponents, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftMatrix {
    rows: usize,
    cols: usize,
    t: Vec<u32>,
}

impl ShiftMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<u32>) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::EmptyDimension);
        }
        if entries.len() != rows * cols {
            return Err(MatrixError::WrongEntryCount {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Ok(ShiftMatrix { rows, cols, t: entries })
    }

    /// The Vandermonde exponent matrix `t_{i,j} = (i-1)(j-1)`, the RID
    /// matrix with minimal storage overhead.
    pub fn vandermonde(n: usize, d: usize) -> Self {
        let mut t = Vec::with_capacity(n * d);
        for i in 0..n {
            for j in 0..d {
                t.push((i * j) as u32);
            }
        }
        ShiftMatrix { rows: n, cols: d, t }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// The exponent `t_{i,j}`, 1-based.
    #[inline]
    pub fn exp(&self, i: usize, j: usize) -> u32 {
        assert!(i >= 1 && i <= self.rows && j >= 1 && j <= self.cols, "exp index out of range");
        self.t[(i - 1) * self.cols + (j - 1)]
    }

    /// Checks the RID property via adjacent differences: row-1 column
    /// differences nonnegative, and per-column differences strictly
    /// increasing down the rows. Equivalent to the quadratic definition by
    /// transitivity; see [`ShiftMatrix::check_rid_naive`].
    pub fn check_rid(&self) -> bool {
        if self.rows < 2 || self.cols < 2 {
            return true;
        }
        for j in 1..self.cols {
            let mut prev = i64::from(self.exp(1, j + 1)) - i64::from(self.exp(1, j));
            if prev < 0 {
                return false;
            }
            for i in 2..=self.rows {
                let d = i64::from(self.exp(i, j + 1)) - i64::from(self.exp(i, j));
                if d <= prev {
                    return false;
                }
                prev = d;
            }
        }
        true
    }

    /// The quadratic reference check, straight from the definition. Kept as
    /// the differential oracle for [`ShiftMatrix::check_rid`].
    pub fn check_rid_naive(&self) -> bool {
        for i in 1..self.rows {
            for ip in (i + 1)..=self.rows {
                for j in 1..self.cols {
                    for jp in (j + 1)..=self.cols {
                        let di = i64::from(self.exp(i, jp)) - i64::from(self.exp(i, j));
                        let dip = i64::from(self.exp(ip, jp)) - i64::from(self.exp(ip, j));
                        if di < 0 || di >= dip {
                            return false;
                        }
                        if di == 0 && i != 1 {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// The submatrix on the given 1-based, strictly ascending row and column
    /// indices. Any row/column subset of an RID matrix is again RID.
    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> Result<ShiftMatrix, MatrixError> {
        if row_idx.is_empty() || col_idx.is_empty() {
            return Err(MatrixError::EmptyDimension);
        }
        for w in row_idx.windows(2) {
            if w[0] >= w[1] {
                return Err(MatrixError::IndicesNotAscending);
            }
        }
        for w in col_idx.windows(2) {
            if w[0] >= w[1] {
                return Err(MatrixError::IndicesNotAscending);
            }
        }
        if *row_idx.last().unwrap() > self.rows
            || row_idx[0] < 1
            || *col_idx.last().unwrap() > self.cols
            || col_idx[0] < 1
        {
            return Err(MatrixError::IndexOutOfRange);
        }
        let mut t = Vec::with_capacity(row_idx.len() * col_idx.len());
        for &i in row_idx {
            for &j in col_idx {
                t.push(self.exp(i, j));
            }
        }
        Ok(ShiftMatrix { rows: row_idx.len(), cols: col_idx.len(), t })
    }

    /// The elimination schedule for a square RID system with unknown length
    /// `len`: phase `b < k` runs `t_{k-b,b+1} - t_{k-b,b}` iterations, phase
    /// `k` runs `len` iterations. Zero-length phases are legal when row 1 is
    /// involved and are skipped by the solver.
    pub fn phase_plan(&self, len: usize) -> Result<PhasePlan, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare);
        }
        if !self.check_rid() {
            return Err(MatrixError::NotRid);
        }
        let k = self.rows;
        let mut phase_len = Vec::with_capacity(k);
        for b in 1..k {
            let row = k - b;
            phase_len.push((self.exp(row, b + 1) - self.exp(row, b)) as usize);
        }
        phase_len.push(len);
        let mut prefix = Vec::with_capacity(k + 1);
        let mut acc = 0usize;
        prefix.push(0);
        for &l in &phase_len {
            acc += l;
            prefix.push(acc);
        }
        Ok(PhasePlan { k, len, phase_len, prefix })
    }

    /// Serializes as lines of space-separated integers, one row per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for i in 1..=self.rows {
            for j in 1..=self.cols {
                if j > 1 {
                    s.push(' ');
                }
                s.push_str(&itoa(self.exp(i, j)));
            }
            s.push('\n');
        }
        s
    }

    /// Parses the format produced by [`ShiftMatrix::to_text`]: non-empty
    /// lines of space-separated nonnegative integers, all rows equal length.
    pub fn parse_text(text: &str) -> Result<ShiftMatrix, MatrixError> {
        let mut entries = Vec::new();
        let mut cols = None;
        let mut rows = 0;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut count = 0;
            for tok in line.split_whitespace() {
                let v: u32 = tok.parse().map_err(|_| MatrixError::ParseText)?;
                entries.push(v);
                count += 1;
            }
            match cols {
                None => cols = Some(count),
                Some(c) if c != count => return Err(MatrixError::ParseText),
                _ => {}
            }
            rows += 1;
        }
        let cols = cols.ok_or(MatrixError::ParseText)?;
        ShiftMatrix::new(rows, cols, entries)
    }

    /// A pseudo-random RID matrix: Vandermonde-like column differences with
    /// per-row random slack and a random first column. Deterministic in
    /// `seed`; intended for randomized tests.
    pub fn random_rid(rows: usize, cols: usize, seed: u64, max_slack: u32) -> ShiftMatrix {
        let mut state = seed ^ 0x9e37_79b9_7f4a_7c15;
        let mut next = move || {
            // splitmix64
            state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            z ^ (z >> 31)
        };
        let s = u64::from(max_slack) + 1;
        // adjacent column differences, strictly increasing down each column
        let mut diffs = Vec::with_capacity(rows);
        let mut first: Vec<u32> = Vec::with_capacity(cols.max(1) - 1);
        for _ in 0..cols.saturating_sub(1) {
            first.push((next() % s) as u32);
        }
        diffs.push(first);
        for i in 1..rows {
            let prev = diffs[i - 1].clone();
            let row: Vec<u32> = prev.iter().map(|&p| p + 1 + (next() % s) as u32).collect();
            diffs.push(row);
        }
        let mut t = Vec::with_capacity(rows * cols);
        for diff_row in diffs.iter() {
            let mut v = (next() % s) as u32;
            t.push(v);
            for &d in diff_row {
                v += d;
                t.push(v);
            }
        }
        let m = ShiftMatrix { rows, cols, t };
        debug_assert!(m.check_rid());
        m
    }
}

fn itoa(mut v: u32) -> String {
    if v == 0 {
        return String::from("0");
    }
    let mut digits = [0u8; 10];
    let mut n = 0;
    while v > 0 {
        digits[n] = b'0' + (v % 10) as u8;
        v /= 10;
        n += 1;
    }
    digits[..n].iter().rev().map(|&b| b as char).collect()
}

/// The iteration schedule of the shift-XOR elimination for a `k x k` system
/// with unknown length `len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasePlan {
    k: usize,
    len: usize,
    phase_len: Vec<usize>,
    /// `prefix[b]` is the total iteration count of phases `1..=b`;
    /// `prefix[0] = 0`.
    prefix: Vec<usize>,
}

impl PhasePlan {
    pub fn k(&self) -> usize {
        self.k
    }

    /// The unknown length `L` the plan was built for.
    pub fn unknown_len(&self) -> usize {
        self.len
    }

    /// `L_b` for `b` in `1..=k`.
    pub fn phase_len(&self, b: usize) -> usize {
        self.phase_len[b - 1]
    }

    /// `L_{1:b}` for `b` in `0..=k`.
    pub fn prefix(&self, b: usize) -> usize {
        self.prefix[b]
    }

    /// Total iteration count `L_{1:k}`.
    pub fn total_iterations(&self) -> usize {
        self.prefix[self.k]
    }
}

/// A set of storage nodes participating in a decode or repair, held in the
/// descending order `i_1 > i_2 > ... > i_m` used by the selection formulas.
///
/// The solver's elimination contract indexes equation rows in ascending node
/// order while the subsequence `x-hat_v` is taken from node `i_v`; this type
/// centralizes that mapping (unknown `v` corresponds to ascending row
/// `m + 1 - v`) so code modules never recompute it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSet {
    desc: Vec<usize>,
}

impl NodeSet {
    /// Builds a node set from indices in any order; duplicates are refused.
    pub fn new(nodes: &[usize]) -> Result<Self, MatrixError> {
        if nodes.is_empty() {
            return Err(MatrixError::EmptyDimension);
        }
        let mut desc = nodes.to_vec();
        desc.sort_unstable_by(|a, b| b.cmp(a));
        if desc.windows(2).any(|w| w[0] == w[1]) {
            return Err(MatrixError::DuplicateNode);
        }
        if desc[desc.len() - 1] < 1 {
            return Err(MatrixError::IndexOutOfRange);
        }
        Ok(NodeSet { desc })
    }

    pub fn len(&self) -> usize {
        self.desc.len()
    }

    pub fn is_empty(&self) -> bool {
        self.desc.is_empty()
    }

    /// `i_v`: the node at 1-based rank `v` in descending order.
    pub fn node_at_rank(&self, v: usize) -> usize {
        self.desc[v - 1]
    }

    /// The rank `v` with `i_v = node`, if the node participates.
    pub fn rank_of(&self, node: usize) -> Option<usize> {
        self.desc.iter().position(|&n| n == node).map(|p| p + 1)
    }

    /// Nodes in descending order `i_1 > i_2 > ...`.
    pub fn descending(&self) -> &[usize] {
        &self.desc
    }

    /// Nodes in ascending order, the row order of the elimination.
    pub fn ascending(&self) -> Vec<usize> {
        let mut asc = self.desc.clone();
        asc.reverse();
        asc
    }

    /// The exponent submatrix on this node set's rows (ascending) and the
    /// given columns — the generator matrix handed to the solver.
    pub fn ascending_submatrix(
        &self,
        m: &ShiftMatrix,
        col_idx: &[usize],
    ) -> Result<ShiftMatrix, MatrixError> {
        m.submatrix(&self.ascending(), col_idx)
    }
}
