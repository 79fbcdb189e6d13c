//! Types shared by both code families: the per-node storage unit and the
//! code-level error type.

use alloc::vec::Vec;
use core::fmt;

use crate::bitseq::BitSeq;
use crate::solver::SolverError;

/// One storage node's coded sequences plus its 1-based node index; the
/// persistence and transfer unit for both code families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeShare {
    pub node: usize,
    pub seqs: Vec<BitSeq>,
}

impl NodeShare {
    pub fn new(node: usize, seqs: Vec<BitSeq>) -> Self {
        NodeShare { node, seqs }
    }

    /// Total stored bits across all sequences.
    pub fn total_bits(&self) -> usize {
        self.seqs.iter().map(|s| s.len_bits()).sum()
    }
}

/// Errors from code construction, encoding, decoding and repair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeError {
    InvalidParameters(&'static str),
    NotRid,
    WrongSequenceCount { expected: usize, got: usize },
    WrongSequenceLength { expected: usize, got: usize },
    NodeOutOfRange,
    RankOutOfRange,
    BadNodeSet(&'static str),
    Solver(SolverError),
}

impl fmt::Display for CodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeError::InvalidParameters(msg) => write!(f, "invalid code parameters: {msg}"),
            CodeError::NotRid => write!(f, "generator matrix does not satisfy the RID property"),
            CodeError::WrongSequenceCount { expected, got } => {
                write!(f, "expected {expected} sequences, got {got}")
            }
            CodeError::WrongSequenceLength { expected, got } => {
                write!(f, "expected sequence of {expected} bits, got {got}")
            }
            CodeError::NodeOutOfRange => write!(f, "node index out of range"),
            CodeError::RankOutOfRange => write!(f, "rank out of range"),
            CodeError::BadNodeSet(msg) => write!(f, "bad node set: {msg}"),
            CodeError::Solver(e) => write!(f, "solver: {e}"),
        }
    }
}

impl core::error::Error for CodeError {}

impl From<SolverError> for CodeError {
    fn from(e: SolverError) -> Self {
        CodeError::Solver(e)
    }
}
