//! Shift-XOR product-matrix regenerating codes.
//!
//! A shift-XOR code encodes binary message sequences using only two
//! operations: the shift `z^t` (pad `t` zeros in front) and bit-wise XOR.
//! Coded sequences are `Y = Psi * M` where `Psi = (z^{t_{i,j}})` is a matrix
//! of shift operators whose exponents satisfy the refined increasing
//! difference (RID) property and `M` is a structured message matrix.
//!
//! The crate provides:
//!
//! - [`bitseq::BitSeq`]: bit-packed binary sequences with zero-pad shift,
//!   XOR addition, subsequence extraction, and in-place XOR-at-offset;
//! - [`genmatrix::ShiftMatrix`]: shift-exponent matrices, RID validation,
//!   Vandermonde construction, and phase-length computation;
//! - [`solver`]: in-place shift-XOR elimination, the zigzag baseline, and a
//!   dense GF(2) oracle for differential testing;
//! - [`mbr`] and [`msr`]: minimum-bandwidth and minimum-storage regenerating
//!   codes built on the product-matrix construction, with bandwidth-optimal
//!   decoding and exact node repair;
//! - [`ledger::CostLedger`]: explicit accounting of transferred bits and XOR
//!   operations, so every bandwidth and complexity claim is checkable.
//!
//! All sequence positions and matrix indices in the public API are 1-based,
//! mirroring the algebra the formulas come from; implementations map to
//! 0-based machine indexing internally. Out-of-range reads are zero by
//! convention, out-of-range writes are contract violations.
//!
//! The crate is `no_std` (requires `alloc`); IO, file formats and the CLI
//! live in the companion `shiftxor-store` crate.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod bitseq;
pub mod genmatrix;
pub mod ledger;
pub mod mbr;
pub mod msr;
pub mod share;
pub mod solver;

pub use bitseq::BitSeq;
pub use genmatrix::{NodeSet, PhasePlan, ShiftMatrix};
pub use ledger::{CostLedger, LedgerSnapshot};
pub use share::NodeShare;
