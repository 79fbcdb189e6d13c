//! Simulated node storage for shift-XOR regenerating codes.
//!
//! This crate carries everything the `no_std` core leaves out: the `SXOR`
//! share file format, plain-text manifests with content digests, a
//! simulated distributed store with failure injection whose every
//! "transmission" is a metered local fetch, thread-parallel decode
//! schedulers, and the `shiftxor` command-line front end.
//!
//! Transmission is deliberately metered local IO rather than sockets: the
//! quantities under test are bit counts, and the ledger's
//! `bits_transferred` counter is the bandwidth figure every claim is
//! checked against.

use shiftxor_core::share::CodeError;
use thiserror::Error;

pub mod cli;
pub mod format;
pub mod parallel;
pub mod report;
pub mod store;

pub use format::{fnv1a64, read_share, share_file_name, write_share, CodeSpec, Manifest};
pub use store::SimStore;

/// Errors from the storage harness, file formats and manifests.
#[derive(Debug, Error)]
pub enum StoreError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed share file: {0}")]
    Format(&'static str),
    #[error("malformed manifest: {0}")]
    Manifest(String),
    #[error("node {0} unavailable")]
    NodeUnavailable(usize),
    #[error("node index out of range")]
    NodeOutOfRange,
    #[error("fetch range out of bounds")]
    RangeOutOfBounds,
    #[error("node {0} already failed")]
    AlreadyFailed(usize),
    #[error("node {0} is alive")]
    NodeAlive(usize),
    #[error("digest mismatch for node {0}")]
    DigestMismatch(usize),
    #[error("share file for node {0} missing")]
    MissingShare(usize),
    #[error(transparent)]
    Code(#[from] CodeError),
}
