//! Thread-parallel execution of the independent elimination systems.
//!
//! MBR step-1 column systems and MSR step-1 pair systems touch disjoint
//! buffers, so they run on scoped worker threads; back-substitutions and
//! the sequential tail steps are unchanged. XOR bit counts in the shared
//! ledger are identical to the sequential path (integer-op interleavings
//! may differ).

use std::thread;

use shiftxor_core::mbr::{
    mbr_decode, mbr_eliminate_column, mbr_substitute_column, MbrCode, MbrHat,
};
use shiftxor_core::msr::{
    install_pair, msr_step1_pair, msr_step2, MsrChat, MsrCode, MsrPairs,
};
use shiftxor_core::share::CodeError;
use shiftxor_core::{BitSeq, CostLedger, NodeSet, NodeShare};

/// MBR decode with step-1 column eliminations distributed over up to
/// `jobs` worker threads. `jobs <= 1` falls back to the sequential path.
pub fn mbr_decode_parallel(
    hat: &mut MbrHat,
    nodes: &NodeSet,
    code: &MbrCode,
    ledger: &CostLedger,
    jobs: usize,
) -> Result<(), CodeError> {
    let (k, d) = (code.k(), code.d());
    if jobs <= 1 || d == k {
        return mbr_decode(hat, nodes, code, ledger);
    }
    // step 1 eliminations, parallel across the T columns
    {
        let t_cols = &mut hat.cols_mut()[k..d];
        let total = t_cols.len();
        let workers = jobs.min(total);
        let per = total.div_ceil(workers);
        let results = thread::scope(|scope| {
            let mut handles = Vec::new();
            for (chunk_ix, chunk) in t_cols.chunks_mut(per).enumerate() {
                handles.push(scope.spawn(move || {
                    for (off, col) in chunk.iter_mut().enumerate() {
                        let u = k + 1 + chunk_ix * per + off;
                        mbr_eliminate_column(col, u, nodes, code, ledger)?;
                    }
                    Ok::<(), CodeError>(())
                }));
            }
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect::<Vec<_>>()
        });
        for r in results {
            r?;
        }
    }
    // substitutions are cross-column and stay sequential
    for u in ((k + 1)..=d).rev() {
        mbr_substitute_column(hat.cols_mut(), u, k, nodes, code, ledger);
    }
    // step 2 is inherently sequential in u
    for u in (2..=k).rev() {
        mbr_eliminate_column(&mut hat.cols_mut()[u - 1], u, nodes, code, ledger)?;
        mbr_substitute_column(hat.cols_mut(), u, u - 1, nodes, code, ledger);
    }
    Ok(())
}

/// MSR decode with step-1 pair systems distributed over up to `jobs`
/// worker threads.
pub fn msr_decode_parallel(
    shares: &[NodeShare],
    code: &MsrCode,
    ledger: &CostLedger,
    jobs: usize,
) -> Result<Vec<BitSeq>, CodeError> {
    let node_ids: Vec<usize> = shares.iter().map(|s| s.node).collect();
    let nodes = NodeSet::new(&node_ids).map_err(|_| CodeError::BadNodeSet("duplicate nodes"))?;
    if nodes.len() != code.k() {
        return Err(CodeError::BadNodeSet("decode needs exactly k shares"));
    }
    let mut chat = MsrChat::gather(shares, &nodes, code, ledger)?;

    // pull each pair's two buffers out and eliminate them on workers
    struct PairJob {
        u: usize,
        v: usize,
        node_big: usize,
        node_small: usize,
        big: BitSeq,
        small: BitSeq,
    }
    let k = code.k();
    let mut work = Vec::new();
    for u in 2..=k {
        for v in 1..=u - 1 {
            let big = chat.take(v, u).ok_or(CodeError::BadNodeSet("missing c-hat"))?;
            let small = chat.take(u, v).ok_or(CodeError::BadNodeSet("missing c-hat"))?;
            work.push(PairJob {
                u,
                v,
                node_big: nodes.node_at_rank(v),
                node_small: nodes.node_at_rank(u),
                big,
                small,
            });
        }
    }
    let workers = jobs.max(1).min(work.len().max(1));
    let per = work.len().div_ceil(workers).max(1);
    let results = thread::scope(|scope| {
        let mut handles = Vec::new();
        for chunk in work.chunks_mut(per) {
            handles.push(scope.spawn(move || {
                for job in chunk.iter_mut() {
                    msr_step1_pair(
                        &mut job.big,
                        &mut job.small,
                        job.node_big,
                        job.node_small,
                        code,
                        ledger,
                    )?;
                }
                Ok::<(), CodeError>(())
            }));
        }
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect::<Vec<_>>()
    });
    for r in results {
        r?;
    }
    let mut pairs = MsrPairs::new(k);
    for job in work {
        install_pair(&mut pairs, job.u, job.v, job.big, job.small, ledger);
    }
    let mut out = msr_step2(&mut pairs.p, &nodes, code, ledger)?;
    let t = msr_step2(&mut pairs.q, &nodes, code, ledger)?;
    out.extend(t);
    Ok(out)
}
