//! The `shiftxor` command line: encode a file into node shares, decode
//! from any `k` shares, repair a failed node from `d` helpers, solve raw
//! shift-XOR systems, and benchmark against the closed-form bounds.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use shiftxor_core::mbr::{mbr_repair, MbrCode, MbrMessage};
use shiftxor_core::msr::{msr_repair, MsrCode, MsrMessage};
use shiftxor_core::solver::{
    encode_system, select_subsequences, shift_xor_eliminate, zigzag_solve, SeqWindow,
};
use shiftxor_core::{BitSeq, CostLedger, NodeSet, NodeShare, ShiftMatrix};

use crate::format::{fnv1a64, share_to_bytes, write_share, CodeSpec};
use crate::parallel::{mbr_decode_parallel, msr_decode_parallel};
use crate::report::{
    decode_bandwidth_expected, decode_xor_bound, repair_bandwidth_expected, repair_xor_bound,
    OpReport, ReportBounds,
};
use crate::store::SimStore;
use crate::StoreError;

#[derive(Parser)]
#[command(
    name = "shiftxor",
    version,
    about = "Shift-XOR regenerating codes: encode, decode, repair, solve, bench"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Encode a file into n node share files plus a manifest.
    Encode(EncodeArgs),
    /// Reconstruct the original file from any k live nodes.
    Decode(DecodeArgs),
    /// Rebuild a failed node's share from d helper nodes.
    Repair(RepairArgs),
    /// Solve a raw k x k shift-XOR system from a text file.
    Solve(SolveArgs),
    /// Run the measurement grid and check every closed-form bound.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CodeKind {
    Mbr,
    Msr,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Args)]
pub struct EncodeArgs {
    #[arg(long, value_enum)]
    pub code: CodeKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long = "len-bits")]
    pub len_bits: usize,
    /// Exponent matrix file (rows of space-separated integers); Vandermonde
    /// when omitted. For msr the file holds the composite [Phi Lambda*Phi].
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory for the share files and manifest.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct DecodeArgs {
    /// Store directory written by encode.
    #[arg(long)]
    pub dir: PathBuf,
    /// Nodes to decode from (comma separated); defaults to the k largest
    /// live nodes.
    #[arg(long, value_delimiter = ',')]
    pub nodes: Option<Vec<usize>>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, value_enum, default_value = "text")]
    pub report: ReportFormat,
}

#[derive(Args)]
pub struct RepairArgs {
    #[arg(long)]
    pub dir: PathBuf,
    /// The failed node to rebuild.
    #[arg(long)]
    pub failed: usize,
    /// Exactly d helper nodes (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub helpers: Vec<usize>,
    #[arg(long, value_enum, default_value = "text")]
    pub report: ReportFormat,
}

#[derive(Args)]
pub struct SolveArgs {
    /// System file: a "k L" header line, k exponent rows, then k
    /// hex-encoded coded sequences of L + t_{r,k} bits each.
    #[arg(long)]
    pub input: PathBuf,
    /// Write the k solved hex rows here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Restrict to one code family.
    #[arg(long, value_enum)]
    pub code: Option<CodeKind>,
    #[arg(long = "len-bits", default_value_t = 4096)]
    pub len_bits: usize,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, value_enum, default_value = "text")]
    pub report: ReportFormat,
    /// Write the report here as well as stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Command failures carrying the process exit code: 2 parameter error,
/// 3 insufficient shares/helpers, 4 verification failure.
#[derive(Debug)]
pub enum CliError {
    Param(String),
    Insufficient(String),
    Verification(String),
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Param(_) => 2,
            CliError::Insufficient(_) => 3,
            CliError::Verification(_) => 4,
            CliError::Other(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Param(m)
            | CliError::Insufficient(m)
            | CliError::Verification(m)
            | CliError::Other(m) => m,
        }
    }
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NodeUnavailable(_) | StoreError::MissingShare(_) => {
                CliError::Insufficient(e.to_string())
            }
            StoreError::DigestMismatch(_) => CliError::Verification(e.to_string()),
            StoreError::NodeOutOfRange | StoreError::RangeOutOfBounds => {
                CliError::Param(e.to_string())
            }
            other => CliError::Other(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(format!("io: {e}"))
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Encode(args) => cmd_encode(args),
        Cmd::Decode(args) => cmd_decode(args),
        Cmd::Repair(args) => cmd_repair(args),
        Cmd::Solve(args) => cmd_solve(args),
        Cmd::Bench(args) => cmd_bench(args),
    }
}

fn build_spec(
    kind: CodeKind,
    n: usize,
    k: usize,
    d: usize,
    len_bits: usize,
    matrix: Option<&Path>,
) -> Result<CodeSpec, CliError> {
    let parse = |path: &Path| -> Result<ShiftMatrix, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Param(format!("matrix file: {e}")))?;
        ShiftMatrix::parse_text(&text).map_err(|e| CliError::Param(format!("matrix file: {e}")))
    };
    match kind {
        CodeKind::Mbr => {
            let psi = match matrix {
                Some(p) => parse(p)?,
                None => ShiftMatrix::vandermonde(n, d),
            };
            Ok(CodeSpec::Mbr(
                MbrCode::new(n, k, d, len_bits, psi)
                    .map_err(|e| CliError::Param(e.to_string()))?,
            ))
        }
        CodeKind::Msr => {
            if k < 2 || d != 2 * k - 2 {
                return Err(CliError::Param("msr requires d = 2k-2 with k >= 2".into()));
            }
            let alpha = k - 1;
            let (phi, lambda) = match matrix {
                Some(p) => {
                    // the composite [Phi Lambda*Phi]: split and validate
                    let comp = parse(p)?;
                    if comp.rows() != n || comp.cols() != 2 * alpha {
                        return Err(CliError::Param("msr matrix must be n x (2k-2)".into()));
                    }
                    let mut entries = Vec::new();
                    let mut lambda = Vec::new();
                    for i in 1..=n {
                        for j in 1..=alpha {
                            entries.push(comp.exp(i, j));
                        }
                        let lam = comp
                            .exp(i, alpha + 1)
                            .checked_sub(comp.exp(i, 1))
                            .ok_or_else(|| CliError::Param("inconsistent composite".into()))?;
                        for j in 1..=alpha {
                            if comp.exp(i, alpha + j) != lam + comp.exp(i, j) {
                                return Err(CliError::Param(
                                    "matrix is not of the form [Phi Lambda*Phi]".into(),
                                ));
                            }
                        }
                        lambda.push(lam);
                    }
                    let phi = ShiftMatrix::new(n, alpha, entries)
                        .map_err(|e| CliError::Param(e.to_string()))?;
                    (phi, lambda)
                }
                None => (
                    ShiftMatrix::vandermonde(n, alpha),
                    (0..n).map(|i| (i * alpha) as u32).collect(),
                ),
            };
            Ok(CodeSpec::Msr(
                MsrCode::new(n, k, len_bits, phi, lambda)
                    .map_err(|e| CliError::Param(e.to_string()))?,
            ))
        }
    }
}

/// Splits a file's bits into `B` message sequences of `L` bits,
/// zero-padding the tail.
fn file_to_messages(bytes: &[u8], spec: &CodeSpec) -> Result<Vec<BitSeq>, CliError> {
    let b = spec.message_count();
    let l = spec.len_bits();
    let capacity = b * l;
    if bytes.len() * 8 > capacity {
        return Err(CliError::Param(format!(
            "input of {} bytes exceeds the stripe capacity of {} bits (B = {b}, L = {l})",
            bytes.len(),
            capacity
        )));
    }
    let all = BitSeq::from_bytes_le(bytes, bytes.len() * 8).expect("byte-aligned sequence");
    Ok((0..b).map(|m| all.subseq(m * l + 1, (m + 1) * l)).collect())
}

fn messages_to_file(msgs: &[BitSeq], orig_len_bytes: usize) -> Vec<u8> {
    let l = msgs.first().map_or(0, BitSeq::len_bits);
    let scratch = CostLedger::new();
    let mut all = BitSeq::zeros(msgs.len() * l);
    for (m, seq) in msgs.iter().enumerate() {
        all.xor_into(m * l, seq, 1, l, &scratch);
    }
    let mut bytes = all.to_bytes_le();
    bytes.truncate(orig_len_bytes);
    bytes
}

fn cmd_encode(args: EncodeArgs) -> Result<(), CliError> {
    let spec = build_spec(args.code, args.n, args.k, args.d, args.len_bits, args.matrix.as_deref())?;
    let bytes = fs::read(&args.input).map_err(|e| CliError::Param(format!("input: {e}")))?;
    let msgs = file_to_messages(&bytes, &spec)?;
    let shares: Vec<NodeShare> = match &spec {
        CodeSpec::Mbr(code) => {
            let msg = MbrMessage::pack(msgs, code).map_err(|e| CliError::Param(e.to_string()))?;
            (1..=code.n())
                .map(|i| shiftxor_core::mbr::mbr_encode(&msg, code, i))
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Other(e.to_string()))?
        }
        CodeSpec::Msr(code) => {
            let msg = MsrMessage::pack(msgs, code).map_err(|e| CliError::Param(e.to_string()))?;
            (1..=code.n())
                .map(|i| shiftxor_core::msr::msr_encode(&msg, code, i))
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Other(e.to_string()))?
        }
    };
    let mut store = SimStore::create(spec, shares).map_err(CliError::from)?;
    store.manifest_mut().orig_len_bytes = Some(bytes.len() as u64);
    store.manifest_mut().orig_digest = Some(fnv1a64(&bytes));
    store.persist(&args.out)?;
    println!(
        "encoded {} bytes into {} shares under {}",
        bytes.len(),
        store.spec().n(),
        args.out.display()
    );
    Ok(())
}

fn cmd_decode(args: DecodeArgs) -> Result<(), CliError> {
    let store = SimStore::open(&args.dir)?;
    let spec = store.spec().clone();
    let k = spec.k();
    let chosen: Vec<usize> = match args.nodes {
        Some(nodes) => nodes,
        None => {
            let mut alive = store.alive_nodes();
            alive.reverse();
            alive.truncate(k);
            alive
        }
    };
    if chosen.len() < k {
        return Err(CliError::Insufficient(format!(
            "decode needs {k} shares, only {} available",
            chosen.len()
        )));
    }
    if chosen.len() > k {
        return Err(CliError::Param(format!("decode takes exactly {k} nodes")));
    }
    for &node in &chosen {
        if !store.is_alive(node) {
            return Err(CliError::Insufficient(format!("node {node} unavailable")));
        }
    }
    let nodes = NodeSet::new(&chosen).map_err(|e| CliError::Param(e.to_string()))?;
    let ledger = CostLedger::new();
    let start = Instant::now();
    let msgs = match &spec {
        CodeSpec::Mbr(code) => {
            let mut hat = store.mbr_fetch_hat(&nodes, &ledger)?;
            mbr_decode_parallel(&mut hat, &nodes, code, &ledger, args.jobs)
                .map_err(|e| CliError::Other(e.to_string()))?;
            hat.into_message(code)
        }
        CodeSpec::Msr(code) => {
            let shares = store.msr_fetch_shares(&nodes, &ledger)?;
            msr_decode_parallel(&shares, code, &ledger, args.jobs)
                .map_err(|e| CliError::Other(e.to_string()))?
        }
    };
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let orig_len = store.manifest().orig_len_bytes.unwrap_or(0) as usize;
    let bytes = messages_to_file(&msgs, orig_len);
    if let Some(expect) = store.manifest().orig_digest {
        if fnv1a64(&bytes) != expect {
            return Err(CliError::Verification("decoded payload digest mismatch".into()));
        }
    }
    fs::write(&args.out, &bytes)?;
    let report = OpReport::build(
        &spec,
        "decode",
        chosen,
        ledger.snapshot(),
        ReportBounds {
            bandwidth_expected: Some(decode_bandwidth_expected(&spec, nodes.descending())),
            xor_bound: Some(decode_xor_bound(&spec)),
        },
        wall_ms,
    );
    emit(&report_output(&report, args.report), None)?;
    if !report.pass {
        return Err(CliError::Verification("measured costs violate the closed form".into()));
    }
    Ok(())
}

fn cmd_repair(args: RepairArgs) -> Result<(), CliError> {
    let store = SimStore::open(&args.dir)?;
    let spec = store.spec().clone();
    let d = spec.d();
    if args.failed < 1 || args.failed > spec.n() {
        return Err(CliError::Param("failed node out of range".into()));
    }
    if args.helpers.contains(&args.failed) {
        return Err(CliError::Param("helper set contains the failed node".into()));
    }
    if args.helpers.len() != d {
        return Err(CliError::Insufficient(format!(
            "repair needs exactly {d} helpers, got {}",
            args.helpers.len()
        )));
    }
    for &h in &args.helpers {
        if !store.is_alive(h) {
            return Err(CliError::Insufficient(format!("helper {h} unavailable")));
        }
    }
    let helpers = NodeSet::new(&args.helpers).map_err(|e| CliError::Param(e.to_string()))?;
    let ledger = CostLedger::new();
    let start = Instant::now();
    let rhat = store.repair_slices(args.failed, &helpers, &ledger)?;
    let repaired = match &spec {
        CodeSpec::Mbr(code) => mbr_repair(rhat, &helpers, args.failed, code, &ledger),
        CodeSpec::Msr(code) => msr_repair(rhat, &helpers, args.failed, code, &ledger),
    }
    .map_err(|e| CliError::Other(e.to_string()))?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    // exact repair: byte-identical share, same digest as the manifest
    if let Some(expect) = store.manifest().node_digests[args.failed - 1] {
        let got = fnv1a64(&share_to_bytes(&repaired, &spec));
        if got != expect {
            return Err(CliError::Verification(format!(
                "repaired share digest mismatch for node {}",
                args.failed
            )));
        }
    }
    write_share(&repaired, &spec, &args.dir)?;
    let report = OpReport::build(
        &spec,
        "repair",
        args.helpers.clone(),
        ledger.snapshot(),
        ReportBounds {
            bandwidth_expected: Some(repair_bandwidth_expected(&spec, args.failed)),
            xor_bound: Some(repair_xor_bound(&spec, args.failed)),
        },
        wall_ms,
    );
    emit(&report_output(&report, args.report), None)?;
    if !report.pass {
        return Err(CliError::Verification("measured costs violate the closed form".into()));
    }
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<(), CliError> {
    let text =
        fs::read_to_string(&args.input).map_err(|e| CliError::Param(format!("input: {e}")))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| CliError::Param("empty system file".into()))?;
    let mut it = header.split_whitespace();
    let k: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| CliError::Param("header must be 'k L'".into()))?;
    let len: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| CliError::Param("header must be 'k L'".into()))?;
    let matrix_text: Vec<&str> = (&mut lines).take(k).collect();
    if matrix_text.len() != k {
        return Err(CliError::Param("missing exponent rows".into()));
    }
    let exps = ShiftMatrix::parse_text(&matrix_text.join("\n"))
        .map_err(|e| CliError::Param(e.to_string()))?;
    if exps.cols() != k {
        return Err(CliError::Param("exponent matrix must be k x k".into()));
    }
    let mut y = Vec::with_capacity(k);
    for r in 1..=k {
        let line = lines.next().ok_or_else(|| CliError::Param("missing coded rows".into()))?;
        let bits = len + exps.exp(r, k) as usize;
        let seq = BitSeq::from_hex(line.trim(), bits)
            .ok_or_else(|| CliError::Param(format!("row {r}: bad hex for {bits} bits")))?;
        y.push(seq);
    }
    let ledger = CostLedger::new();
    let mut xhat =
        select_subsequences(&y, &exps, len).map_err(|e| CliError::Param(e.to_string()))?;
    {
        let mut rows: Vec<SeqWindow<'_>> = xhat.iter_mut().map(SeqWindow::whole).collect();
        shift_xor_eliminate(&mut rows, &exps, len, &ledger)
            .map_err(|e| CliError::Param(e.to_string()))?;
    }
    let mut out = String::new();
    for seq in &xhat {
        out.push_str(&seq.to_hex());
        out.push('\n');
    }
    emit(&out, args.out.as_deref())?;
    Ok(())
}

#[derive(Serialize)]
struct SolverBench {
    k: usize,
    len_bits: usize,
    eliminate_xor: u64,
    eliminate_bound: u64,
    zigzag_xor: u64,
    pass: bool,
}

#[derive(Serialize)]
struct BenchReport {
    reports: Vec<OpReport>,
    solver: Vec<SolverBench>,
    pass: bool,
}

fn deterministic_bits(len: usize, salt: u64) -> BitSeq {
    let mut state = salt.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ 0x1234_5678_9abc_def0;
    let bits: Vec<bool> = (0..len)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state >> 62 & 1 == 1
        })
        .collect();
    BitSeq::from_bits(&bits)
}

fn bench_store(spec: &CodeSpec) -> Result<SimStore, CliError> {
    let msgs: Vec<BitSeq> = (0..spec.message_count())
        .map(|m| deterministic_bits(spec.len_bits(), m as u64))
        .collect();
    let shares: Vec<NodeShare> = match spec {
        CodeSpec::Mbr(code) => {
            let msg = MbrMessage::pack(msgs, code).map_err(|e| CliError::Other(e.to_string()))?;
            (1..=code.n())
                .map(|i| shiftxor_core::mbr::mbr_encode(&msg, code, i))
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Other(e.to_string()))?
        }
        CodeSpec::Msr(code) => {
            let msg = MsrMessage::pack(msgs, code).map_err(|e| CliError::Other(e.to_string()))?;
            (1..=code.n())
                .map(|i| shiftxor_core::msr::msr_encode(&msg, code, i))
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Other(e.to_string()))?
        }
    };
    SimStore::create(spec.clone(), shares).map_err(CliError::from)
}

fn bench_code(spec: &CodeSpec, jobs: usize, out: &mut Vec<OpReport>) -> Result<(), CliError> {
    let store = bench_store(spec)?;
    let k = spec.k();
    let n = spec.n();
    // decode from the k smallest and the k largest nodes
    for chosen in [(1..=k).collect::<Vec<_>>(), (n - k + 1..=n).collect::<Vec<_>>()] {
        let nodes = NodeSet::new(&chosen).map_err(|e| CliError::Other(e.to_string()))?;
        let ledger = CostLedger::new();
        let start = Instant::now();
        match spec {
            CodeSpec::Mbr(code) => {
                let mut hat = store.mbr_fetch_hat(&nodes, &ledger)?;
                mbr_decode_parallel(&mut hat, &nodes, code, &ledger, jobs)
                    .map_err(|e| CliError::Other(e.to_string()))?;
            }
            CodeSpec::Msr(code) => {
                let shares = store.msr_fetch_shares(&nodes, &ledger)?;
                msr_decode_parallel(&shares, code, &ledger, jobs)
                    .map_err(|e| CliError::Other(e.to_string()))?;
            }
        }
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        out.push(OpReport::build(
            spec,
            "decode",
            chosen,
            ledger.snapshot(),
            ReportBounds {
                bandwidth_expected: Some(decode_bandwidth_expected(spec, nodes.descending())),
                xor_bound: Some(decode_xor_bound(spec)),
            },
            wall_ms,
        ));
    }
    // repair every node from the d nodes after it (cyclically)
    for failed in [1, n / 2, n] {
        let helpers: Vec<usize> =
            (1..=n).filter(|&i| i != failed).take(spec.d()).collect();
        let set = NodeSet::new(&helpers).map_err(|e| CliError::Other(e.to_string()))?;
        let ledger = CostLedger::new();
        let start = Instant::now();
        let rhat = store.repair_slices(failed, &set, &ledger)?;
        let repaired = match spec {
            CodeSpec::Mbr(code) => mbr_repair(rhat, &set, failed, code, &ledger),
            CodeSpec::Msr(code) => msr_repair(rhat, &set, failed, code, &ledger),
        }
        .map_err(|e| CliError::Other(e.to_string()))?;
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        // exact repair behind the measurements
        let expect = store.manifest().node_digests[failed - 1].unwrap();
        if fnv1a64(&share_to_bytes(&repaired, spec)) != expect {
            return Err(CliError::Verification(format!("repair of node {failed} not exact")));
        }
        out.push(OpReport::build(
            spec,
            "repair",
            helpers,
            ledger.snapshot(),
            ReportBounds {
                bandwidth_expected: Some(repair_bandwidth_expected(spec, failed)),
                xor_bound: Some(repair_xor_bound(spec, failed)),
            },
            wall_ms,
        ));
    }
    Ok(())
}

fn bench_solver(len: usize, out: &mut Vec<SolverBench>) {
    for k in 2..=6 {
        let exps = ShiftMatrix::vandermonde(k, k);
        let x: Vec<BitSeq> = (0..k).map(|i| deterministic_bits(len, 1000 + i as u64)).collect();
        let y = encode_system(&x, &exps);
        let elim_ledger = CostLedger::new();
        let mut xhat = select_subsequences(&y, &exps, len).expect("selection");
        {
            let mut rows: Vec<SeqWindow<'_>> = xhat.iter_mut().map(SeqWindow::whole).collect();
            shift_xor_eliminate(&mut rows, &exps, len, &elim_ledger).expect("eliminate");
        }
        assert_eq!(xhat, x, "bench solve disagrees with the encoded message");
        let zig_ledger = CostLedger::new();
        let zig = zigzag_solve(&y, &exps, len, &zig_ledger).expect("zigzag");
        assert_eq!(zig, x);
        let eliminate_xor = elim_ledger.snapshot().xor_bit_ops;
        let bound = (k * (k - 1) * len) as u64;
        out.push(SolverBench {
            k,
            len_bits: len,
            eliminate_xor,
            eliminate_bound: bound,
            zigzag_xor: zig_ledger.snapshot().xor_bit_ops,
            pass: eliminate_xor < bound,
        });
    }
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let mut reports = Vec::new();
    let grid: Vec<CodeSpec> = {
        let mut specs = Vec::new();
        if args.code != Some(CodeKind::Msr) {
            specs.push(build_spec(CodeKind::Mbr, 6, 3, 4, args.len_bits, None)?);
            specs.push(build_spec(CodeKind::Mbr, 8, 4, 6, args.len_bits, None)?);
        }
        if args.code != Some(CodeKind::Mbr) {
            specs.push(build_spec(CodeKind::Msr, 6, 3, 4, args.len_bits, None)?);
            specs.push(build_spec(CodeKind::Msr, 8, 4, 6, args.len_bits, None)?);
        }
        specs
    };
    for spec in &grid {
        bench_code(spec, args.jobs, &mut reports)?;
    }
    let mut solver = Vec::new();
    bench_solver(args.len_bits, &mut solver);

    let pass = reports.iter().all(|r| r.pass) && solver.iter().all(|s| s.pass);
    let bench = BenchReport { reports, solver, pass };
    let text = match args.report {
        ReportFormat::Json => serde_json::to_string_pretty(&bench).expect("bench serialization"),
        ReportFormat::Text => {
            let mut s = String::new();
            for r in &bench.reports {
                s.push_str(&r.to_text());
            }
            for sb in &bench.solver {
                s.push_str(&format!(
                    "solve k={} L={}: eliminate {} (bound {}), zigzag {}  {}\n",
                    sb.k,
                    sb.len_bits,
                    sb.eliminate_xor,
                    sb.eliminate_bound,
                    sb.zigzag_xor,
                    if sb.pass { "PASS" } else { "FAIL" }
                ));
            }
            s.push_str(if bench.pass { "ALL PASS\n" } else { "FAIL\n" });
            s
        }
    };
    emit(&text, args.out.as_deref())?;
    if !bench.pass {
        return Err(CliError::Verification("benchmark bounds violated".into()));
    }
    Ok(())
}

fn report_output(report: &OpReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Text => report.to_text(),
    }
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    print!("{text}");
    if !text.ends_with('\n') {
        println!();
    }
    if let Some(p) = path {
        fs::write(p, text)?;
    }
    Ok(())
}
