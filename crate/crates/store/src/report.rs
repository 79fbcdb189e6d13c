//! Measurement reports for decode, repair and benchmark runs.

use serde::Serialize;
use shiftxor_core::LedgerSnapshot;

use crate::format::CodeSpec;

/// One measured operation with its closed-form expectations.
#[derive(Debug, Clone, Serialize)]
pub struct OpReport {
    pub params: ReportParams,
    pub bandwidth_bits: u64,
    pub xor_bit_ops: u64,
    pub xor_word_ops: u64,
    pub integer_ops: u64,
    pub aux_seq_bytes_peak: u64,
    pub bounds: ReportBounds,
    pub pass: bool,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportParams {
    pub code: String,
    pub op: String,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub len_bits: usize,
    pub nodes: Vec<usize>,
}

/// Closed-form expectations: exact bandwidth, and an XOR upper bound when
/// the operation has one.
#[derive(Debug, Clone, Serialize)]
pub struct ReportBounds {
    pub bandwidth_expected: Option<u64>,
    pub xor_bound: Option<u64>,
}

/// Constant folded over the `O(n k^3 d)` / `O(n d^3)` tails of the MSR
/// bounds when checking measured counts.
pub const MSR_BOUND_CONSTANT: u64 = 64;

impl OpReport {
    pub fn build(
        spec: &CodeSpec,
        op: &str,
        nodes: Vec<usize>,
        snap: LedgerSnapshot,
        bounds: ReportBounds,
        wall_ms: f64,
    ) -> Self {
        let pass = bounds.bandwidth_expected.is_none_or(|b| b == snap.bits_transferred)
            && bounds.xor_bound.is_none_or(|b| snap.xor_bit_ops <= b);
        OpReport {
            params: ReportParams {
                code: spec.kind_str().to_string(),
                op: op.to_string(),
                n: spec.n(),
                k: spec.k(),
                d: spec.d(),
                len_bits: spec.len_bits(),
                nodes,
            },
            bandwidth_bits: snap.bits_transferred,
            xor_bit_ops: snap.xor_bit_ops,
            xor_word_ops: snap.xor_word_ops,
            integer_ops: snap.integer_ops,
            aux_seq_bytes_peak: snap.aux_seq_bytes_peak,
            bounds,
            pass,
        wall_ms,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "{} {} n={} k={} d={} L={} nodes={:?}\n",
            self.params.code,
            self.params.op,
            self.params.n,
            self.params.k,
            self.params.d,
            self.params.len_bits,
            self.params.nodes
        ));
        s.push_str(&format!("  bandwidth_bits      {}", self.bandwidth_bits));
        if let Some(b) = self.bounds.bandwidth_expected {
            s.push_str(&format!("  (expected {b})"));
        }
        s.push('\n');
        s.push_str(&format!("  xor_bit_ops         {}", self.xor_bit_ops));
        if let Some(b) = self.bounds.xor_bound {
            s.push_str(&format!("  (bound {b})"));
        }
        s.push('\n');
        s.push_str(&format!("  xor_word_ops        {}\n", self.xor_word_ops));
        s.push_str(&format!("  integer_ops         {}\n", self.integer_ops));
        s.push_str(&format!("  aux_seq_bytes_peak  {}\n", self.aux_seq_bytes_peak));
        s.push_str(&format!("  wall_ms             {:.3}\n", self.wall_ms));
        s.push_str(&format!("  {}\n", if self.pass { "PASS" } else { "FAIL" }));
        s
    }
}

/// Exact decode bandwidth. MBR retrieves `B*L` bits; MSR retrieves the
/// chosen nodes' full shares.
pub fn decode_bandwidth_expected(spec: &CodeSpec, nodes: &[usize]) -> u64 {
    match spec {
        CodeSpec::Mbr(c) => (c.message_count() * c.len_bits()) as u64,
        CodeSpec::Msr(c) => {
            nodes.iter().map(|&i| (c.alpha() * c.share_seq_len(i)) as u64).sum()
        }
    }
}

/// XOR upper bound for a decode.
pub fn decode_xor_bound(spec: &CodeSpec) -> u64 {
    match spec {
        CodeSpec::Mbr(c) => {
            // T1 + T2 < ((3/2 d - k)k - (d-k+1)/2) k L
            let (k, d, l) = (c.k() as f64, c.d() as f64, c.len_bits() as f64);
            (((1.5 * d - k) * k - (d - k + 1.0) / 2.0) * k * l).ceil() as u64
        }
        CodeSpec::Msr(c) => {
            // (k-1)^2 (5k-8) L + C n k^3 d
            let (n, k, d, l) =
                (c.n() as u64, c.k() as u64, c.d() as u64, c.len_bits() as u64);
            (k - 1) * (k - 1) * (5 * k - 8) * l + MSR_BOUND_CONSTANT * n * k * k * k * d
        }
    }
}

/// Exact repair bandwidth for a failed node.
pub fn repair_bandwidth_expected(spec: &CodeSpec, failed: usize) -> u64 {
    match spec {
        CodeSpec::Mbr(c) => (c.d() * c.share_seq_len(failed)) as u64,
        CodeSpec::Msr(c) => (c.d() * c.repair_len(failed)) as u64,
    }
}

/// XOR upper bound for a repair, helpers plus repairer.
pub fn repair_xor_bound(spec: &CodeSpec, failed: usize) -> u64 {
    match spec {
        CodeSpec::Mbr(c) => (2 * c.d() * (c.d() - 1) * c.share_seq_len(failed)) as u64,
        CodeSpec::Msr(c) => {
            // 3/2 (d-1) d L + C n d^3
            let (n, d, l) = (c.n() as u64, c.d() as u64, c.len_bits() as u64);
            (3 * (d - 1) * d * l).div_ceil(2) + MSR_BOUND_CONSTANT * n * d * d * d
        }
    }
}
