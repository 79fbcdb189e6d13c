//! The `SXOR` share file format and the plain-text store manifest.
//!
//! Share file layout, byte-exact across platforms:
//!
//! ```text
//! magic  "SXOR"                       4 bytes
//! version u16 LE                      = 1
//! kind    u8                          0 = mbr, 1 = msr
//! n, k, d, L                          u32 LE each
//! exponent matrix                     u32 LE row-major
//!                                     (mbr: psi, n*d; msr: phi, n*(k-1))
//! lambda (msr only)                   n x u32 LE
//! node index                          u32 LE
//! alpha sequences                     each: len_bits u64 LE, then
//!                                     ceil(len/8) bytes, LSB-first per byte
//! ```

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use shiftxor_core::mbr::MbrCode;
use shiftxor_core::msr::MsrCode;
use shiftxor_core::{BitSeq, NodeShare, ShiftMatrix};

use crate::StoreError;

const MAGIC: &[u8; 4] = b"SXOR";
const VERSION: u16 = 1;

/// The code family and full parameter set a store is built over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeSpec {
    Mbr(MbrCode),
    Msr(MsrCode),
}

impl CodeSpec {
    pub fn kind_str(&self) -> &'static str {
        match self {
            CodeSpec::Mbr(_) => "mbr",
            CodeSpec::Msr(_) => "msr",
        }
    }

    pub fn n(&self) -> usize {
        match self {
            CodeSpec::Mbr(c) => c.n(),
            CodeSpec::Msr(c) => c.n(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            CodeSpec::Mbr(c) => c.k(),
            CodeSpec::Msr(c) => c.k(),
        }
    }

    pub fn d(&self) -> usize {
        match self {
            CodeSpec::Mbr(c) => c.d(),
            CodeSpec::Msr(c) => c.d(),
        }
    }

    /// Sequences stored per node.
    pub fn alpha(&self) -> usize {
        match self {
            CodeSpec::Mbr(c) => c.d(),
            CodeSpec::Msr(c) => c.alpha(),
        }
    }

    pub fn len_bits(&self) -> usize {
        match self {
            CodeSpec::Mbr(c) => c.len_bits(),
            CodeSpec::Msr(c) => c.len_bits(),
        }
    }

    pub fn message_count(&self) -> usize {
        match self {
            CodeSpec::Mbr(c) => c.message_count(),
            CodeSpec::Msr(c) => c.message_count(),
        }
    }

    pub fn share_seq_len(&self, node: usize) -> usize {
        match self {
            CodeSpec::Mbr(c) => c.share_seq_len(node),
            CodeSpec::Msr(c) => c.share_seq_len(node),
        }
    }
}

/// 64-bit FNV-1a over a byte string; the store's content digest.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn share_file_name(node: usize) -> String {
    format!("node_{node:02}.sxor")
}

fn push_u32(buf: &mut Vec<u8>, v: u32) {
    buf.extend_from_slice(&v.to_le_bytes());
}

/// Serializes a share with its code parameters to the pinned byte layout.
pub fn share_to_bytes(share: &NodeShare, spec: &CodeSpec) -> Vec<u8> {
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.push(match spec {
        CodeSpec::Mbr(_) => 0,
        CodeSpec::Msr(_) => 1,
    });
    push_u32(&mut buf, spec.n() as u32);
    push_u32(&mut buf, spec.k() as u32);
    push_u32(&mut buf, spec.d() as u32);
    push_u32(&mut buf, spec.len_bits() as u32);
    match spec {
        CodeSpec::Mbr(c) => {
            for i in 1..=c.n() {
                for j in 1..=c.d() {
                    push_u32(&mut buf, c.psi().exp(i, j));
                }
            }
        }
        CodeSpec::Msr(c) => {
            for i in 1..=c.n() {
                for j in 1..=c.alpha() {
                    push_u32(&mut buf, c.phi().exp(i, j));
                }
            }
            for &l in c.lambdas() {
                push_u32(&mut buf, l);
            }
        }
    }
    push_u32(&mut buf, share.node as u32);
    for seq in &share.seqs {
        buf.extend_from_slice(&(seq.len_bits() as u64).to_le_bytes());
        buf.extend_from_slice(&seq.to_bytes_le());
    }
    buf
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], StoreError> {
        if self.pos + n > self.bytes.len() {
            return Err(StoreError::Format("truncated file"));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16, StoreError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, StoreError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, StoreError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Parses the byte layout back into code parameters and a share.
pub fn share_from_bytes(bytes: &[u8]) -> Result<(CodeSpec, NodeShare), StoreError> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(StoreError::Format("bad magic"));
    }
    if r.u16()? != VERSION {
        return Err(StoreError::Format("unsupported version"));
    }
    let kind = r.take(1)?[0];
    let n = r.u32()? as usize;
    let k = r.u32()? as usize;
    let d = r.u32()? as usize;
    let len_bits = r.u32()? as usize;
    let spec = match kind {
        0 => {
            let mut entries = Vec::with_capacity(n * d);
            for _ in 0..n * d {
                entries.push(r.u32()?);
            }
            let psi = ShiftMatrix::new(n, d, entries).map_err(|_| StoreError::Format("matrix"))?;
            CodeSpec::Mbr(
                MbrCode::new(n, k, d, len_bits, psi).map_err(|_| StoreError::Format("params"))?,
            )
        }
        1 => {
            let alpha = k.checked_sub(1).ok_or(StoreError::Format("params"))?;
            let mut entries = Vec::with_capacity(n * alpha);
            for _ in 0..n * alpha {
                entries.push(r.u32()?);
            }
            let phi =
                ShiftMatrix::new(n, alpha, entries).map_err(|_| StoreError::Format("matrix"))?;
            let mut lambda = Vec::with_capacity(n);
            for _ in 0..n {
                lambda.push(r.u32()?);
            }
            CodeSpec::Msr(
                MsrCode::new(n, k, len_bits, phi, lambda)
                    .map_err(|_| StoreError::Format("params"))?,
            )
        }
        _ => return Err(StoreError::Format("unknown code kind")),
    };
    let node = r.u32()? as usize;
    if node < 1 || node > n {
        return Err(StoreError::Format("node index"));
    }
    let expect_len = spec.share_seq_len(node);
    let mut seqs = Vec::with_capacity(spec.alpha());
    for _ in 0..spec.alpha() {
        let len = r.u64()? as usize;
        if len != expect_len {
            return Err(StoreError::Format("sequence length"));
        }
        let raw = r.take(len.div_ceil(8))?;
        let seq =
            BitSeq::from_bytes_le(raw, len).ok_or(StoreError::Format("non-canonical padding"))?;
        seqs.push(seq);
    }
    if r.pos != bytes.len() {
        return Err(StoreError::Format("trailing bytes"));
    }
    Ok((spec, NodeShare::new(node, seqs)))
}

/// Writes a share file into `dir`; returns the path.
pub fn write_share(share: &NodeShare, spec: &CodeSpec, dir: &Path) -> Result<PathBuf, StoreError> {
    let path = dir.join(share_file_name(share.node));
    let mut f = fs::File::create(&path)?;
    f.write_all(&share_to_bytes(share, spec))?;
    Ok(path)
}

/// Reads a share file.
pub fn read_share(path: &Path) -> Result<(CodeSpec, NodeShare), StoreError> {
    let bytes = fs::read(path)?;
    share_from_bytes(&bytes)
}

/// The store manifest: code parameters, original payload bookkeeping and
/// per-node share-file digests, as a flat `key=value` text file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub spec: CodeSpec,
    pub orig_len_bytes: Option<u64>,
    pub orig_digest: Option<u64>,
    /// FNV-1a digest of each node's share file, indexed `node - 1`.
    pub node_digests: Vec<Option<u64>>,
}

pub const MANIFEST_FILE: &str = "manifest.txt";

impl Manifest {
    pub fn new(spec: CodeSpec) -> Self {
        let n = spec.n();
        Manifest { spec, orig_len_bytes: None, orig_digest: None, node_digests: vec![None; n] }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("kind={}\n", self.spec.kind_str()));
        s.push_str(&format!("n={}\n", self.spec.n()));
        s.push_str(&format!("k={}\n", self.spec.k()));
        s.push_str(&format!("d={}\n", self.spec.d()));
        s.push_str(&format!("len_bits={}\n", self.spec.len_bits()));
        let (matrix, lambda) = match &self.spec {
            CodeSpec::Mbr(c) => (c.psi().to_text(), None),
            CodeSpec::Msr(c) => (c.phi().to_text(), Some(c.lambdas())),
        };
        s.push_str(&format!("matrix={}\n", matrix.trim_end().replace('\n', ";")));
        if let Some(lambda) = lambda {
            let joined: Vec<String> = lambda.iter().map(u32::to_string).collect();
            s.push_str(&format!("lambda={}\n", joined.join(" ")));
        }
        if let Some(len) = self.orig_len_bytes {
            s.push_str(&format!("orig_len_bytes={len}\n"));
        }
        if let Some(d) = self.orig_digest {
            s.push_str(&format!("orig_digest={d:016x}\n"));
        }
        for (ix, digest) in self.node_digests.iter().enumerate() {
            if let Some(d) = digest {
                s.push_str(&format!("digest_node_{}={d:016x}\n", ix + 1));
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, StoreError> {
        let mut kv = std::collections::BTreeMap::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| StoreError::Manifest(line.to_string()))?;
            kv.insert(key.to_string(), value.to_string());
        }
        let get = |key: &str| {
            kv.get(key).cloned().ok_or_else(|| StoreError::Manifest(format!("missing {key}")))
        };
        let parse_usize = |key: &str| -> Result<usize, StoreError> {
            get(key)?.parse().map_err(|_| StoreError::Manifest(format!("bad {key}")))
        };
        let kind = get("kind")?;
        let n = parse_usize("n")?;
        let k = parse_usize("k")?;
        let d = parse_usize("d")?;
        let len_bits = parse_usize("len_bits")?;
        let matrix_text = get("matrix")?.replace(';', "\n");
        let matrix = ShiftMatrix::parse_text(&matrix_text)
            .map_err(|e| StoreError::Manifest(format!("matrix: {e}")))?;
        let spec = match kind.as_str() {
            "mbr" => CodeSpec::Mbr(
                MbrCode::new(n, k, d, len_bits, matrix)
                    .map_err(|e| StoreError::Manifest(format!("params: {e}")))?,
            ),
            "msr" => {
                let lambda: Result<Vec<u32>, _> =
                    get("lambda")?.split_whitespace().map(str::parse).collect();
                let lambda = lambda.map_err(|_| StoreError::Manifest("bad lambda".into()))?;
                CodeSpec::Msr(
                    MsrCode::new(n, k, len_bits, matrix, lambda)
                        .map_err(|e| StoreError::Manifest(format!("params: {e}")))?,
                )
            }
            other => return Err(StoreError::Manifest(format!("unknown kind {other}"))),
        };
        let mut manifest = Manifest::new(spec);
        if let Some(v) = kv.get("orig_len_bytes") {
            manifest.orig_len_bytes =
                Some(v.parse().map_err(|_| StoreError::Manifest("bad orig_len_bytes".into()))?);
        }
        if let Some(v) = kv.get("orig_digest") {
            manifest.orig_digest = Some(
                u64::from_str_radix(v, 16)
                    .map_err(|_| StoreError::Manifest("bad orig_digest".into()))?,
            );
        }
        for node in 1..=n {
            if let Some(v) = kv.get(&format!("digest_node_{node}")) {
                manifest.node_digests[node - 1] = Some(
                    u64::from_str_radix(v, 16)
                        .map_err(|_| StoreError::Manifest("bad digest".into()))?,
                );
            }
        }
        Ok(manifest)
    }

    pub fn write(&self, dir: &Path) -> Result<(), StoreError> {
        fs::write(dir.join(MANIFEST_FILE), self.to_text())?;
        Ok(())
    }

    pub fn read(dir: &Path) -> Result<Self, StoreError> {
        let text = fs::read_to_string(dir.join(MANIFEST_FILE))?;
        Manifest::from_text(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use shiftxor_core::mbr::{mbr_encode, MbrMessage};

    fn sample() -> (CodeSpec, NodeShare) {
        let code = MbrCode::vandermonde(6, 3, 4, 40).unwrap();
        let msgs: Vec<BitSeq> = (0..9)
            .map(|m| {
                let bits: Vec<bool> = (0..40).map(|b| (b * 7 + m) % 3 == 0).collect();
                BitSeq::from_bits(&bits)
            })
            .collect();
        let msg = MbrMessage::pack(msgs, &code).unwrap();
        let share = mbr_encode(&msg, &code, 2).unwrap();
        (CodeSpec::Mbr(code), share)
    }

    #[test]
    fn share_bytes_round_trip_and_digest_is_stable() {
        let (spec, share) = sample();
        let bytes = share_to_bytes(&share, &spec);
        let again = share_to_bytes(&share, &spec);
        assert_eq!(fnv1a64(&bytes), fnv1a64(&again));
        let (spec2, share2) = share_from_bytes(&bytes).unwrap();
        assert_eq!(spec2, spec);
        assert_eq!(share2, share);
    }

    #[test]
    fn mbr_payload_size_matches_layout_formula() {
        let (spec, share) = sample();
        let bytes = share_to_bytes(&share, &spec);
        // header: magic 4 + version 2 + kind 1 + 4*u32 + n*d*u32 + node u32
        let header = 4 + 2 + 1 + 16 + 6 * 4 * 4 + 4;
        // node 2: 4 sequences of (8 + ceil((L+3)/8)) bytes, L = 40
        let payload = 4 * (8 + (40usize + 3).div_ceil(8));
        assert_eq!(bytes.len(), header + payload);
    }

    #[test]
    fn corrupted_share_files_are_rejected() {
        let (spec, share) = sample();
        let bytes = share_to_bytes(&share, &spec);
        assert!(matches!(share_from_bytes(&bytes[..10]), Err(StoreError::Format(_))));
        let mut bad_magic = bytes.clone();
        bad_magic[0] = b'X';
        assert!(share_from_bytes(&bad_magic).is_err());
        let mut trailing = bytes.clone();
        trailing.push(0);
        assert!(share_from_bytes(&trailing).is_err());
    }

    #[test]
    fn manifest_round_trips_for_both_kinds() {
        let (spec, _) = sample();
        let mut m = Manifest::new(spec);
        m.orig_len_bytes = Some(123);
        m.orig_digest = Some(0xdead_beef);
        m.node_digests[3] = Some(42);
        assert_eq!(Manifest::from_text(&m.to_text()).unwrap(), m);

        let msr = MsrCode::vandermonde(6, 3, 16).unwrap();
        let m2 = Manifest::new(CodeSpec::Msr(msr));
        assert_eq!(Manifest::from_text(&m2.to_text()).unwrap(), m2);
    }
}
