//! The simulated distributed store: per-node shares, availability, and
//! metered subrange retrieval.

use std::path::Path;

use shiftxor_core::mbr::{mbr_extract_for_decode, mbr_repair_helper, MbrHat};
use shiftxor_core::msr::msr_repair_helper;
use shiftxor_core::{BitSeq, CostLedger, NodeSet, NodeShare};

use crate::format::{self, CodeSpec, Manifest};
use crate::StoreError;

/// An in-memory store of `n` node shares with failure injection. All
/// retrieval goes through metered fetches; decode and repair paths may
/// never read more bits than the ledger shows.
pub struct SimStore {
    manifest: Manifest,
    shares: Vec<Option<NodeShare>>,
    alive: Vec<bool>,
}

impl SimStore {
    /// Builds a store holding the given shares (one per node).
    pub fn create(spec: CodeSpec, shares: Vec<NodeShare>) -> Result<Self, StoreError> {
        let n = spec.n();
        if shares.len() != n {
            return Err(StoreError::Format("expected one share per node"));
        }
        let mut manifest = Manifest::new(spec.clone());
        let mut slots: Vec<Option<NodeShare>> = (0..n).map(|_| None).collect();
        for share in shares {
            if share.node < 1 || share.node > n {
                return Err(StoreError::NodeOutOfRange);
            }
            let node = share.node;
            manifest.node_digests[node - 1] =
                Some(format::fnv1a64(&format::share_to_bytes(&share, &spec)));
            slots[node - 1] = Some(share);
        }
        if slots.iter().any(Option::is_none) {
            return Err(StoreError::Format("duplicate or missing node"));
        }
        Ok(SimStore { manifest, shares: slots, alive: vec![true; n] })
    }

    /// Loads a store from a directory holding a manifest and share files.
    /// Nodes without a share file are dead.
    pub fn open(dir: &Path) -> Result<Self, StoreError> {
        let manifest = Manifest::read(dir)?;
        let n = manifest.spec.n();
        let mut shares: Vec<Option<NodeShare>> = (0..n).map(|_| None).collect();
        let mut alive = vec![false; n];
        for node in 1..=n {
            let path = dir.join(format::share_file_name(node));
            if path.exists() {
                let (spec, share) = format::read_share(&path)?;
                if spec != manifest.spec || share.node != node {
                    return Err(StoreError::Format("share file disagrees with manifest"));
                }
                shares[node - 1] = Some(share);
                alive[node - 1] = true;
            }
        }
        Ok(SimStore { manifest, shares, alive })
    }

    /// Writes the manifest and every live share into `dir`.
    pub fn persist(&self, dir: &Path) -> Result<(), StoreError> {
        std::fs::create_dir_all(dir)?;
        self.manifest.write(dir)?;
        for share in self.shares.iter().flatten() {
            format::write_share(share, &self.manifest.spec, dir)?;
        }
        Ok(())
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.manifest.spec
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn manifest_mut(&mut self) -> &mut Manifest {
        &mut self.manifest
    }

    pub fn is_alive(&self, node: usize) -> bool {
        node >= 1 && node <= self.alive.len() && self.alive[node - 1] && self.shares[node - 1].is_some()
    }

    pub fn alive_nodes(&self) -> Vec<usize> {
        (1..=self.alive.len()).filter(|&i| self.is_alive(i)).collect()
    }

    fn share_ref(&self, node: usize) -> Result<&NodeShare, StoreError> {
        if node < 1 || node > self.alive.len() {
            return Err(StoreError::NodeOutOfRange);
        }
        if !self.is_alive(node) {
            return Err(StoreError::NodeUnavailable(node));
        }
        Ok(self.shares[node - 1].as_ref().expect("alive nodes hold shares"))
    }

    /// Metered fetch of stored positions `from..=to` (1-based) of sequence
    /// `seq` at `node`. Over-fetching past the stored length is an error,
    /// never silently truncated.
    pub fn fetch_subrange(
        &self,
        node: usize,
        seq: usize,
        from: usize,
        to: usize,
        ledger: &CostLedger,
    ) -> Result<BitSeq, StoreError> {
        let share = self.share_ref(node)?;
        if seq < 1 || seq > share.seqs.len() {
            return Err(StoreError::RangeOutOfBounds);
        }
        let stored = &share.seqs[seq - 1];
        if from < 1 || to < from || to > stored.len_bits() {
            return Err(StoreError::RangeOutOfBounds);
        }
        ledger.add_transferred_bits((to - from + 1) as u64);
        Ok(stored.subseq(from, to))
    }

    /// Metered fetch of a node's entire share.
    pub fn fetch_share(&self, node: usize, ledger: &CostLedger) -> Result<NodeShare, StoreError> {
        let share = self.share_ref(node)?;
        ledger.add_transferred_bits(share.total_bits() as u64);
        Ok(share.clone())
    }

    /// Marks a node failed. Failing a failed node is an error.
    pub fn fail_node(&mut self, node: usize) -> Result<(), StoreError> {
        if node < 1 || node > self.alive.len() {
            return Err(StoreError::NodeOutOfRange);
        }
        if !self.alive[node - 1] {
            return Err(StoreError::AlreadyFailed(node));
        }
        self.alive[node - 1] = false;
        self.shares[node - 1] = None;
        Ok(())
    }

    /// Installs a repaired share into a failed slot, verifying its digest
    /// against the manifest when one is recorded.
    pub fn heal_node(&mut self, node: usize, share: NodeShare) -> Result<(), StoreError> {
        if node < 1 || node > self.alive.len() {
            return Err(StoreError::NodeOutOfRange);
        }
        if self.alive[node - 1] {
            return Err(StoreError::NodeAlive(node));
        }
        if share.node != node {
            return Err(StoreError::Format("share node mismatch"));
        }
        if let Some(expect) = self.manifest.node_digests[node - 1] {
            let got = format::fnv1a64(&format::share_to_bytes(&share, &self.manifest.spec));
            if got != expect {
                return Err(StoreError::DigestMismatch(node));
            }
        }
        self.shares[node - 1] = Some(share);
        self.alive[node - 1] = true;
        Ok(())
    }

    /// Metered retrieval of the MBR decode collection from `k` nodes: rank
    /// `v` transmits the `L`-bit subsequences `m-hat_{v,u}`, `u = v..=d`.
    pub fn mbr_fetch_hat(
        &self,
        nodes: &NodeSet,
        ledger: &CostLedger,
    ) -> Result<MbrHat, StoreError> {
        let CodeSpec::Mbr(code) = &self.manifest.spec else {
            return Err(StoreError::Format("store does not hold an mbr code"));
        };
        let (k, d, len) = (code.k(), code.d(), code.len_bits());
        if nodes.len() != k {
            return Err(StoreError::Code(shiftxor_core::share::CodeError::BadNodeSet(
                "decode needs exactly k nodes",
            )));
        }
        let mut cols: Vec<Vec<BitSeq>> = (1..=d).map(|u| Vec::with_capacity(u.min(k))).collect();
        for v in 1..=k {
            let node = nodes.node_at_rank(v);
            let t = code.psi().exp(node, v) as usize;
            for u in v..=d {
                let slice = self.fetch_subrange(node, u, t + 1, t + len, ledger)?;
                cols[u - 1].push(slice);
            }
        }
        Ok(MbrHat::from_cols(cols, code)?)
    }

    /// Metered retrieval of `k` full shares for MSR decoding.
    pub fn msr_fetch_shares(
        &self,
        nodes: &NodeSet,
        ledger: &CostLedger,
    ) -> Result<Vec<NodeShare>, StoreError> {
        let CodeSpec::Msr(_) = &self.manifest.spec else {
            return Err(StoreError::Format("store does not hold an msr code"));
        };
        nodes.descending().iter().map(|&node| self.fetch_share(node, ledger)).collect()
    }

    /// Runs the repair-helper computation at each helper (XORs metered) and
    /// meters the transfer of every repair subsequence.
    pub fn repair_slices(
        &self,
        failed: usize,
        helpers: &NodeSet,
        ledger: &CostLedger,
    ) -> Result<Vec<BitSeq>, StoreError> {
        let mut out = Vec::with_capacity(helpers.len());
        for v in 1..=helpers.len() {
            let helper = helpers.node_at_rank(v);
            let share = self.share_ref(helper)?;
            let slice = match &self.manifest.spec {
                CodeSpec::Mbr(code) => mbr_repair_helper(share, failed, v, code, ledger)?,
                CodeSpec::Msr(code) => msr_repair_helper(share, failed, v, code, ledger)?,
            };
            ledger.add_transferred_bits(slice.len_bits() as u64);
            out.push(slice);
        }
        Ok(out)
    }

    /// Unmetered extraction used by tests that need the same collection the
    /// metered path produces.
    pub fn mbr_extract_unmetered(
        &self,
        nodes: &NodeSet,
    ) -> Result<Vec<Vec<BitSeq>>, StoreError> {
        let CodeSpec::Mbr(code) = &self.manifest.spec else {
            return Err(StoreError::Format("store does not hold an mbr code"));
        };
        let mut per_rank = Vec::new();
        for v in 1..=nodes.len() {
            let share = self.share_ref(nodes.node_at_rank(v))?;
            per_rank.push(mbr_extract_for_decode(share, v, code)?);
        }
        Ok(per_rank)
    }
}
