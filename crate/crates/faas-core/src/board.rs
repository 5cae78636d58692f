//! The public fairness board: an auditor-append-only, hash-chained log of
//! group parameters, key announcements, audit tables and reports.
//!
//! Persistence is a single append-only JSONL file plus a seq->offset index
//! sidecar. Every read goes back to the file, so offline tampering is visible
//! to the next request; appends are serialized behind a lock and an entry is
//! flushed before it becomes observable. Entry k stores the hash of entry
//! k-1, so any edit, reorder or truncation breaks the chain.

pub mod http;

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::auditor::{
    compute_metrics, verify_audit_table_with_counts, MetricMode, TallyPolicy,
    FAIRNESS_REPORT_FORMAT, VERIFICATION_REPORT_FORMAT,
};
use crate::codec::{self, sha256_hex, CodecError};
use crate::group::{setup_group, transcript_digest};
use crate::prover::{FairnessAuditTable, FairnessAuditTableDoc, AUDIT_TABLE_FORMAT};

const ENTRY_TAG: &str = "faas/board-entry/v1";
const GENESIS_TAG: &str = "faas/board-genesis/v1";
const RECORDS_FILE: &str = "board.jsonl";
const INDEX_FILE: &str = "board.idx";

#[derive(Debug, thiserror::Error)]
pub enum BoardError {
    #[error("credential rejected")]
    BadCredential,
    #[error("append gate rejected the payload: {0}")]
    GateRejected(String),
    #[error("entry {0} not found")]
    NotFound(u64),
    #[error("board chain invalid: {0}")]
    ChainInvalid(String),
    #[error("board storage error: {0}")]
    Storage(String),
    #[error("http error: {0}")]
    Http(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    GroupParams,
    PublicKeyAnnouncement,
    AuditTable,
    VerificationReport,
    FairnessReport,
}

impl EntryKind {
    pub fn id(&self) -> &'static str {
        match self {
            EntryKind::GroupParams => "group_params",
            EntryKind::PublicKeyAnnouncement => "public_key_announcement",
            EntryKind::AuditTable => "audit_table",
            EntryKind::VerificationReport => "verification_report",
            EntryKind::FairnessReport => "fairness_report",
        }
    }
}

/// One sealed board record. The entry hash covers the envelope and the
/// payload digest; the payload itself is stored alongside in full.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoardEntry {
    pub seq: u64,
    pub timestamp_ms: u64,
    pub kind: EntryKind,
    pub payload_digest: String,
    pub payload: Value,
    pub prev_hash: String,
    pub entry_hash: String,
}

pub fn genesis_hash() -> String {
    hex::encode(transcript_digest(GENESIS_TAG, &[]))
}

fn entry_hash(
    seq: u64,
    timestamp_ms: u64,
    kind: EntryKind,
    payload_digest: &str,
    prev_hash: &str,
) -> String {
    hex::encode(transcript_digest(
        ENTRY_TAG,
        &[
            &seq.to_be_bytes(),
            &timestamp_ms.to_be_bytes(),
            kind.id().as_bytes(),
            payload_digest.as_bytes(),
            prev_hash.as_bytes(),
        ],
    ))
}

fn payload_digest(payload: &Value) -> Result<String, BoardError> {
    Ok(sha256_hex(&codec::canonical_bytes(payload)?))
}

#[derive(Debug, Clone)]
pub struct BoardConfig {
    /// Static bearer credential required for appends.
    pub credential: String,
    /// Tally budget handed to the append gate's table verification.
    pub tally_budget: u64,
}

impl BoardConfig {
    pub fn new(credential: impl Into<String>) -> Self {
        BoardConfig {
            credential: credential.into(),
            tally_budget: TallyPolicy::default().budget,
        }
    }
}

/// Chain verification outcome served by the board and used by verifiers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub valid: bool,
    pub entries: u64,
    pub error: Option<String>,
}

/// File-backed board store. All operations re-read the record file, so the
/// store never serves state the file does not back.
pub struct BoardStore {
    records_path: PathBuf,
    index_path: PathBuf,
    config: BoardConfig,
    lock: Mutex<()>,
}

impl BoardStore {
    pub fn open(dir: &Path, config: BoardConfig) -> Result<Self, BoardError> {
        std::fs::create_dir_all(dir)?;
        let store = BoardStore {
            records_path: dir.join(RECORDS_FILE),
            index_path: dir.join(INDEX_FILE),
            config,
            lock: Mutex::new(()),
        };
        if !store.records_path.exists() {
            std::fs::write(&store.records_path, b"")?;
            std::fs::write(&store.index_path, b"")?;
        }
        Ok(store)
    }

    fn read_entries(&self) -> Result<Vec<BoardEntry>, BoardError> {
        let file = std::fs::File::open(&self.records_path)?;
        let reader = std::io::BufReader::new(file);
        let mut entries = Vec::new();
        for (line_no, line) in reader.lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let entry: BoardEntry = serde_json::from_str(&line).map_err(|e| {
                BoardError::Storage(format!("record {line_no} unparsable: {e}"))
            })?;
            entries.push(entry);
        }
        Ok(entries)
    }

    /// Appends a payload after credential and gate checks; returns the
    /// sealed entry.
    pub fn append(
        &self,
        kind: EntryKind,
        payload: Value,
        credential: &str,
    ) -> Result<BoardEntry, BoardError> {
        if credential != self.config.credential {
            return Err(BoardError::BadCredential);
        }
        self.gate(kind, &payload)?;

        let _guard = self.lock.lock().expect("board lock");
        let entries = self.read_entries()?;
        let (seq, prev_hash) = match entries.last() {
            Some(last) => (last.seq + 1, last.entry_hash.clone()),
            None => (0, genesis_hash()),
        };
        let timestamp_ms = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_err(|e| BoardError::Storage(e.to_string()))?
            .as_millis() as u64;
        let digest = payload_digest(&payload)?;
        let hash = entry_hash(seq, timestamp_ms, kind, &digest, &prev_hash);
        let entry = BoardEntry {
            seq,
            timestamp_ms,
            kind,
            payload_digest: digest,
            payload,
            prev_hash,
            entry_hash: hash,
        };

        let mut line = serde_json::to_vec(&entry).map_err(|e| BoardError::Storage(e.to_string()))?;
        line.push(b'\n');
        let offset = std::fs::metadata(&self.records_path)?.len();
        let mut file = std::fs::OpenOptions::new()
            .append(true)
            .open(&self.records_path)?;
        file.write_all(&line)?;
        file.flush()?;
        let mut idx = std::fs::OpenOptions::new()
            .append(true)
            .open(&self.index_path)?;
        writeln!(idx, "{seq} {offset}")?;
        Ok(entry)
    }

    /// Structural admission checks. Audit tables must fully verify before
    /// they reach the board; report payloads must carry their format tag.
    fn gate(&self, kind: EntryKind, payload: &Value) -> Result<(), BoardError> {
        match kind {
            EntryKind::AuditTable => {
                let bytes = codec::canonical_bytes(payload)?;
                let doc: FairnessAuditTableDoc = codec::parse_sealed(&bytes)
                    .map_err(|e| BoardError::GateRejected(format!("table unparsable: {e}")))?;
                if doc.format != AUDIT_TABLE_FORMAT {
                    return Err(BoardError::GateRejected(format!(
                        "unexpected format `{}`",
                        doc.format
                    )));
                }
                let params = setup_group(doc.profile)
                    .map_err(|e| BoardError::GateRejected(e.to_string()))?;
                let table = FairnessAuditTable::from_doc(&params, &doc)
                    .map_err(|e| BoardError::GateRejected(e.to_string()))?;
                // The signer must match an earlier announcement when one exists.
                if let Some(announced) = self.latest_announcement()? {
                    if announced != doc.signer_public {
                        return Err(BoardError::GateRejected(
                            "signer does not match the announced public key".into(),
                        ));
                    }
                }
                let policy = TallyPolicy {
                    budget: self.config.tally_budget,
                };
                let (report, _) = verify_audit_table_with_counts(&params, &table, &policy);
                if !report.overall {
                    return Err(BoardError::GateRejected(format!(
                        "table verification failed: {}",
                        serde_json::to_string(&report).unwrap_or_default()
                    )));
                }
                Ok(())
            }
            EntryKind::VerificationReport => {
                expect_format(payload, VERIFICATION_REPORT_FORMAT)
            }
            EntryKind::FairnessReport => expect_format(payload, FAIRNESS_REPORT_FORMAT),
            EntryKind::GroupParams | EntryKind::PublicKeyAnnouncement => {
                if payload.is_object() {
                    Ok(())
                } else {
                    Err(BoardError::GateRejected("payload must be an object".into()))
                }
            }
        }
    }

    fn latest_announcement(&self) -> Result<Option<String>, BoardError> {
        let entries = self.read_entries()?;
        Ok(entries
            .iter()
            .rev()
            .find(|e| e.kind == EntryKind::PublicKeyAnnouncement)
            .and_then(|e| e.payload.get("signer_public"))
            .and_then(|v| v.as_str())
            .map(|s| s.to_string()))
    }

    pub fn get(&self, seq: u64) -> Result<BoardEntry, BoardError> {
        let _guard = self.lock.lock().expect("board lock");
        self.read_entries()?
            .into_iter()
            .find(|e| e.seq == seq)
            .ok_or(BoardError::NotFound(seq))
    }

    /// Entries with seq in [from, to]; full log when unbounded.
    pub fn list(&self, from: Option<u64>, to: Option<u64>) -> Result<Vec<BoardEntry>, BoardError> {
        let _guard = self.lock.lock().expect("board lock");
        let entries = self.read_entries()?;
        Ok(entries
            .into_iter()
            .filter(|e| from.map_or(true, |f| e.seq >= f) && to.map_or(true, |t| e.seq <= t))
            .collect())
    }

    pub fn head(&self) -> Result<Option<BoardEntry>, BoardError> {
        let _guard = self.lock.lock().expect("board lock");
        Ok(self.read_entries()?.into_iter().last())
    }

    /// Re-reads the record file and checks every hash link plus every stored
    /// proof and signature.
    pub fn verify_chain(&self) -> ChainReport {
        let _guard = self.lock.lock().expect("board lock");
        let entries = match self.read_entries() {
            Ok(entries) => entries,
            Err(e) => {
                return ChainReport {
                    valid: false,
                    entries: 0,
                    error: Some(e.to_string()),
                }
            }
        };
        let budget = self.config.tally_budget;
        match check_chain(&entries, budget) {
            Ok(()) => ChainReport {
                valid: true,
                entries: entries.len() as u64,
                error: None,
            },
            Err(e) => ChainReport {
                valid: false,
                entries: entries.len() as u64,
                error: Some(e.to_string()),
            },
        }
    }
}

fn expect_format(payload: &Value, format: &str) -> Result<(), BoardError> {
    match payload.get("format").and_then(|v| v.as_str()) {
        Some(f) if f == format => Ok(()),
        other => Err(BoardError::GateRejected(format!(
            "expected format `{format}`, found {other:?}"
        ))),
    }
}

/// Hash-link and payload-digest checks plus re-verification of every audit
/// table's proofs and signature.
pub fn check_chain(entries: &[BoardEntry], tally_budget: u64) -> Result<(), BoardError> {
    let mut prev = genesis_hash();
    for (i, entry) in entries.iter().enumerate() {
        if entry.seq != i as u64 {
            return Err(BoardError::ChainInvalid(format!(
                "entry {i} has seq {}",
                entry.seq
            )));
        }
        if entry.prev_hash != prev {
            return Err(BoardError::ChainInvalid(format!(
                "entry {i} prev-hash mismatch"
            )));
        }
        let digest = payload_digest(&entry.payload)?;
        if digest != entry.payload_digest {
            return Err(BoardError::ChainInvalid(format!(
                "entry {i} payload digest mismatch"
            )));
        }
        let expect = entry_hash(
            entry.seq,
            entry.timestamp_ms,
            entry.kind,
            &entry.payload_digest,
            &entry.prev_hash,
        );
        if expect != entry.entry_hash {
            return Err(BoardError::ChainInvalid(format!(
                "entry {i} entry hash mismatch"
            )));
        }
        if entry.kind == EntryKind::AuditTable {
            let bytes = codec::canonical_bytes(&entry.payload)?;
            let doc: FairnessAuditTableDoc = codec::parse_sealed(&bytes)
                .map_err(|e| BoardError::ChainInvalid(format!("entry {i} table: {e}")))?;
            let params = setup_group(doc.profile)
                .map_err(|e| BoardError::ChainInvalid(e.to_string()))?;
            let table = FairnessAuditTable::from_doc(&params, &doc)
                .map_err(|e| BoardError::ChainInvalid(e.to_string()))?;
            let policy = TallyPolicy {
                budget: tally_budget,
            };
            let (report, _) = verify_audit_table_with_counts(&params, &table, &policy);
            if !report.overall {
                return Err(BoardError::ChainInvalid(format!(
                    "entry {i} audit table fails verification"
                )));
            }
        }
        prev = entry.entry_hash.clone();
    }
    Ok(())
}

/// What a third party reproduces from board contents alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniversalOutcome {
    pub chain_valid: bool,
    pub audit_tables: u64,
    /// True iff every published fairness and verification report was
    /// reproduced bit-for-bit from its audit table.
    pub reports_reproduced: bool,
    pub errors: Vec<String>,
}

impl UniversalOutcome {
    pub fn ok(&self) -> bool {
        self.chain_valid && self.reports_reproduced && self.errors.is_empty()
    }
}

/// Full third-party verification from board contents alone: chain integrity,
/// table proofs, count resolution, and bit-for-bit reproduction of the
/// published reports.
pub fn universal_verify(entries: &[BoardEntry], tally_budget: u64) -> UniversalOutcome {
    let mut errors = Vec::new();
    let chain_valid = match check_chain(entries, tally_budget) {
        Ok(()) => true,
        Err(e) => {
            errors.push(e.to_string());
            false
        }
    };

    let mut audit_tables = 0;
    let mut reports_reproduced = chain_valid;
    if chain_valid {
        for entry in entries.iter().filter(|e| e.kind == EntryKind::AuditTable) {
            audit_tables += 1;
            match reproduce_reports(entry, entries, tally_budget) {
                Ok(()) => {}
                Err(e) => {
                    reports_reproduced = false;
                    errors.push(format!("entry {}: {e}", entry.seq));
                }
            }
        }
    }
    UniversalOutcome {
        chain_valid,
        audit_tables,
        reports_reproduced,
        errors,
    }
}

fn reproduce_reports(
    table_entry: &BoardEntry,
    entries: &[BoardEntry],
    tally_budget: u64,
) -> Result<(), BoardError> {
    let bytes = codec::canonical_bytes(&table_entry.payload)?;
    let doc: FairnessAuditTableDoc = codec::parse_sealed(&bytes)
        .map_err(|e| BoardError::ChainInvalid(format!("table unparsable: {e}")))?;
    let params =
        setup_group(doc.profile).map_err(|e| BoardError::ChainInvalid(e.to_string()))?;
    let table = FairnessAuditTable::from_doc(&params, &doc)
        .map_err(|e| BoardError::ChainInvalid(e.to_string()))?;
    let policy = TallyPolicy {
        budget: tally_budget,
    };
    let (report, counts) = verify_audit_table_with_counts(&params, &table, &policy);
    if !report.overall {
        return Err(BoardError::ChainInvalid(
            "audit table fails re-verification".into(),
        ));
    }
    let counts = counts.ok_or_else(|| {
        BoardError::ChainInvalid("counts unresolvable despite verification".into())
    })?;
    let table_digest = doc.digest.clone();

    // The published verification report for this table must match ours.
    let published_verification = entries.iter().find(|e| {
        e.kind == EntryKind::VerificationReport
            && e.payload.get("table_digest").and_then(|v| v.as_str()) == Some(&table_digest)
    });
    if let Some(published) = published_verification {
        let ours = codec::seal(report.to_doc(&table_digest))?;
        let ours_bytes = codec::canonical_bytes(&ours)?;
        let theirs_bytes = codec::canonical_bytes(&published.payload)?;
        if ours_bytes != theirs_bytes {
            return Err(BoardError::ChainInvalid(
                "verification report does not reproduce".into(),
            ));
        }
    }

    // Reproduce every published fairness report (one per metric mode).
    for published in entries.iter().filter(|e| {
        e.kind == EntryKind::FairnessReport
            && e.payload.get("table_digest").and_then(|v| v.as_str()) == Some(&table_digest)
    }) {
        let mode = published
            .payload
            .get("mode")
            .and_then(|v| v.as_str())
            .and_then(|s| s.parse::<MetricMode>().ok())
            .ok_or_else(|| BoardError::ChainInvalid("fairness report lacks a mode".into()))?;
        let ours = compute_metrics(&counts, table.n, mode);
        let ours_doc = codec::seal(ours.to_doc(&table_digest))?;
        let ours_bytes = codec::canonical_bytes(&ours_doc)?;
        let theirs_bytes = codec::canonical_bytes(&published.payload)?;
        if ours_bytes != theirs_bytes {
            return Err(BoardError::ChainInvalid(
                "fairness report does not reproduce".into(),
            ));
        }
    }
    Ok(())
}
