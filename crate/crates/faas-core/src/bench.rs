//! Benchmark harness: runs the three protocol phases sequentially on one
//! thread and records per-item timings for every main computational step, so
//! per-row costs stay comparable across runs and machines.
//!
//! Phase I runs and is persisted before the sample labels exist; the harness
//! writes the cryptogram table, then the samples, then the audit table, so
//! artifact timestamps witness the precompute-then-label ordering.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::auditor::{
    compute_metrics, homomorphic_product, resolve_counts, MetricMode, PermutationCounts,
    TallyPolicy,
};
use crate::codec::{self, ContentAddressed};
use crate::group::GroupParams;
use crate::prover::{
    declare_counts, encode_sample, generate_keypairs, reconstructed_keys, smallest_m,
    AuditRow, CryptogramCandidate, CryptogramRow, CryptogramTable, FairnessAuditTable,
    ProverError,
};
use crate::samples;
use crate::zkp::{
    or8_prove_with_lattice, or8_verify_with_lattice, prove_encoding_knowledge, schnorr_prove,
    schnorr_verify, sign_table, verify_encoding_knowledge, verify_table_signature, Or8Purpose,
    Or8Statement, PermutationLattice, ProofContext, BRANCHES,
};

pub const BENCH_REPORT_FORMAT: &str = "faas.bench-report.v1";

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Prover(#[from] ProverError),
    #[error(transparent)]
    Auditor(#[from] crate::auditor::AuditorError),
    #[error(transparent)]
    Samples(#[from] samples::SampleError),
    #[error(transparent)]
    Zkp(#[from] crate::zkp::ZkpError),
    #[error(transparent)]
    Codec(#[from] codec::CodecError),
    #[error("verification failed during bench phase 3")]
    VerificationFailed,
}

/// Timing for one named step: per-item mean and standard deviation in
/// milliseconds plus the step total in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub phase: String,
    pub step: String,
    pub items: u64,
    pub mean_ms: f64,
    pub std_ms: f64,
    pub total_s: f64,
}

impl BenchRecord {
    fn from_durations(phase: &str, step: &str, durations: &[f64]) -> Self {
        let items = durations.len() as u64;
        let total_ms: f64 = durations.iter().sum();
        let mean = if items > 0 { total_ms / items as f64 } else { 0.0 };
        let variance = if items > 1 {
            durations.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (items as f64 - 1.0)
        } else {
            0.0
        };
        BenchRecord {
            phase: phase.to_string(),
            step: step.to_string(),
            items,
            mean_ms: mean,
            std_ms: variance.sqrt(),
            total_s: total_ms / 1000.0,
        }
    }

    fn batch(phase: &str, step: &str, items: u64, total_ms: f64) -> Self {
        BenchRecord {
            phase: phase.to_string(),
            step: step.to_string(),
            items,
            mean_ms: if items > 0 { total_ms / items as f64 } else { 0.0 },
            std_ms: 0.0,
            total_s: total_ms / 1000.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReportDoc {
    pub format: String,
    pub profile: String,
    pub n: u64,
    pub seed: u64,
    pub phase_totals_s: [f64; 3],
    pub records: Vec<BenchRecord>,
    pub digest: String,
}

impl ContentAddressed for BenchReportDoc {
    fn digest_field(&self) -> &str {
        &self.digest
    }
    fn set_digest_field(&mut self, digest: String) {
        self.digest = digest;
    }
}

pub struct BenchOutput {
    pub records: Vec<BenchRecord>,
    pub phase_totals_s: [f64; 3],
    pub counts: PermutationCounts,
    pub table_digest: String,
    pub cryptogram_table_path: PathBuf,
    pub samples_path: PathBuf,
    pub audit_table_path: PathBuf,
}

impl BenchOutput {
    pub fn to_doc(&self, params: &GroupParams, n: u64, seed: u64) -> BenchReportDoc {
        BenchReportDoc {
            format: BENCH_REPORT_FORMAT.to_string(),
            profile: params.profile().id().to_string(),
            n,
            seed,
            phase_totals_s: self.phase_totals_s,
            records: self.records.clone(),
            digest: String::new(),
        }
    }
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1000.0
}

/// Runs the full pipeline sequentially with per-step instrumentation,
/// writing phase artifacts into `dir` in phase order.
pub fn run_pipeline_bench(
    params: &GroupParams,
    n: u64,
    rates: &[f64; 8],
    seed: u64,
    dir: &Path,
) -> Result<BenchOutput, BenchError> {
    let mut records = Vec::new();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let session_id = format!("bench-{seed}");
    let audit_session_id = format!("bench-audit-{seed}");
    let m = smallest_m(n);
    let lattice = PermutationLattice::new(params, m);

    // ---- Phase I: cryptogram table, before any labels exist ----
    let phase1_start = Instant::now();

    let mut keygen_ms = Vec::with_capacity(n as usize);
    let mut keypairs = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let t = Instant::now();
        let mut batch = generate_keypairs(params, 1, &mut rng)?;
        keygen_ms.push(ms(t));
        keypairs.push(batch.pop().expect("one pair"));
    }
    records.push(BenchRecord::from_durations(
        "phase1",
        "key generation",
        &keygen_ms,
    ));

    let mut key_proof_ms = Vec::with_capacity(n as usize);
    let mut key_proofs = Vec::with_capacity(n as usize);
    for (i, (x, big_x)) in keypairs.iter().enumerate() {
        let ctx = ProofContext {
            session_id: &session_id,
            n,
            m,
            row_index: i as u64,
        };
        let t = Instant::now();
        key_proofs.push(schnorr_prove(params, x, big_x, &ctx, &mut rng)?);
        key_proof_ms.push(ms(t));
    }
    records.push(BenchRecord::from_durations(
        "phase1",
        "key-ownership proof",
        &key_proof_ms,
    ));

    let publics: Vec<_> = keypairs.iter().map(|(_, x)| x.clone()).collect();
    let t = Instant::now();
    let recon = reconstructed_keys(params, &publics)?;
    records.push(BenchRecord::batch(
        "phase1",
        "reconstructed keys",
        n,
        ms(t),
    ));

    let mut or8_ms = Vec::with_capacity(n as usize);
    let mut rows = Vec::with_capacity(n as usize);
    for (i, ((x, big_x), big_r)) in keypairs.iter().zip(&recon).enumerate() {
        let ctx = ProofContext {
            session_id: &session_id,
            n,
            m,
            row_index: i as u64,
        };
        let t = Instant::now();
        let shared = params.group_exp(big_r, x);
        let candidates = (1..=BRANCHES as u8)
            .map(|k| {
                let cryptogram = params.group_mul(&shared, lattice.point(k));
                let statement = Or8Statement {
                    public_key: big_x,
                    reconstructed_key: big_r,
                    cryptogram: &cryptogram,
                };
                let proof = or8_prove_with_lattice(
                    params,
                    x,
                    &statement,
                    k,
                    &lattice,
                    &ctx,
                    Or8Purpose::CandidateWellFormed,
                    &mut rng,
                )?;
                Ok(CryptogramCandidate { cryptogram, proof })
            })
            .collect::<Result<Vec<_>, BenchError>>()?;
        or8_ms.push(ms(t));
        rows.push(CryptogramRow {
            index: i as u64,
            public_key: big_x.clone(),
            reconstructed_key: big_r.clone(),
            private_key: x.clone(),
            key_proof: key_proofs[i].clone(),
            candidates,
        });
    }
    records.push(BenchRecord::from_durations(
        "phase1",
        "1-out-of-8 proofs",
        &or8_ms,
    ));

    let mut self_check_ms = Vec::with_capacity(n as usize);
    for row in &rows {
        let ctx = ProofContext {
            session_id: &session_id,
            n,
            m,
            row_index: row.index,
        };
        let t = Instant::now();
        for candidate in &row.candidates {
            let statement = Or8Statement {
                public_key: &row.public_key,
                reconstructed_key: &row.reconstructed_key,
                cryptogram: &candidate.cryptogram,
            };
            if !or8_verify_with_lattice(
                params,
                &statement,
                &candidate.proof,
                &lattice,
                &ctx,
                Or8Purpose::CandidateWellFormed,
            ) {
                return Err(BenchError::VerificationFailed);
            }
        }
        self_check_ms.push(ms(t));
    }
    records.push(BenchRecord::from_durations(
        "phase1",
        "candidate self-check",
        &self_check_ms,
    ));

    let signing_key = params.random_scalar(&mut rng).map_err(ProverError::from)?;
    let signer_public = params.group_exp(&params.generator(), &signing_key);
    let cryptogram_table = CryptogramTable {
        session_id: session_id.clone(),
        profile: params.profile(),
        n,
        m,
        signing_key,
        signer_public,
        rows,
    };
    let cryptogram_table_path = dir.join("cryptogram-table.json");
    cryptogram_table.save(params, &cryptogram_table_path)?;
    let phase1_total = phase1_start.elapsed().as_secs_f64();

    // Labels come into existence only now.
    let sample_list = samples::gen_synthetic(n, rates, seed ^ 0x5eed)?;
    let samples_path = dir.join("samples.csv");
    samples::write_csv(&samples_path, &sample_list)?;

    // ---- Phase II: fairness auditing table ----
    let phase2_start = Instant::now();
    let mut assembly_ms = Vec::with_capacity(n as usize);
    let mut encoding_ms = Vec::with_capacity(n as usize);
    let mut audit_rows = Vec::with_capacity(n as usize);
    for (row, sample) in cryptogram_table.rows.iter().zip(&sample_list) {
        let t = Instant::now();
        let k = encode_sample(sample);
        let candidate = &row.candidates[k.get() as usize - 1];
        assembly_ms.push(ms(t));

        let statement = Or8Statement {
            public_key: &row.public_key,
            reconstructed_key: &row.reconstructed_key,
            cryptogram: &candidate.cryptogram,
        };
        let t = Instant::now();
        let encoding_proof = prove_encoding_knowledge(
            params,
            &row.private_key,
            &statement,
            k.get(),
            &lattice,
            &audit_session_id,
            n,
            row.index,
            &mut rng,
        )?;
        encoding_ms.push(ms(t));
        audit_rows.push(AuditRow {
            index: row.index,
            public_key: row.public_key.clone(),
            reconstructed_key: row.reconstructed_key.clone(),
            cryptogram: candidate.cryptogram.clone(),
            or8_proof: candidate.proof.clone(),
            key_proof: row.key_proof.clone(),
            encoding_proof,
        });
    }
    records.push(BenchRecord::from_durations(
        "phase2",
        "table assembly",
        &assembly_ms,
    ));
    records.push(BenchRecord::from_durations(
        "phase2",
        "encoding proof",
        &encoding_ms,
    ));

    let declared = declare_counts(&sample_list);
    let mut audit_table = FairnessAuditTable {
        session_id: session_id.clone(),
        audit_session_id: audit_session_id.clone(),
        profile: params.profile(),
        n,
        m,
        signer_public: cryptogram_table.signer_public.clone(),
        rows: audit_rows,
        declared_counts: Some(declared),
        signature: crate::zkp::TableSignature {
            signer_public: cryptogram_table.signer_public.clone(),
            commitment: cryptogram_table.signer_public.clone(),
            response: params.scalar_from_u64(0),
        },
    };
    let t = Instant::now();
    let digest = {
        let mut doc = audit_table.to_doc(params);
        doc.signature = crate::zkp::TableSignatureDoc::empty();
        doc.digest = String::new();
        use sha2::Digest as _;
        let bytes = codec::canonical_bytes(&doc)?;
        let d: [u8; 32] = sha2::Sha256::digest(&bytes).into();
        d
    };
    audit_table.signature =
        sign_table(params, &cryptogram_table.signing_key, &digest, &mut rng)?;
    records.push(BenchRecord::batch("phase2", "table signing", 1, ms(t)));

    let audit_table_path = dir.join("audit-table.json");
    audit_table.save(params, &audit_table_path)?;
    let phase2_total = phase2_start.elapsed().as_secs_f64();

    // ---- Phase III: verification and tally ----
    let phase3_start = Instant::now();

    let t = Instant::now();
    let signing_digest = audit_table.signing_digest(params)?;
    let signature_ok = verify_table_signature(
        params,
        &audit_table.signer_public,
        &signing_digest,
        &audit_table.signature,
    );
    records.push(BenchRecord::batch("phase3", "signature check", 1, ms(t)));
    if !signature_ok {
        return Err(BenchError::VerificationFailed);
    }

    let mut or8_verify_ms = Vec::with_capacity(n as usize);
    let mut encoding_verify_ms = Vec::with_capacity(n as usize);
    let mut key_verify_ms = Vec::with_capacity(n as usize);
    for row in &audit_table.rows {
        let ctx = ProofContext {
            session_id: &audit_table.session_id,
            n,
            m,
            row_index: row.index,
        };
        let statement = Or8Statement {
            public_key: &row.public_key,
            reconstructed_key: &row.reconstructed_key,
            cryptogram: &row.cryptogram,
        };
        let t = Instant::now();
        let key_ok = schnorr_verify(params, &row.public_key, &row.key_proof, &ctx);
        key_verify_ms.push(ms(t));

        let t = Instant::now();
        let or8_ok = or8_verify_with_lattice(
            params,
            &statement,
            &row.or8_proof,
            &lattice,
            &ctx,
            Or8Purpose::CandidateWellFormed,
        );
        or8_verify_ms.push(ms(t));

        let t = Instant::now();
        let enc_ok = verify_encoding_knowledge(
            params,
            &statement,
            &row.encoding_proof,
            &lattice,
            &audit_table.audit_session_id,
            n,
            row.index,
        );
        encoding_verify_ms.push(ms(t));
        if !(key_ok && or8_ok && enc_ok) {
            return Err(BenchError::VerificationFailed);
        }
    }
    records.push(BenchRecord::from_durations(
        "phase3",
        "key-ownership verification",
        &key_verify_ms,
    ));
    records.push(BenchRecord::from_durations(
        "phase3",
        "1-out-of-8 verification",
        &or8_verify_ms,
    ));
    records.push(BenchRecord::from_durations(
        "phase3",
        "encoding-proof verification",
        &encoding_verify_ms,
    ));

    let t = Instant::now();
    let product = homomorphic_product(params, &audit_table)?;
    records.push(BenchRecord::batch(
        "phase3",
        "cryptogram summation",
        n,
        ms(t),
    ));

    let t = Instant::now();
    let counts = resolve_counts(params, &audit_table, &TallyPolicy::default())?;
    records.push(BenchRecord::batch(
        "phase3",
        "count verification",
        1,
        ms(t),
    ));
    if !crate::auditor::verify_declared_counts(params, &product, &counts, n, m) {
        return Err(BenchError::VerificationFailed);
    }
    let _ = compute_metrics(&counts, n, MetricMode::Joint);
    let phase3_total = phase3_start.elapsed().as_secs_f64();

    let table_digest = codec::content_digest(&audit_table.to_doc(params))?;
    Ok(BenchOutput {
        records,
        phase_totals_s: [phase1_total, phase2_total, phase3_total],
        counts,
        table_digest,
        cryptogram_table_path,
        samples_path,
        audit_table_path,
    })
}
