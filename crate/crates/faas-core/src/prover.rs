//! ML-system side of the protocol.
//!
//! Phase I builds the cryptogram table before any predictions exist: per
//! sample a keypair (x_i, X_i), the reconstructed key R_i derived from all
//! other public keys, and eight candidate cryptograms C_(i,k) = R_i^(x_i) *
//! g^(p_k), one per (membership, actual, predicted) permutation, each with a
//! 1-out-of-8 well-formedness proof. Phase II selects one candidate per row
//! according to the real sample, attaches the key-ownership proof and a fresh
//! encoding-knowledge proof, optionally declares the permutation counts, and
//! signs the resulting fairness auditing table.
//!
//! Private keys and the signing key exist only in the Phase I local store;
//! the audit table schema has no field that could carry them.

use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::Digest;

use crate::auditor::PermutationCounts;
use crate::codec::{self, CodecError, ContentAddressed};
use crate::group::{setup_group, GroupElement, GroupError, GroupParams, Profile, Scalar};
use crate::zkp::{
    self, or8_prove_with_lattice, or8_verify_with_lattice, prove_encoding_knowledge,
    schnorr_prove, schnorr_verify, sign_table, EncodingKnowledgeProof, EncodingKnowledgeProofDoc,
    Or8Proof, Or8ProofDoc, Or8Purpose, Or8Statement, PermutationLattice, ProofContext,
    SchnorrProof, SchnorrProofDoc, TableSignature, TableSignatureDoc, ZkpError, BRANCHES,
};

pub const CRYPTOGRAM_TABLE_FORMAT: &str = "faas.cryptogram-table.v1";
pub const AUDIT_TABLE_FORMAT: &str = "faas.audit-table.v1";

#[derive(Debug, thiserror::Error)]
pub enum ProverError {
    #[error("table must have at least one row")]
    EmptyTable,
    #[error("sample count {got} does not match table size {expected}")]
    SizeMismatch { expected: u64, got: u64 },
    #[error("n = {n} needs m = {m}, beyond the profile limit {max_m}")]
    TableTooLarge { n: u64, m: u32, max_m: u32 },
    #[error("permutation index {0} out of range 1..=8")]
    PermutationOutOfRange(u8),
    #[error("table self-verification failed: {0}")]
    SelfCheck(String),
    #[error("unsupported table format `{0}`")]
    BadFormat(String),
    #[error(transparent)]
    Zkp(#[from] ZkpError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

/// One test-set sample: protected-group membership A, actual label Y,
/// predicted label Y-hat.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabeledSample {
    pub protected: bool,
    pub actual: bool,
    pub predicted: bool,
}

impl LabeledSample {
    pub fn new(protected: bool, actual: bool, predicted: bool) -> Self {
        LabeledSample {
            protected,
            actual,
            predicted,
        }
    }

    pub fn from_bits(a: u8, y: u8, yhat: u8) -> Option<Self> {
        if a > 1 || y > 1 || yhat > 1 {
            return None;
        }
        Some(LabeledSample::new(a == 1, y == 1, yhat == 1))
    }
}

/// Permutation number 1..=8: k = 1 + 4A + 2Y + Y-hat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermutationIndex(u8);

impl PermutationIndex {
    pub fn new(k: u8) -> Result<Self, ProverError> {
        if (1..=BRANCHES as u8).contains(&k) {
            Ok(PermutationIndex(k))
        } else {
            Err(ProverError::PermutationOutOfRange(k))
        }
    }

    pub fn get(&self) -> u8 {
        self.0
    }
}

/// Maps a sample to its permutation number per the 3-bit encoding
/// A,Y,Y-hat -> 1 + decimal value.
pub fn encode_sample(sample: &LabeledSample) -> PermutationIndex {
    let bits = (sample.protected as u8) << 2 | (sample.actual as u8) << 1 | sample.predicted as u8;
    PermutationIndex(bits + 1)
}

/// Smallest m with 2^m > n.
pub fn smallest_m(n: u64) -> u32 {
    let mut m = 1;
    while (1u128 << m) <= n as u128 {
        m += 1;
    }
    m
}

/// p_k = 2^((k-1)*m); the tally becomes a base-2^m digit decomposition.
pub fn exponent_for_permutation(k: u8, m: u32) -> Result<BigUint, ProverError> {
    let k = PermutationIndex::new(k)?;
    Ok(zkp::permutation_exponent(k.get(), m))
}

/// n fresh keypairs (x_i, g^(x_i)).
pub fn generate_keypairs(
    params: &GroupParams,
    n: u64,
    rng: &mut dyn RngCore,
) -> Result<Vec<(Scalar, GroupElement)>, ProverError> {
    if n == 0 {
        return Err(ProverError::EmptyTable);
    }
    let g = params.generator();
    (0..n)
        .map(|_| {
            let x = params.random_scalar(rng)?;
            let big_x = params.group_exp(&g, &x);
            Ok((x, big_x))
        })
        .collect()
}

/// R_i = (prod_(j<i) X_j) / (prod_(j>i) X_j), computed with prefix and
/// suffix products in O(n) group operations.
pub fn reconstructed_keys(
    params: &GroupParams,
    publics: &[GroupElement],
) -> Result<Vec<GroupElement>, ProverError> {
    if publics.is_empty() {
        return Err(ProverError::EmptyTable);
    }
    let n = publics.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(params.identity());
    for x in publics {
        let last = prefix.last().expect("non-empty");
        prefix.push(params.group_mul(last, x));
    }
    let mut suffix = vec![params.identity(); n + 1];
    for i in (0..n).rev() {
        suffix[i] = params.group_mul(&suffix[i + 1], &publics[i]);
    }
    Ok((0..n)
        .map(|i| params.group_div(&prefix[i], &suffix[i + 1]))
        .collect())
}

/// One Phase I candidate: a cryptogram and its well-formedness proof.
#[derive(Debug, Clone, PartialEq)]
pub struct CryptogramCandidate {
    pub cryptogram: GroupElement,
    pub proof: Or8Proof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CryptogramRow {
    pub index: u64,
    pub public_key: GroupElement,
    pub reconstructed_key: GroupElement,
    /// Local only; never serialized into the audit output.
    pub private_key: Scalar,
    pub key_proof: SchnorrProof,
    pub candidates: Vec<CryptogramCandidate>,
}

/// Phase I output. Lives in the prover's local store; carries the private
/// keys and the table signing key.
#[derive(Debug, Clone, PartialEq)]
pub struct CryptogramTable {
    pub session_id: String,
    pub profile: Profile,
    pub n: u64,
    pub m: u32,
    pub signing_key: Scalar,
    pub signer_public: GroupElement,
    pub rows: Vec<CryptogramRow>,
}

/// Builds the full cryptogram table: keypairs, reconstructed keys, and all
/// eight candidates with proofs per row, then re-verifies every proof.
/// Runs before any sample labels exist.
pub fn build_cryptogram_table(
    params: &GroupParams,
    n: u64,
    session_id: &str,
    rng: &mut dyn RngCore,
) -> Result<CryptogramTable, ProverError> {
    let m = smallest_m(n);
    if n == 0 {
        return Err(ProverError::EmptyTable);
    }
    if m > params.max_m() {
        return Err(ProverError::TableTooLarge {
            n,
            m,
            max_m: params.max_m(),
        });
    }
    let keypairs = generate_keypairs(params, n, rng)?;
    let publics: Vec<GroupElement> = keypairs.iter().map(|(_, x)| x.clone()).collect();
    let recon = reconstructed_keys(params, &publics)?;

    let signing_key = params.random_scalar(rng)?;
    let signer_public = params.group_exp(&params.generator(), &signing_key);

    // Per-row seeds drawn sequentially so results are independent of the
    // worker count; row proof generation then parallelizes freely.
    let seeds = draw_row_seeds(n as usize, rng)?;

    let lattice = PermutationLattice::new(params, m);
    let rows: Vec<CryptogramRow> = keypairs
        .into_par_iter()
        .zip(recon.into_par_iter())
        .zip(seeds.into_par_iter())
        .enumerate()
        .map(|(i, (((x, big_x), big_r), seed))| {
            let mut row_rng = ChaCha20Rng::from_seed(seed);
            let index = i as u64;
            let ctx = ProofContext {
                session_id,
                n,
                m,
                row_index: index,
            };
            let key_proof = schnorr_prove(params, &x, &big_x, &ctx, &mut row_rng)?;
            let shared = params.group_exp(&big_r, &x);
            let candidates = (1..=BRANCHES as u8)
                .map(|k| {
                    let cryptogram = params.group_mul(&shared, lattice.point(k));
                    let statement = Or8Statement {
                        public_key: &big_x,
                        reconstructed_key: &big_r,
                        cryptogram: &cryptogram,
                    };
                    let proof = or8_prove_with_lattice(
                        params,
                        &x,
                        &statement,
                        k,
                        &lattice,
                        &ctx,
                        Or8Purpose::CandidateWellFormed,
                        &mut row_rng,
                    )?;
                    Ok(CryptogramCandidate { cryptogram, proof })
                })
                .collect::<Result<Vec<_>, ProverError>>()?;
            Ok(CryptogramRow {
                index,
                public_key: big_x,
                reconstructed_key: big_r,
                private_key: x,
                key_proof,
                candidates,
            })
        })
        .collect::<Result<Vec<_>, ProverError>>()?;

    let table = CryptogramTable {
        session_id: session_id.to_string(),
        profile: params.profile(),
        n,
        m,
        signing_key,
        signer_public,
        rows,
    };
    self_verify_cryptogram_table(params, &table, &lattice)?;
    Ok(table)
}

fn draw_row_seeds(count: usize, rng: &mut dyn RngCore) -> Result<Vec<[u8; 32]>, ProverError> {
    let mut seeds = Vec::with_capacity(count);
    for _ in 0..count {
        let mut seed = [0u8; 32];
        rng.try_fill_bytes(&mut seed)
            .map_err(|_| GroupError::Entropy)?;
        seeds.push(seed);
    }
    Ok(seeds)
}

fn self_verify_cryptogram_table(
    params: &GroupParams,
    table: &CryptogramTable,
    lattice: &PermutationLattice,
) -> Result<(), ProverError> {
    let failure = table.rows.par_iter().find_map_any(|row| {
        let ctx = ProofContext {
            session_id: &table.session_id,
            n: table.n,
            m: table.m,
            row_index: row.index,
        };
        if !schnorr_verify(params, &row.public_key, &row.key_proof, &ctx) {
            return Some(format!("row {} key proof", row.index));
        }
        for (idx, candidate) in row.candidates.iter().enumerate() {
            let statement = Or8Statement {
                public_key: &row.public_key,
                reconstructed_key: &row.reconstructed_key,
                cryptogram: &candidate.cryptogram,
            };
            if !or8_verify_with_lattice(
                params,
                &statement,
                &candidate.proof,
                lattice,
                &ctx,
                Or8Purpose::CandidateWellFormed,
            ) {
                return Some(format!("row {} candidate {}", row.index, idx + 1));
            }
        }
        None
    });
    match failure {
        Some(what) => Err(ProverError::SelfCheck(what)),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditRow {
    pub index: u64,
    pub public_key: GroupElement,
    pub reconstructed_key: GroupElement,
    pub cryptogram: GroupElement,
    pub or8_proof: Or8Proof,
    pub key_proof: SchnorrProof,
    pub encoding_proof: EncodingKnowledgeProof,
}

/// Phase II output: the fairness auditing table sent to the auditor. One
/// selected cryptogram per row; nothing in the schema reveals the selected
/// permutation or any private key.
#[derive(Debug, Clone, PartialEq)]
pub struct FairnessAuditTable {
    pub session_id: String,
    pub audit_session_id: String,
    pub profile: Profile,
    pub n: u64,
    pub m: u32,
    pub signer_public: GroupElement,
    pub rows: Vec<AuditRow>,
    pub declared_counts: Option<PermutationCounts>,
    pub signature: TableSignature,
}

/// Selects one cryptogram per row from the real samples, attaches proofs,
/// optionally declares counts, and signs the table.
pub fn build_audit_table(
    params: &GroupParams,
    table: &CryptogramTable,
    samples: &[LabeledSample],
    audit_session_id: &str,
    declare: bool,
    rng: &mut dyn RngCore,
) -> Result<FairnessAuditTable, ProverError> {
    if samples.len() as u64 != table.n {
        return Err(ProverError::SizeMismatch {
            expected: table.n,
            got: samples.len() as u64,
        });
    }

    let seeds = draw_row_seeds(samples.len(), rng)?;
    let lattice = PermutationLattice::new(params, table.m);
    let rows: Vec<AuditRow> = table
        .rows
        .par_iter()
        .zip(samples.par_iter())
        .zip(seeds.into_par_iter())
        .map(|((row, sample), seed)| {
            let mut row_rng = ChaCha20Rng::from_seed(seed);
            let k = encode_sample(sample);
            let candidate = &row.candidates[k.get() as usize - 1];
            let statement = Or8Statement {
                public_key: &row.public_key,
                reconstructed_key: &row.reconstructed_key,
                cryptogram: &candidate.cryptogram,
            };
            let encoding_proof = prove_encoding_knowledge(
                params,
                &row.private_key,
                &statement,
                k.get(),
                &lattice,
                audit_session_id,
                table.n,
                row.index,
                &mut row_rng,
            )?;
            Ok(AuditRow {
                index: row.index,
                public_key: row.public_key.clone(),
                reconstructed_key: row.reconstructed_key.clone(),
                cryptogram: candidate.cryptogram.clone(),
                or8_proof: candidate.proof.clone(),
                key_proof: row.key_proof.clone(),
                encoding_proof,
            })
        })
        .collect::<Result<Vec<_>, ProverError>>()?;

    let declared_counts = declare.then(|| declare_counts(samples));

    let unsigned = AuditTableBody {
        session_id: table.session_id.clone(),
        audit_session_id: audit_session_id.to_string(),
        profile: table.profile,
        n: table.n,
        m: table.m,
        signer_public: table.signer_public.clone(),
        rows,
        declared_counts,
    };
    let digest = unsigned.signing_digest(params)?;
    let signature = sign_table(params, &table.signing_key, &digest, rng)?;
    Ok(unsigned.into_table(signature))
}

/// All audit-table fields except the signature; the signing digest is defined
/// over this body serialized with an all-empty signature field.
struct AuditTableBody {
    session_id: String,
    audit_session_id: String,
    profile: Profile,
    n: u64,
    m: u32,
    signer_public: GroupElement,
    rows: Vec<AuditRow>,
    declared_counts: Option<PermutationCounts>,
}

impl AuditTableBody {
    fn doc(&self, params: &GroupParams, signature: TableSignatureDoc) -> FairnessAuditTableDoc {
        FairnessAuditTableDoc {
            format: AUDIT_TABLE_FORMAT.to_string(),
            session_id: self.session_id.clone(),
            audit_session_id: self.audit_session_id.clone(),
            profile: self.profile,
            n: self.n,
            m: self.m,
            signer_public: params.element_hex(&self.signer_public),
            rows: self
                .rows
                .iter()
                .map(|row| AuditRowDoc {
                    index: row.index,
                    public_key: params.element_hex(&row.public_key),
                    reconstructed_key: params.element_hex(&row.reconstructed_key),
                    cryptogram: params.element_hex(&row.cryptogram),
                    or8_proof: row.or8_proof.to_doc(params),
                    key_proof: row.key_proof.to_doc(params),
                    encoding_proof: row.encoding_proof.to_doc(params),
                })
                .collect(),
            declared_counts: self.declared_counts.as_ref().map(|c| *c.as_array()),
            signature,
            digest: String::new(),
        }
    }

    fn signing_digest(&self, params: &GroupParams) -> Result<[u8; 32], ProverError> {
        let doc = self.doc(params, TableSignatureDoc::empty());
        let bytes = codec::canonical_bytes(&doc)?;
        Ok(sha2::Sha256::digest(&bytes).into())
    }

    fn into_table(self, signature: TableSignature) -> FairnessAuditTable {
        FairnessAuditTable {
            session_id: self.session_id,
            audit_session_id: self.audit_session_id,
            profile: self.profile,
            n: self.n,
            m: self.m,
            signer_public: self.signer_public,
            rows: self.rows,
            declared_counts: self.declared_counts,
            signature,
        }
    }
}

impl TableSignatureDoc {
    pub fn empty() -> Self {
        TableSignatureDoc {
            signer_public: String::new(),
            commitment: String::new(),
            response: String::new(),
        }
    }
}

/// Per-permutation tallies of a sample list; the delegated declaration the
/// auditor can verify against the homomorphic product.
pub fn declare_counts(samples: &[LabeledSample]) -> PermutationCounts {
    let mut counts = [0u64; 8];
    for sample in samples {
        counts[encode_sample(sample).get() as usize - 1] += 1;
    }
    PermutationCounts::new(counts)
}

// ---------------------------------------------------------------------------
// Wire forms
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CryptogramCandidateDoc {
    pub cryptogram: String,
    pub proof: Or8ProofDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CryptogramRowDoc {
    pub index: u64,
    pub public_key: String,
    pub reconstructed_key: String,
    pub private_key: String,
    pub key_proof: SchnorrProofDoc,
    pub candidates: Vec<CryptogramCandidateDoc>,
}

/// Local persistence format for Phase I. Contains secrets; never published.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CryptogramTableDoc {
    pub format: String,
    pub session_id: String,
    pub profile: Profile,
    pub n: u64,
    pub m: u32,
    pub signer_public: String,
    pub signing_key: String,
    pub rows: Vec<CryptogramRowDoc>,
    pub digest: String,
}

impl ContentAddressed for CryptogramTableDoc {
    fn digest_field(&self) -> &str {
        &self.digest
    }
    fn set_digest_field(&mut self, digest: String) {
        self.digest = digest;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRowDoc {
    pub index: u64,
    pub public_key: String,
    pub reconstructed_key: String,
    pub cryptogram: String,
    pub or8_proof: Or8ProofDoc,
    pub key_proof: SchnorrProofDoc,
    pub encoding_proof: EncodingKnowledgeProofDoc,
}

/// Wire format of the fairness auditing table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessAuditTableDoc {
    pub format: String,
    pub session_id: String,
    pub audit_session_id: String,
    pub profile: Profile,
    pub n: u64,
    pub m: u32,
    pub signer_public: String,
    pub rows: Vec<AuditRowDoc>,
    pub declared_counts: Option<[u64; 8]>,
    pub signature: TableSignatureDoc,
    pub digest: String,
}

impl ContentAddressed for FairnessAuditTableDoc {
    fn digest_field(&self) -> &str {
        &self.digest
    }
    fn set_digest_field(&mut self, digest: String) {
        self.digest = digest;
    }
}

impl CryptogramTable {
    pub fn to_doc(&self, params: &GroupParams) -> CryptogramTableDoc {
        CryptogramTableDoc {
            format: CRYPTOGRAM_TABLE_FORMAT.to_string(),
            session_id: self.session_id.clone(),
            profile: self.profile,
            n: self.n,
            m: self.m,
            signer_public: params.element_hex(&self.signer_public),
            signing_key: params.scalar_hex(&self.signing_key),
            rows: self
                .rows
                .iter()
                .map(|row| CryptogramRowDoc {
                    index: row.index,
                    public_key: params.element_hex(&row.public_key),
                    reconstructed_key: params.element_hex(&row.reconstructed_key),
                    private_key: params.scalar_hex(&row.private_key),
                    key_proof: row.key_proof.to_doc(params),
                    candidates: row
                        .candidates
                        .iter()
                        .map(|c| CryptogramCandidateDoc {
                            cryptogram: params.element_hex(&c.cryptogram),
                            proof: c.proof.to_doc(params),
                        })
                        .collect(),
                })
                .collect(),
            digest: String::new(),
        }
    }

    pub fn from_doc(params: &GroupParams, doc: &CryptogramTableDoc) -> Result<Self, ProverError> {
        if doc.format != CRYPTOGRAM_TABLE_FORMAT {
            return Err(ProverError::BadFormat(doc.format.clone()));
        }
        Ok(CryptogramTable {
            session_id: doc.session_id.clone(),
            profile: doc.profile,
            n: doc.n,
            m: doc.m,
            signing_key: params.scalar_from_hex(&doc.signing_key)?,
            signer_public: params.element_from_hex(&doc.signer_public)?,
            rows: doc
                .rows
                .iter()
                .map(|row| {
                    Ok(CryptogramRow {
                        index: row.index,
                        public_key: params.element_from_hex(&row.public_key)?,
                        reconstructed_key: params.element_from_hex(&row.reconstructed_key)?,
                        private_key: params.scalar_from_hex(&row.private_key)?,
                        key_proof: SchnorrProof::from_doc(params, &row.key_proof)?,
                        candidates: row
                            .candidates
                            .iter()
                            .map(|c| {
                                Ok(CryptogramCandidate {
                                    cryptogram: params.element_from_hex(&c.cryptogram)?,
                                    proof: Or8Proof::from_doc(params, &c.proof)?,
                                })
                            })
                            .collect::<Result<Vec<_>, ProverError>>()?,
                    })
                })
                .collect::<Result<Vec<_>, ProverError>>()?,
        })
    }

    pub fn save(&self, params: &GroupParams, path: &std::path::Path) -> Result<(), ProverError> {
        codec::write_sealed(path, self.to_doc(params))?;
        Ok(())
    }

    /// Loads the local store; group parameters are derived from the stored
    /// profile id and the content digest is re-checked.
    pub fn load(path: &std::path::Path) -> Result<(GroupParams, CryptogramTable), ProverError> {
        let doc: CryptogramTableDoc = codec::read_sealed(path)?;
        let params = setup_group(doc.profile)?;
        let table = CryptogramTable::from_doc(&params, &doc)?;
        Ok((params, table))
    }
}

impl FairnessAuditTable {
    fn body(&self) -> AuditTableBody {
        AuditTableBody {
            session_id: self.session_id.clone(),
            audit_session_id: self.audit_session_id.clone(),
            profile: self.profile,
            n: self.n,
            m: self.m,
            signer_public: self.signer_public.clone(),
            rows: self.rows.clone(),
            declared_counts: self.declared_counts.clone(),
        }
    }

    pub fn to_doc(&self, params: &GroupParams) -> FairnessAuditTableDoc {
        self.body().doc(params, self.signature.to_doc(params))
    }

    pub fn from_doc(
        params: &GroupParams,
        doc: &FairnessAuditTableDoc,
    ) -> Result<Self, ProverError> {
        if doc.format != AUDIT_TABLE_FORMAT {
            return Err(ProverError::BadFormat(doc.format.clone()));
        }
        Ok(FairnessAuditTable {
            session_id: doc.session_id.clone(),
            audit_session_id: doc.audit_session_id.clone(),
            profile: doc.profile,
            n: doc.n,
            m: doc.m,
            signer_public: params.element_from_hex(&doc.signer_public)?,
            rows: doc
                .rows
                .iter()
                .map(|row| {
                    Ok(AuditRow {
                        index: row.index,
                        public_key: params.element_from_hex(&row.public_key)?,
                        reconstructed_key: params.element_from_hex(&row.reconstructed_key)?,
                        cryptogram: params.element_from_hex(&row.cryptogram)?,
                        or8_proof: Or8Proof::from_doc(params, &row.or8_proof)?,
                        key_proof: SchnorrProof::from_doc(params, &row.key_proof)?,
                        encoding_proof: EncodingKnowledgeProof::from_doc(
                            params,
                            &row.encoding_proof,
                        )?,
                    })
                })
                .collect::<Result<Vec<_>, ProverError>>()?,
            declared_counts: doc.declared_counts.map(PermutationCounts::new),
            signature: TableSignature::from_doc(params, &doc.signature)?,
        })
    }

    /// The digest the table signature commits to: canonical bytes of the
    /// document with the signature and digest fields blanked.
    pub fn signing_digest(&self, params: &GroupParams) -> Result<[u8; 32], ProverError> {
        self.body().signing_digest(params)
    }

    pub fn save(&self, params: &GroupParams, path: &std::path::Path) -> Result<(), ProverError> {
        codec::write_sealed(path, self.to_doc(params))?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<(GroupParams, FairnessAuditTable), ProverError> {
        let doc: FairnessAuditTableDoc = codec::read_sealed(path)?;
        let params = setup_group(doc.profile)?;
        let table = FairnessAuditTable::from_doc(&params, &doc)?;
        Ok((params, table))
    }
}
