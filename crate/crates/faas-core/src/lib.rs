//! Privacy-preserving, universally verifiable fairness auditing.
//!
//! An ML system proves group-fairness properties of its predictions without
//! revealing per-sample data: each test sample's (protected-group membership,
//! actual label, predicted label) triple is published only as a cryptogram
//! with zero-knowledge well-formedness proofs. An auditor verifies the proofs,
//! multiplies the cryptograms so that pairwise keys cancel, recovers the
//! per-permutation tallies, and computes fairness metrics. Everything is
//! published on an append-only, hash-chained fairness board so that any third
//! party can re-run the verification from public data alone.
//!
//! Modules map onto the protocol roles:
//!
//! * [`group`] — prime-order group abstraction (production / test / toy profiles),
//! * [`zkp`] — Schnorr, 1-out-of-8 disjunctive Chaum-Pedersen, table signatures,
//! * [`prover`] — ML-system side: cryptogram table and fairness auditing table,
//! * [`auditor`] — verification, homomorphic tally, fairness metrics,
//! * [`board`] — the public fairness board (store, HTTP API, universal verifier),
//! * [`samples`] / [`bench`] — dataset plumbing and the benchmark harness.

pub mod auditor;
pub mod bench;
pub mod board;
pub mod codec;
pub mod group;
pub mod prover;
pub mod samples;
pub mod zkp;

pub use auditor::{
    brute_force_tally, compute_components, compute_metrics, homomorphic_product,
    search_space_size, verify_audit_table, verify_declared_counts, FairnessComponents,
    FairnessReport, MetricMode, PermutationCounts, TallyPolicy, VerificationReport,
};
pub use group::{setup_group, GroupElement, GroupParams, Profile, Scalar};
pub use prover::{
    build_audit_table, build_cryptogram_table, declare_counts, encode_sample,
    exponent_for_permutation, generate_keypairs, reconstructed_keys, smallest_m, CryptogramTable,
    FairnessAuditTable, LabeledSample, PermutationIndex,
};
