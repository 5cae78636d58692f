//! Auditor side: verify a fairness auditing table, recover the permutation
//! tallies from the homomorphic cryptogram product, and compute fairness
//! metrics.
//!
//! Multiplying the selected cryptograms cancels every R_i^(x_i) pair, leaving
//! g^(sum p_i) where the exponent is the base-2^m digit vector
//! a*2^0 + b*2^m + ... + h*2^(7m) of the eight permutation counts. Counts are
//! recovered either by checking a declared vector against the product or, at
//! small n, by exhaustive search over all compositions of n into 8 parts.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::ContentAddressed;
use crate::group::{GroupElement, GroupParams};
use crate::prover::{FairnessAuditTable, ProverError};
use crate::zkp::{
    or8_verify_with_lattice, schnorr_verify, verify_encoding_knowledge, verify_table_signature,
    Or8Purpose, Or8Statement, PermutationLattice, ProofContext,
};

pub const VERIFICATION_REPORT_FORMAT: &str = "faas.verification-report.v1";
pub const FAIRNESS_REPORT_FORMAT: &str = "faas.fairness-report.v1";

#[derive(Debug, thiserror::Error)]
pub enum AuditorError {
    #[error("table has no rows")]
    EmptyTable,
    #[error("counts are invalid: {0}")]
    InvalidCounts(String),
    #[error("search space {space} exceeds tally budget {budget}")]
    BudgetExceeded { space: BigUint, budget: u64 },
    #[error("no count vector matches the cryptogram product; table is malformed")]
    NoMatch,
    #[error("cannot compute components for an empty sample set")]
    ZeroSamples,
    #[error(transparent)]
    Prover(#[from] ProverError),
}

/// The eight permutation tallies (a..h for permutations #1..#8).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationCounts([u64; 8]);

impl PermutationCounts {
    pub fn new(counts: [u64; 8]) -> Self {
        PermutationCounts(counts)
    }

    pub fn as_array(&self) -> &[u64; 8] {
        &self.0
    }

    /// Count for permutation k, 1-based.
    pub fn get(&self, k: u8) -> u64 {
        self.0[k as usize - 1]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// The tally exponent sum_k counts_k * 2^((k-1)m).
    pub fn tally_exponent(&self, m: u32) -> BigUint {
        let mut total = BigUint::zero();
        for (idx, &count) in self.0.iter().enumerate() {
            total += BigUint::from(count) << (idx as u32 * m);
        }
        total
    }
}

/// Per-row verification flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowChecks {
    pub key_proof_ok: bool,
    pub or8_ok: bool,
    pub encoding_proof_ok: bool,
}

/// Outcome of the full table verification; `overall` is the conjunction of
/// every other flag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub signature_ok: bool,
    pub reconstructed_keys_ok: bool,
    pub rows: Vec<RowChecks>,
    pub counts_ok: bool,
    pub overall: bool,
}

/// How the auditor resolves permutation counts: exhaustive search is used
/// only while the composition count C(n+7,7) stays within budget, otherwise
/// a declared count vector is required.
#[derive(Debug, Clone, Copy)]
pub struct TallyPolicy {
    pub budget: u64,
}

impl Default for TallyPolicy {
    fn default() -> Self {
        TallyPolicy { budget: 10_000_000 }
    }
}

/// Verifies signature, reconstructed keys, all per-row proofs and the count
/// declaration (or brute-force tally at small n).
pub fn verify_audit_table(
    params: &GroupParams,
    table: &FairnessAuditTable,
    policy: &TallyPolicy,
) -> VerificationReport {
    verify_audit_table_with_counts(params, table, policy).0
}

/// Verification plus the resolved counts when the table verifies far enough
/// to trust them.
pub fn verify_audit_table_with_counts(
    params: &GroupParams,
    table: &FairnessAuditTable,
    policy: &TallyPolicy,
) -> (VerificationReport, Option<PermutationCounts>) {
    let signature_ok = match table.signing_digest(params) {
        Ok(digest) => {
            verify_table_signature(params, &table.signer_public, &digest, &table.signature)
        }
        Err(_) => false,
    };

    // Reconstructed keys are an order-dependent function of the public keys.
    let publics: Vec<GroupElement> = table.rows.iter().map(|r| r.public_key.clone()).collect();
    let reconstructed_keys_ok = match crate::prover::reconstructed_keys(params, &publics) {
        Ok(recon) => table
            .rows
            .iter()
            .zip(&recon)
            .all(|(row, expect)| &row.reconstructed_key == expect),
        Err(_) => false,
    };

    let lattice = PermutationLattice::new(params, table.m);
    let rows: Vec<RowChecks> = table
        .rows
        .par_iter()
        .map(|row| {
            let ctx = ProofContext {
                session_id: &table.session_id,
                n: table.n,
                m: table.m,
                row_index: row.index,
            };
            let statement = Or8Statement {
                public_key: &row.public_key,
                reconstructed_key: &row.reconstructed_key,
                cryptogram: &row.cryptogram,
            };
            RowChecks {
                key_proof_ok: schnorr_verify(params, &row.public_key, &row.key_proof, &ctx),
                or8_ok: or8_verify_with_lattice(
                    params,
                    &statement,
                    &row.or8_proof,
                    &lattice,
                    &ctx,
                    Or8Purpose::CandidateWellFormed,
                ),
                encoding_proof_ok: verify_encoding_knowledge(
                    params,
                    &statement,
                    &row.encoding_proof,
                    &lattice,
                    &table.audit_session_id,
                    table.n,
                    row.index,
                ),
            }
        })
        .collect();

    let (counts_ok, counts) = match resolve_counts(params, table, policy) {
        Ok(counts) => (true, Some(counts)),
        Err(_) => (false, None),
    };

    let overall = signature_ok
        && reconstructed_keys_ok
        && counts_ok
        && rows
            .iter()
            .all(|r| r.key_proof_ok && r.or8_ok && r.encoding_proof_ok);
    (
        VerificationReport {
            signature_ok,
            reconstructed_keys_ok,
            rows,
            counts_ok,
            overall,
        },
        counts,
    )
}

/// Obtains the permutation counts for a table: a declared vector is checked
/// against the homomorphic product; absent a declaration, the product is
/// brute-forced while the search space fits the budget.
pub fn resolve_counts(
    params: &GroupParams,
    table: &FairnessAuditTable,
    policy: &TallyPolicy,
) -> Result<PermutationCounts, AuditorError> {
    let product = homomorphic_product(params, table)?;
    match &table.declared_counts {
        Some(declared) => {
            if verify_declared_counts(params, &product, declared, table.n, table.m) {
                Ok(declared.clone())
            } else {
                Err(AuditorError::InvalidCounts(
                    "declared counts do not match the cryptogram product".into(),
                ))
            }
        }
        None => brute_force_tally(params, &product, table.n, table.m, policy.budget),
    }
}

/// prod_i C_i; with honest tables this equals g^(sum_i p_i) because the
/// R_i^(x_i) factors cancel.
pub fn homomorphic_product(
    params: &GroupParams,
    table: &FairnessAuditTable,
) -> Result<GroupElement, AuditorError> {
    if table.rows.is_empty() {
        return Err(AuditorError::EmptyTable);
    }
    Ok(table.rows.iter().fold(params.identity(), |acc, row| {
        params.group_mul(&acc, &row.cryptogram)
    }))
}

/// True iff the counts sum to n and g^(tally exponent) equals the product.
pub fn verify_declared_counts(
    params: &GroupParams,
    product: &GroupElement,
    counts: &PermutationCounts,
    n: u64,
    m: u32,
) -> bool {
    if counts.total() != n {
        return false;
    }
    let expected = params.exp_biguint(&params.generator(), &counts.tally_exponent(m));
    &expected == product
}

/// Number of count vectors to search: C(n+7, 7).
pub fn search_space_size(n: u64) -> BigUint {
    let mut numerator = BigUint::one();
    for i in 1..=7u64 {
        numerator *= BigUint::from(n + i);
    }
    numerator / BigUint::from(5040u64)
}

/// log2 of the search space, for budget decisions and reporting.
pub fn search_space_log2(n: u64) -> f64 {
    let size = search_space_size(n);
    let bits = size.bits();
    if bits <= 53 {
        (size.to_u64().unwrap_or(1) as f64).log2()
    } else {
        // Take the top 53 bits for the mantissa and add the shifted-off bits.
        let shift = bits - 53;
        let top: BigUint = size >> shift;
        (top.to_u64().unwrap_or(1) as f64).log2() + shift as f64
    }
}

/// Exhaustive search over all compositions of n into eight counts, matching
/// g^(tally exponent) against the product. Uniqueness of the answer follows
/// from n < 2^m: the exponent is a base-2^m number whose digits are the
/// counts.
pub fn brute_force_tally(
    params: &GroupParams,
    product: &GroupElement,
    n: u64,
    m: u32,
    budget: u64,
) -> Result<PermutationCounts, AuditorError> {
    let space = search_space_size(n);
    if space > BigUint::from(budget) {
        return Err(AuditorError::BudgetExceeded { space, budget });
    }

    // pows[k][t] = g^(t * 2^(k*m)) for t in 0..=n, so each enumeration step
    // is one table lookup and one multiplication.
    let g = params.generator();
    let pows: Vec<Vec<GroupElement>> = (0..8u32)
        .map(|k| {
            let step = params.exp_biguint(&g, &(BigUint::one() << (k * m)));
            let mut row = Vec::with_capacity(n as usize + 1);
            row.push(params.identity());
            for t in 1..=n as usize {
                let prev = &row[t - 1];
                row.push(params.group_mul(prev, &step));
            }
            row
        })
        .collect();

    fn recurse(
        params: &GroupParams,
        pows: &[Vec<GroupElement>],
        product: &GroupElement,
        partial: &GroupElement,
        depth: usize,
        remaining: u64,
        counts: &mut [u64; 8],
    ) -> Option<[u64; 8]> {
        if depth == 7 {
            counts[7] = remaining;
            let candidate = params.group_mul(partial, &pows[7][remaining as usize]);
            if &candidate == product {
                return Some(*counts);
            }
            return None;
        }
        for c in 0..=remaining {
            counts[depth] = c;
            let next = params.group_mul(partial, &pows[depth][c as usize]);
            if let Some(found) = recurse(
                params,
                pows,
                product,
                &next,
                depth + 1,
                remaining - c,
                counts,
            ) {
                return Some(found);
            }
        }
        None
    }

    let mut counts = [0u64; 8];
    recurse(
        params,
        &pows,
        product,
        &params.identity(),
        0,
        n,
        &mut counts,
    )
    .map(PermutationCounts::new)
    .ok_or(AuditorError::NoMatch)
}

// ---------------------------------------------------------------------------
// Fairness metrics
// ---------------------------------------------------------------------------

/// How metric denominators are formed.
///
/// `Joint` divides every component by n, reproducing the published
/// computation table exactly; the six components are then joint rather than
/// conditional probabilities, but the n factors cancel inside each ratio.
/// `Conditional` divides by the matching group/label base instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricMode {
    Joint,
    Conditional,
}

impl MetricMode {
    pub fn id(&self) -> &'static str {
        match self {
            MetricMode::Joint => "joint",
            MetricMode::Conditional => "conditional",
        }
    }
}

impl std::str::FromStr for MetricMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "joint" => Ok(MetricMode::Joint),
            "conditional" => Ok(MetricMode::Conditional),
            other => Err(format!("unknown metric mode `{other}`")),
        }
    }
}

/// An exact component ratio plus its float value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentValue {
    pub numerator: u64,
    pub denominator: u64,
    pub value: Option<f64>,
}

impl ComponentValue {
    fn new(numerator: u64, denominator: u64) -> Self {
        ComponentValue {
            numerator,
            denominator,
            value: (denominator != 0).then(|| numerator as f64 / denominator as f64),
        }
    }
}

/// The six positive-prediction components, each counted over n:
/// permutations (#2,#4), (#6,#8), #2, #6, #4, #8 respectively.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessComponents {
    pub pred_pos_a0: ComponentValue,
    pub pred_pos_a1: ComponentValue,
    pub pred_pos_a0_y0: ComponentValue,
    pub pred_pos_a1_y0: ComponentValue,
    pub pred_pos_a0_y1: ComponentValue,
    pub pred_pos_a1_y1: ComponentValue,
}

/// The six component rows over denominator n.
pub fn compute_components(
    counts: &PermutationCounts,
    n: u64,
) -> Result<FairnessComponents, AuditorError> {
    if n == 0 {
        return Err(AuditorError::ZeroSamples);
    }
    if counts.total() != n {
        return Err(AuditorError::InvalidCounts(format!(
            "counts sum to {}, expected n = {n}",
            counts.total()
        )));
    }
    Ok(components_unchecked(counts, n))
}

fn components_unchecked(counts: &PermutationCounts, n: u64) -> FairnessComponents {
    let c = |k: u8| counts.get(k);
    FairnessComponents {
        pred_pos_a0: ComponentValue::new(c(2) + c(4), n),
        pred_pos_a1: ComponentValue::new(c(6) + c(8), n),
        pred_pos_a0_y0: ComponentValue::new(c(2), n),
        pred_pos_a1_y0: ComponentValue::new(c(6), n),
        pred_pos_a0_y1: ComponentValue::new(c(4), n),
        pred_pos_a1_y1: ComponentValue::new(c(8), n),
    }
}

/// A fairness ratio: exact rational (reduced) plus float, with an undefined
/// flag instead of a division failure whenever a denominator is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub numerator: u64,
    pub denominator: u64,
    pub value: Option<f64>,
    pub undefined: bool,
}

impl MetricValue {
    /// Ratio of two probabilities p = p_num/p_den and q = q_num/q_den.
    /// Undefined when either probability has a zero denominator or the
    /// divisor probability is zero (0/0 and x/0 are data, not errors).
    fn ratio(p_num: u64, p_den: u64, q_num: u64, q_den: u64) -> Self {
        let undefined = p_den == 0 || q_den == 0 || q_num == 0;
        if undefined {
            return MetricValue {
                numerator: 0,
                denominator: 0,
                value: None,
                undefined: true,
            };
        }
        let raw_num = (p_num as u128) * (q_den as u128);
        let raw_den = (p_den as u128) * (q_num as u128);
        let d = gcd(raw_num, raw_den);
        let numerator = (raw_num / d) as u64;
        let denominator = (raw_den / d) as u64;
        MetricValue {
            numerator,
            denominator,
            value: Some(numerator as f64 / denominator as f64),
            undefined: false,
        }
    }
}

fn gcd(a: u128, b: u128) -> u128 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Fairness report: demographic-parity and equalized-odds ratios (A=0 over
/// A=1 orientation), the equal-opportunity ratio, the components they were
/// formed from, and per-metric undefined flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessReport {
    pub mode: MetricMode,
    pub n: u64,
    pub counts: PermutationCounts,
    pub components: FairnessComponents,
    pub dp: MetricValue,
    pub eod_y0: MetricValue,
    pub eod_y1: MetricValue,
    pub eop: MetricValue,
}

/// Computes all metrics from the counts. Undefined denominators set flags
/// and never fail.
pub fn compute_metrics(counts: &PermutationCounts, n: u64, mode: MetricMode) -> FairnessReport {
    let c = |k: u8| counts.get(k);
    let components = components_unchecked(counts, n);

    let (dp, eod_y0, eod_y1) = match mode {
        MetricMode::Joint => (
            MetricValue::ratio(c(2) + c(4), n, c(6) + c(8), n),
            MetricValue::ratio(c(2), n, c(6), n),
            MetricValue::ratio(c(4), n, c(8), n),
        ),
        MetricMode::Conditional => {
            let a0 = c(1) + c(2) + c(3) + c(4);
            let a1 = c(5) + c(6) + c(7) + c(8);
            (
                MetricValue::ratio(c(2) + c(4), a0, c(6) + c(8), a1),
                MetricValue::ratio(c(2), c(1) + c(2), c(6), c(5) + c(6)),
                MetricValue::ratio(c(4), c(3) + c(4), c(8), c(7) + c(8)),
            )
        }
    };
    let eop = eod_y1.clone();

    FairnessReport {
        mode,
        n,
        counts: counts.clone(),
        components,
        dp,
        eod_y0,
        eod_y1,
        eop,
    }
}

// ---------------------------------------------------------------------------
// Wire forms
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReportDoc {
    pub format: String,
    pub table_digest: String,
    pub signature_ok: bool,
    pub reconstructed_keys_ok: bool,
    pub rows: Vec<RowChecks>,
    pub counts_ok: bool,
    pub overall: bool,
    pub digest: String,
}

impl ContentAddressed for VerificationReportDoc {
    fn digest_field(&self) -> &str {
        &self.digest
    }
    fn set_digest_field(&mut self, digest: String) {
        self.digest = digest;
    }
}

impl VerificationReport {
    pub fn to_doc(&self, table_digest: &str) -> VerificationReportDoc {
        VerificationReportDoc {
            format: VERIFICATION_REPORT_FORMAT.to_string(),
            table_digest: table_digest.to_string(),
            signature_ok: self.signature_ok,
            reconstructed_keys_ok: self.reconstructed_keys_ok,
            rows: self.rows.clone(),
            counts_ok: self.counts_ok,
            overall: self.overall,
            digest: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessReportDoc {
    pub format: String,
    pub table_digest: String,
    pub mode: MetricMode,
    pub n: u64,
    pub counts: [u64; 8],
    pub components: FairnessComponents,
    pub dp: MetricValue,
    pub eod_y0: MetricValue,
    pub eod_y1: MetricValue,
    pub eop: MetricValue,
    pub digest: String,
}

impl ContentAddressed for FairnessReportDoc {
    fn digest_field(&self) -> &str {
        &self.digest
    }
    fn set_digest_field(&mut self, digest: String) {
        self.digest = digest;
    }
}

impl FairnessReport {
    pub fn to_doc(&self, table_digest: &str) -> FairnessReportDoc {
        FairnessReportDoc {
            format: FAIRNESS_REPORT_FORMAT.to_string(),
            table_digest: table_digest.to_string(),
            mode: self.mode,
            n: self.n,
            counts: *self.counts.as_array(),
            components: self.components.clone(),
            dp: self.dp.clone(),
            eod_y0: self.eod_y0.clone(),
            eod_y1: self.eod_y1.clone(),
            eop: self.eop.clone(),
            digest: String::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{setup_group, Profile};
    use crate::prover::{build_audit_table, build_cryptogram_table, LabeledSample};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn test_params() -> GroupParams {
        setup_group(Profile::Test).unwrap()
    }

    fn build_table(
        params: &GroupParams,
        samples: &[LabeledSample],
        declare: bool,
        seed: u64,
    ) -> FairnessAuditTable {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let ct = build_cryptogram_table(params, samples.len() as u64, "s1", &mut rng).unwrap();
        build_audit_table(params, &ct, samples, "a1", declare, &mut rng).unwrap()
    }

    fn counts(v: [u64; 8]) -> PermutationCounts {
        PermutationCounts::new(v)
    }

    #[test]
    fn homomorphic_product_matches_exponent_oracle() {
        let params = test_params();
        // Two #1 samples and one #8 sample with n = 3 (m = 2): the product
        // exponent is 2*2^0 + 1*2^14 = 16386.
        let samples = vec![
            LabeledSample::new(false, false, false),
            LabeledSample::new(false, false, false),
            LabeledSample::new(true, true, true),
        ];
        let table = build_table(&params, &samples, true, 1);
        assert_eq!(table.m, 2);
        let product = homomorphic_product(&params, &table).unwrap();
        let expect = params.exp_biguint(&params.generator(), &BigUint::from(16386u32));
        assert_eq!(product, expect);

        // Single row, permutation #1: R_1 is the identity so C_1 = g.
        let one = build_table(&params, &[LabeledSample::new(false, false, false)], true, 2);
        let product = homomorphic_product(&params, &one).unwrap();
        assert_eq!(product, params.generator());
    }

    #[test]
    fn homomorphic_product_is_order_independent() {
        let params = test_params();
        let samples = vec![
            LabeledSample::new(false, true, false),
            LabeledSample::new(true, false, true),
            LabeledSample::new(false, false, true),
        ];
        let table = build_table(&params, &samples, true, 3);
        let forward = homomorphic_product(&params, &table).unwrap();
        let mut reversed = table.clone();
        reversed.rows.reverse();
        assert_eq!(homomorphic_product(&params, &reversed).unwrap(), forward);
    }

    #[test]
    fn declared_counts_check_examples() {
        let params = test_params();
        let samples = vec![
            LabeledSample::new(false, false, false),
            LabeledSample::new(false, false, true),
            LabeledSample::new(false, false, true),
        ];
        let table = build_table(&params, &samples, true, 4);
        let product = homomorphic_product(&params, &table).unwrap();
        let honest = counts([1, 2, 0, 0, 0, 0, 0, 0]);
        assert!(verify_declared_counts(
            &params, &product, &honest, 3, table.m
        ));

        // #1 and #2 swapped (unequal counts) must fail.
        let swapped = counts([2, 1, 0, 0, 0, 0, 0, 0]);
        assert!(!verify_declared_counts(
            &params, &product, &swapped, 3, table.m
        ));

        // Counts summing to n-1 are rejected before any group math.
        let short = counts([1, 1, 0, 0, 0, 0, 0, 0]);
        assert!(!verify_declared_counts(
            &params, &product, &short, 3, table.m
        ));
    }

    #[test]
    fn brute_force_tally_recovers_counts() {
        let params = test_params();
        // n = 2, m = 2, one #1 and one #8: exponent 2^14 + 1.
        let exponent = BigUint::from((1u32 << 14) + 1);
        let product = params.exp_biguint(&params.generator(), &exponent);
        let found = brute_force_tally(&params, &product, 2, 2, 1_000_000).unwrap();
        assert_eq!(found.as_array(), &[1, 0, 0, 0, 0, 0, 0, 1]);

        // n = 1: eight candidates, exactly one matches.
        let product = params.exp_biguint(&params.generator(), &BigUint::from(1u32 << 6));
        let found = brute_force_tally(&params, &product, 1, 2, 1_000_000).unwrap();
        assert_eq!(found.as_array(), &[0, 0, 0, 1, 0, 0, 0, 0]);
    }

    #[test]
    fn brute_force_tally_detects_unreachable_products() {
        let params = test_params();
        // g^3 with n = 2, m = 2: 3 = 1 + 2 but 2 is not a permutation
        // exponent, so no composition reaches it.
        let product = params.exp_biguint(&params.generator(), &BigUint::from(3u32));
        assert!(matches!(
            brute_force_tally(&params, &product, 2, 2, 1_000_000),
            Err(AuditorError::NoMatch)
        ));
    }

    #[test]
    fn brute_force_tally_respects_budget() {
        let params = test_params();
        let product = params.generator();
        assert!(matches!(
            brute_force_tally(&params, &product, 100, 7, 1000),
            Err(AuditorError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn search_space_size_known_values() {
        assert_eq!(search_space_size(0), BigUint::one());
        assert_eq!(search_space_size(1), BigUint::from(8u32));
        assert_eq!(search_space_size(2), BigUint::from(36u32));
        let log2 = search_space_log2(3166);
        assert!((68.5..=69.5).contains(&log2), "log2 = {log2}");
    }

    #[test]
    fn verify_accepts_honest_tables() {
        let params = test_params();
        let samples = vec![
            LabeledSample::new(false, false, true),
            LabeledSample::new(true, true, true),
            LabeledSample::new(false, true, false),
            LabeledSample::new(true, false, false),
        ];
        let table = build_table(&params, &samples, true, 5);
        let (report, resolved) =
            verify_audit_table_with_counts(&params, &table, &TallyPolicy::default());
        assert!(report.overall, "{report:?}");
        assert_eq!(
            resolved.unwrap().as_array(),
            crate::prover::declare_counts(&samples).as_array()
        );
    }

    #[test]
    fn verify_flags_shifted_cryptogram_row() {
        let params = test_params();
        let samples = vec![
            LabeledSample::new(false, false, false),
            LabeledSample::new(true, false, true),
            LabeledSample::new(false, true, true),
        ];
        let mut table = build_table(&params, &samples, true, 6);
        table.rows[1].cryptogram =
            params.group_mul(&table.rows[1].cryptogram, &params.generator());
        let report = verify_audit_table(&params, &table, &TallyPolicy::default());
        assert!(!report.rows[1].or8_ok);
        assert!(report.rows[0].or8_ok);
        assert!(!report.overall);
    }

    #[test]
    fn verify_flags_swapped_rows_via_reconstructed_keys() {
        let params = test_params();
        let samples = vec![
            LabeledSample::new(false, false, false),
            LabeledSample::new(true, false, true),
            LabeledSample::new(false, true, true),
            LabeledSample::new(true, true, false),
        ];
        let mut table = build_table(&params, &samples, true, 7);
        table.rows.swap(1, 2);
        let report = verify_audit_table(&params, &table, &TallyPolicy::default());
        assert!(!report.reconstructed_keys_ok);
        assert!(!report.overall);
    }

    #[test]
    fn verify_without_declaration_brute_forces_small_tables() {
        let params = test_params();
        let samples = vec![
            LabeledSample::new(true, true, true),
            LabeledSample::new(false, false, false),
        ];
        let table = build_table(&params, &samples, false, 8);
        assert!(table.declared_counts.is_none());
        let (report, resolved) =
            verify_audit_table_with_counts(&params, &table, &TallyPolicy::default());
        assert!(report.overall);
        assert_eq!(resolved.unwrap().as_array(), &[1, 0, 0, 0, 0, 0, 0, 1]);
    }

    #[test]
    fn components_match_direct_arithmetic() {
        let uniform = counts([1; 8]);
        let c = compute_components(&uniform, 8).unwrap();
        assert_eq!(c.pred_pos_a0.numerator, 2);
        assert_eq!(c.pred_pos_a0.denominator, 8);
        assert_eq!(c.pred_pos_a0.value, Some(0.25));

        let v = counts([20, 20, 10, 10, 15, 5, 15, 5]);
        let c = compute_components(&v, 100).unwrap();
        assert_eq!(c.pred_pos_a0.value, Some(0.30));
        assert_eq!(c.pred_pos_a1.value, Some(0.10));

        let degenerate = counts([0, 0, 0, 0, 0, 0, 0, 9]);
        let c = compute_components(&degenerate, 9).unwrap();
        assert_eq!(c.pred_pos_a1_y1.value, Some(1.0));

        assert!(matches!(
            compute_components(&counts([0; 8]), 0),
            Err(AuditorError::ZeroSamples)
        ));
        assert!(matches!(
            compute_components(&uniform, 9),
            Err(AuditorError::InvalidCounts(_))
        ));
    }

    #[test]
    fn metrics_symmetric_counts_give_exact_one() {
        let v = counts([10, 5, 10, 15, 10, 5, 10, 15]);
        for mode in [MetricMode::Joint, MetricMode::Conditional] {
            let report = compute_metrics(&v, 80, mode);
            assert_eq!(report.dp.value, Some(1.0), "{mode:?}");
            assert_eq!(report.dp.numerator, report.dp.denominator);
            assert!(!report.dp.undefined);
        }
    }

    #[test]
    fn metrics_joint_mode_examples() {
        let v = counts([20, 20, 10, 10, 15, 5, 15, 5]);
        let report = compute_metrics(&v, 100, MetricMode::Joint);
        // (#2+#4)/(#6+#8) = 30/10.
        assert_eq!(report.dp.value, Some(3.0));
        assert_eq!(report.dp.numerator, 3);
        assert_eq!(report.dp.denominator, 1);
        // #2/#6 = 20/5, #4/#8 = 10/5.
        assert_eq!(report.eod_y0.value, Some(4.0));
        assert_eq!(report.eod_y1.value, Some(2.0));
        assert_eq!(report.eop, report.eod_y1);
    }

    #[test]
    fn metrics_conditional_mode_uses_group_bases() {
        let v = counts([20, 20, 10, 10, 15, 5, 15, 5]);
        let report = compute_metrics(&v, 100, MetricMode::Conditional);
        // Pr(pred|A=0) = 30/60, Pr(pred|A=1) = 10/40 -> ratio 2.
        assert_eq!(report.dp.value, Some(2.0));
        // (20/40) / (5/20) = 2.
        assert_eq!(report.eod_y0.value, Some(2.0));
        // (10/20) / (5/20) = 2.
        assert_eq!(report.eod_y1.value, Some(2.0));
    }

    #[test]
    fn metrics_zero_denominators_set_flags_and_are_monotone() {
        let v = counts([30, 30, 20, 20, 0, 0, 0, 0]);
        let report = compute_metrics(&v, 100, MetricMode::Joint);
        assert!(report.dp.undefined);
        assert!(report.dp.value.is_none());
        assert!(report.eod_y0.undefined);
        assert!(report.eod_y1.undefined);

        // Adding one sample to the empty denominator group clears the flag.
        let v2 = counts([30, 30, 20, 19, 0, 1, 0, 0]);
        let report2 = compute_metrics(&v2, 100, MetricMode::Joint);
        assert!(!report2.dp.undefined);
        assert!(!report2.eod_y0.undefined);
    }

    #[test]
    fn metrics_never_panic_on_any_count_vector() {
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        use rand::Rng;
        for _ in 0..500 {
            let mut v = [0u64; 8];
            for slot in v.iter_mut() {
                *slot = rng.gen_range(0..50);
            }
            let n: u64 = v.iter().sum();
            let pc = counts(v);
            for mode in [MetricMode::Joint, MetricMode::Conditional] {
                let _ = compute_metrics(&pc, n, mode);
            }
        }
    }
}
