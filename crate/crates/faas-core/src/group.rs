//! Prime-order cyclic group abstraction with pluggable backends.
//!
//! Three profiles are provided:
//!
//! * `production` — the ristretto255 prime-order group (order ~2^252),
//! * `test` — a multiplicative subgroup of Z_p^* with a 66-bit order,
//!   small enough that discrete logs up to 2^26 can be recovered by
//!   exhaustive search, large enough that tally exponents never wrap,
//! * `toy` — the order-11 subgroup of Z_23^*, for group-law tests only.
//!
//! All protocol code goes through [`GroupParams`]; nothing outside this
//! module depends on which backend is active.

use curve25519_dalek::ristretto::{CompressedRistretto, RistrettoPoint};
use curve25519_dalek::scalar::Scalar as DalekScalar;
use curve25519_dalek::traits::Identity;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Protocol-wide version tag, bound into every Fiat-Shamir transcript.
pub const PROTOCOL_VERSION: &str = "faas/v1";

/// Test-profile subgroup: q | (p-1), p = 2q + 1, both prime, g = 4 of order q.
/// Generated once with a primality + subgroup-order oracle; re-checked by tests.
const TEST_P: &str = "40000000000003007";
const TEST_Q: &str = "20000000000001803";
const TEST_G: u32 = 4;
/// Largest exponent the test profile will recover by exhaustive search.
const TEST_DLOG_BOUND: u64 = 1 << 26;

const TOY_P: u32 = 23;
const TOY_Q: u32 = 11;
const TOY_G: u32 = 2;

/// Order of the ristretto255 group: 2^252 + 27742317777372353535851937790883648493.
const RISTRETTO_ORDER: &str = "1000000000000000000000000000000014def9dea2f79cd65812631a5cf5d3ed";

#[derive(Debug, thiserror::Error)]
pub enum GroupError {
    #[error("unknown group profile `{0}`")]
    UnknownProfile(String),
    #[error("group parameter self-check failed: {0}")]
    ParamCheck(String),
    #[error("malformed element encoding: {0}")]
    MalformedElement(String),
    #[error("malformed scalar encoding: {0}")]
    MalformedScalar(String),
    #[error("entropy source failed to produce a scalar")]
    Entropy,
    #[error("discrete-log search not supported by profile `{0}`")]
    DlogUnsupported(Profile),
    #[error("discrete-log bound {bound} exceeds profile limit {limit}")]
    DlogBoundExceeded { bound: u64, limit: u64 },
    #[error("no discrete log found within bound {0}")]
    DlogNotFound(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Production,
    Test,
    Toy,
}

impl Profile {
    pub fn id(&self) -> &'static str {
        match self {
            Profile::Production => "production",
            Profile::Test => "test",
            Profile::Toy => "toy",
        }
    }

    pub fn parse(s: &str) -> Result<Profile, GroupError> {
        match s {
            "production" => Ok(Profile::Production),
            "test" => Ok(Profile::Test),
            "toy" => Ok(Profile::Toy),
            other => Err(GroupError::UnknownProfile(other.to_string())),
        }
    }
}

impl std::fmt::Display for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

impl std::str::FromStr for Profile {
    type Err = GroupError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Profile::parse(s)
    }
}

#[derive(Debug, Clone)]
enum Backend {
    /// Subgroup of order q inside Z_p^*, generated by g.
    Mod { p: BigUint, g: BigUint },
    /// ristretto255.
    Ristretto,
}

/// An exponent modulo the group order q. Always reduced: 0 <= value < q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scalar(BigUint);

/// A group element. Compares by value; encodes to fixed-width canonical bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElement(ElementRepr);

#[derive(Debug, Clone, PartialEq, Eq)]
enum ElementRepr {
    Mod(BigUint),
    Point(RistrettoPoint),
}

/// Versioned group description: profile, order, generator, backend.
#[derive(Debug, Clone)]
pub struct GroupParams {
    profile: Profile,
    q: BigUint,
    backend: Backend,
    description: String,
    dlog_bound: u64,
    max_m: u32,
}

/// Deterministic parameters for a profile, self-checked on construction.
pub fn setup_group(profile: Profile) -> Result<GroupParams, GroupError> {
    let params = match profile {
        Profile::Production => GroupParams {
            profile,
            q: BigUint::parse_bytes(RISTRETTO_ORDER.as_bytes(), 16).expect("fixture"),
            backend: Backend::Ristretto,
            description: "ristretto255 prime-order group, 252-bit order".to_string(),
            dlog_bound: 0,
            max_m: 31,
        },
        Profile::Test => GroupParams {
            profile,
            q: BigUint::parse_bytes(TEST_Q.as_bytes(), 16).expect("fixture"),
            backend: Backend::Mod {
                p: BigUint::parse_bytes(TEST_P.as_bytes(), 16).expect("fixture"),
                g: BigUint::from(TEST_G),
            },
            description: format!(
                "order-q subgroup of Z_p^*, p = 2q+1, q 66-bit; dlog searchable to 2^26 (p={TEST_P}, q={TEST_Q}, g={TEST_G})"
            ),
            dlog_bound: TEST_DLOG_BOUND,
            max_m: 8,
        },
        Profile::Toy => GroupParams {
            profile,
            q: BigUint::from(TOY_Q),
            backend: Backend::Mod {
                p: BigUint::from(TOY_P),
                g: BigUint::from(TOY_G),
            },
            description: "order-11 subgroup of Z_23^*; group-law tests only".to_string(),
            dlog_bound: TOY_Q as u64,
            max_m: 0,
        },
    };
    params.self_check()?;
    Ok(params)
}

impl GroupParams {
    fn self_check(&self) -> Result<(), GroupError> {
        let generator = self.generator();
        if generator == self.identity() {
            return Err(GroupError::ParamCheck("generator is the identity".into()));
        }
        if self.exp_biguint(&generator, &self.q) != self.identity() {
            return Err(GroupError::ParamCheck(
                "generator order does not divide q".into(),
            ));
        }
        if let Backend::Mod { p, g } = &self.backend {
            if !((p - BigUint::one()) % &self.q).is_zero() {
                return Err(GroupError::ParamCheck("q does not divide p-1".into()));
            }
            if g >= p || g.is_zero() {
                return Err(GroupError::ParamCheck("generator out of range".into()));
            }
        }
        if self.profile == Profile::Production && self.q.bits() < 250 {
            return Err(GroupError::ParamCheck("production order below 250 bits".into()));
        }
        Ok(())
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    /// The prime order q of the group.
    pub fn order(&self) -> &BigUint {
        &self.q
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Upper bound accepted by [`GroupParams::brute_force_dlog`]; 0 disables it.
    pub fn dlog_bound(&self) -> u64 {
        self.dlog_bound
    }

    /// Largest permutation-exponent width m the profile supports without the
    /// tally sum wrapping modulo q (requires q > 2^(8m)).
    pub fn max_m(&self) -> u32 {
        self.max_m
    }

    pub fn generator(&self) -> GroupElement {
        match &self.backend {
            Backend::Mod { g, .. } => GroupElement(ElementRepr::Mod(g.clone())),
            Backend::Ristretto => GroupElement(ElementRepr::Point(
                curve25519_dalek::constants::RISTRETTO_BASEPOINT_POINT,
            )),
        }
    }

    pub fn identity(&self) -> GroupElement {
        match &self.backend {
            Backend::Mod { .. } => GroupElement(ElementRepr::Mod(BigUint::one())),
            Backend::Ristretto => GroupElement(ElementRepr::Point(RistrettoPoint::identity())),
        }
    }

    /// Fixed canonical element width in bytes for this profile.
    pub fn element_width(&self) -> usize {
        match &self.backend {
            Backend::Mod { p, .. } => ((p.bits() + 7) / 8) as usize,
            Backend::Ristretto => 32,
        }
    }

    /// Fixed canonical scalar width in bytes for this profile.
    pub fn scalar_width(&self) -> usize {
        ((self.q.bits() + 7) / 8) as usize
    }

    pub fn group_exp(&self, base: &GroupElement, e: &Scalar) -> GroupElement {
        self.exp_biguint(base, &e.0)
    }

    /// Exponentiation by an arbitrary non-negative integer (reduced mod q,
    /// which is exact since the group has order q).
    pub fn exp_biguint(&self, base: &GroupElement, e: &BigUint) -> GroupElement {
        let e = e % &self.q;
        match (&self.backend, &base.0) {
            (Backend::Mod { p, .. }, ElementRepr::Mod(b)) => {
                GroupElement(ElementRepr::Mod(b.modpow(&e, p)))
            }
            (Backend::Ristretto, ElementRepr::Point(pt)) => {
                GroupElement(ElementRepr::Point(pt * dalek_scalar(&e)))
            }
            _ => unreachable!("element backend mismatch"),
        }
    }

    pub fn group_mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match (&self.backend, &a.0, &b.0) {
            (Backend::Mod { p, .. }, ElementRepr::Mod(x), ElementRepr::Mod(y)) => {
                GroupElement(ElementRepr::Mod((x * y) % p))
            }
            (Backend::Ristretto, ElementRepr::Point(x), ElementRepr::Point(y)) => {
                GroupElement(ElementRepr::Point(x + y))
            }
            _ => unreachable!("element backend mismatch"),
        }
    }

    pub fn group_div(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.group_mul(a, &self.group_inv(b))
    }

    pub fn group_inv(&self, a: &GroupElement) -> GroupElement {
        match (&self.backend, &a.0) {
            (Backend::Mod { p, .. }, ElementRepr::Mod(x)) => {
                // x^(q-1) inverts x inside the order-q subgroup.
                let exp = &self.q - BigUint::one();
                GroupElement(ElementRepr::Mod(x.modpow(&exp, p)))
            }
            (Backend::Ristretto, ElementRepr::Point(pt)) => GroupElement(ElementRepr::Point(-pt)),
            _ => unreachable!("element backend mismatch"),
        }
    }

    /// Uniform scalar in [1, q-1]; rejection-sampled so 0 is never returned.
    pub fn random_scalar(&self, rng: &mut dyn RngCore) -> Result<Scalar, GroupError> {
        let width = ((self.q.bits() + 7) / 8) as usize;
        let top_bits = (self.q.bits() % 8) as u32;
        for _ in 0..512 {
            let mut buf = vec![0u8; width];
            rng.try_fill_bytes(&mut buf).map_err(|_| GroupError::Entropy)?;
            if top_bits != 0 {
                buf[0] &= (1u16 << top_bits).wrapping_sub(1) as u8;
            }
            let candidate = BigUint::from_bytes_be(&buf);
            if !candidate.is_zero() && candidate < self.q {
                return Ok(Scalar(candidate));
            }
        }
        Err(GroupError::Entropy)
    }

    /// Fiat-Shamir challenge: SHA-256 over the domain-tagged, length-prefixed
    /// part list, reduced mod q. Deterministic; output in [0, q-1].
    pub fn hash_to_scalar(&self, domain_tag: &str, parts: &[&[u8]]) -> Scalar {
        let digest = transcript_digest(domain_tag, parts);
        Scalar(BigUint::from_bytes_be(&digest) % &self.q)
    }

    /// Recovers e with generator^e = target by stepping through 0..=bound.
    pub fn brute_force_dlog(&self, target: &GroupElement, bound: u64) -> Result<u64, GroupError> {
        if self.dlog_bound == 0 {
            return Err(GroupError::DlogUnsupported(self.profile));
        }
        if bound > self.dlog_bound {
            return Err(GroupError::DlogBoundExceeded {
                bound,
                limit: self.dlog_bound,
            });
        }
        let g = self.generator();
        let mut acc = self.identity();
        for e in 0..=bound {
            if &acc == target {
                return Ok(e);
            }
            acc = self.group_mul(&acc, &g);
        }
        Err(GroupError::DlogNotFound(bound))
    }

    /// Canonical fixed-width big-endian encoding (ristretto: compressed point).
    pub fn encode_element(&self, e: &GroupElement) -> Vec<u8> {
        match &e.0 {
            ElementRepr::Mod(x) => {
                let mut bytes = x.to_bytes_be();
                let width = self.element_width();
                let mut out = vec![0u8; width - bytes.len()];
                out.append(&mut bytes);
                out
            }
            ElementRepr::Point(pt) => pt.compress().as_bytes().to_vec(),
        }
    }

    /// Decodes and validates membership in the order-q subgroup.
    pub fn decode_element(&self, bytes: &[u8]) -> Result<GroupElement, GroupError> {
        if bytes.len() != self.element_width() {
            return Err(GroupError::MalformedElement(format!(
                "expected {} bytes, got {}",
                self.element_width(),
                bytes.len()
            )));
        }
        match &self.backend {
            Backend::Mod { p, .. } => {
                let x = BigUint::from_bytes_be(bytes);
                if x.is_zero() || x >= *p {
                    return Err(GroupError::MalformedElement("residue out of range".into()));
                }
                if x.modpow(&self.q, p) != BigUint::one() {
                    return Err(GroupError::MalformedElement(
                        "not in the order-q subgroup".into(),
                    ));
                }
                Ok(GroupElement(ElementRepr::Mod(x)))
            }
            Backend::Ristretto => {
                let arr: [u8; 32] = bytes
                    .try_into()
                    .map_err(|_| GroupError::MalformedElement("bad length".into()))?;
                let pt = CompressedRistretto(arr)
                    .decompress()
                    .ok_or_else(|| GroupError::MalformedElement("invalid point".into()))?;
                Ok(GroupElement(ElementRepr::Point(pt)))
            }
        }
    }

    pub fn element_hex(&self, e: &GroupElement) -> String {
        hex::encode(self.encode_element(e))
    }

    pub fn element_from_hex(&self, s: &str) -> Result<GroupElement, GroupError> {
        let bytes = hex::decode(s)
            .map_err(|e| GroupError::MalformedElement(format!("hex: {e}")))?;
        self.decode_element(&bytes)
    }

    pub fn scalar_from_biguint(&self, v: BigUint) -> Scalar {
        Scalar(v % &self.q)
    }

    pub fn scalar_from_u64(&self, v: u64) -> Scalar {
        Scalar(BigUint::from(v) % &self.q)
    }

    /// Fixed-width big-endian scalar encoding.
    pub fn encode_scalar(&self, s: &Scalar) -> Vec<u8> {
        let mut bytes = s.0.to_bytes_be();
        let width = self.scalar_width();
        let mut out = vec![0u8; width - bytes.len()];
        out.append(&mut bytes);
        out
    }

    pub fn decode_scalar(&self, bytes: &[u8]) -> Result<Scalar, GroupError> {
        if bytes.len() != self.scalar_width() {
            return Err(GroupError::MalformedScalar(format!(
                "expected {} bytes, got {}",
                self.scalar_width(),
                bytes.len()
            )));
        }
        let v = BigUint::from_bytes_be(bytes);
        if v >= self.q {
            return Err(GroupError::MalformedScalar("value not reduced mod q".into()));
        }
        Ok(Scalar(v))
    }

    pub fn scalar_hex(&self, s: &Scalar) -> String {
        hex::encode(self.encode_scalar(s))
    }

    pub fn scalar_from_hex(&self, s: &str) -> Result<Scalar, GroupError> {
        let bytes = hex::decode(s)
            .map_err(|e| GroupError::MalformedScalar(format!("hex: {e}")))?;
        self.decode_scalar(&bytes)
    }

    pub fn scalar_add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        Scalar((&a.0 + &b.0) % &self.q)
    }

    pub fn scalar_sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        if a.0 >= b.0 {
            Scalar((&a.0 - &b.0) % &self.q)
        } else {
            Scalar(&self.q - ((&b.0 - &a.0) % &self.q))
        }
    }

    pub fn scalar_mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        Scalar((&a.0 * &b.0) % &self.q)
    }
}

impl Scalar {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

/// Versioned, content-addressed parameters fixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupParamsDoc {
    pub format: String,
    pub profile: Profile,
    pub description: String,
    pub order: String,
    pub modulus: Option<String>,
    pub generator: Option<String>,
    pub element_width: usize,
    pub dlog_bound: u64,
    pub max_m: u32,
    pub digest: String,
}

pub const GROUP_PARAMS_FORMAT: &str = "faas.group-params.v1";

impl crate::codec::ContentAddressed for GroupParamsDoc {
    fn digest_field(&self) -> &str {
        &self.digest
    }
    fn set_digest_field(&mut self, digest: String) {
        self.digest = digest;
    }
}

impl GroupParams {
    pub fn to_doc(&self) -> GroupParamsDoc {
        let (modulus, generator) = match &self.backend {
            Backend::Mod { p, g } => (Some(p.to_str_radix(16)), Some(g.to_str_radix(16))),
            Backend::Ristretto => (None, None),
        };
        GroupParamsDoc {
            format: GROUP_PARAMS_FORMAT.to_string(),
            profile: self.profile,
            description: self.description.clone(),
            order: self.q.to_str_radix(16),
            modulus,
            generator,
            element_width: self.element_width(),
            dlog_bound: self.dlog_bound,
            max_m: self.max_m,
            digest: String::new(),
        }
    }
}

/// Converts a reduced BigUint exponent into a dalek scalar (little-endian).
fn dalek_scalar(v: &BigUint) -> DalekScalar {
    let mut le = v.to_bytes_le();
    le.resize(32, 0);
    let arr: [u8; 32] = le.try_into().expect("32-byte scalar");
    Option::from(DalekScalar::from_canonical_bytes(arr)).expect("value reduced below group order")
}

/// The domain-tagged, length-prefixed transcript byte stream fed to SHA-256.
/// Length prefixes make the part list prefix-ambiguity-free.
pub fn transcript_bytes(domain_tag: &str, parts: &[&[u8]]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&(domain_tag.len() as u64).to_be_bytes());
    out.extend_from_slice(domain_tag.as_bytes());
    for part in parts {
        out.extend_from_slice(&(part.len() as u64).to_be_bytes());
        out.extend_from_slice(part);
    }
    out
}

pub fn transcript_digest(domain_tag: &str, parts: &[&[u8]]) -> [u8; 32] {
    Sha256::digest(transcript_bytes(domain_tag, parts)).into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    /// Independent modular-arithmetic oracle for the Mod backend.
    fn mod_oracle_exp(base: u64, e: u64, p: u64) -> u64 {
        let mut acc = 1u128;
        let mut b = base as u128 % p as u128;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p as u128;
            }
            b = b * b % p as u128;
            e >>= 1;
        }
        acc as u64
    }

    fn toy_element(params: &GroupParams, residue: u64) -> GroupElement {
        params.decode_element(&[residue as u8]).unwrap()
    }

    #[test]
    fn toy_profile_matches_fixture() {
        let g = setup_group(Profile::Toy).unwrap();
        assert_eq!(g.order(), &BigUint::from(11u32));
        assert_eq!(g.element_width(), 1);
        // 2^11 mod 23 = 1
        assert_eq!(
            g.exp_biguint(&g.generator(), &BigUint::from(11u32)),
            g.identity()
        );
    }

    #[test]
    fn toy_exp_matches_modular_oracle() {
        let g = setup_group(Profile::Toy).unwrap();
        let base = g.generator();
        for e in 0..30u64 {
            let got = g.exp_biguint(&base, &BigUint::from(e));
            let want = toy_element(&g, mod_oracle_exp(2, e, 23));
            assert_eq!(got, want, "2^{e} mod 23");
        }
        // 2^3 mod 23 = 8
        assert_eq!(
            g.group_exp(&base, &g.scalar_from_u64(3)),
            toy_element(&g, 8)
        );
    }

    #[test]
    fn group_laws_hold_on_random_toy_triples() {
        let g = setup_group(Profile::Toy).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for _ in 0..200 {
            let a = g.group_exp(&g.generator(), &g.random_scalar(&mut rng).unwrap());
            let b = g.group_exp(&g.generator(), &g.random_scalar(&mut rng).unwrap());
            let c = g.group_exp(&g.generator(), &g.random_scalar(&mut rng).unwrap());
            assert_eq!(
                g.group_mul(&g.group_mul(&a, &b), &c),
                g.group_mul(&a, &g.group_mul(&b, &c))
            );
            assert_eq!(g.group_mul(&a, &g.identity()), a);
            assert_eq!(g.group_mul(&a, &g.group_inv(&a)), g.identity());
            assert_eq!(g.group_div(&a, &b), g.group_mul(&a, &g.group_inv(&b)));
        }
    }

    #[test]
    fn generator_has_order_q_in_every_profile() {
        for profile in [Profile::Production, Profile::Test, Profile::Toy] {
            let g = setup_group(profile).unwrap();
            let gen = g.generator();
            assert_ne!(gen, g.identity(), "{profile}");
            assert_eq!(g.exp_biguint(&gen, g.order()), g.identity(), "{profile}");
        }
    }

    #[test]
    fn test_profile_fixture_self_checks() {
        let g = setup_group(Profile::Test).unwrap();
        assert!(g.order().bits() >= 65, "q must exceed 2^64");
        assert_eq!(g.dlog_bound(), 1 << 26);
        assert_eq!(g.max_m(), 8);
        // Fixture primality, re-verified by a deterministic Miller-Rabin oracle.
        let q = g.order().clone();
        let p = &q * 2u32 + BigUint::one();
        assert!(miller_rabin(&q), "q prime");
        assert!(miller_rabin(&p), "p prime");
    }

    #[test]
    fn production_profile_has_wide_order() {
        let g = setup_group(Profile::Production).unwrap();
        assert!(g.order().bits() >= 250);
        assert_eq!(g.element_width(), 32);
        assert_eq!(g.dlog_bound(), 0);
        assert!(matches!(
            g.brute_force_dlog(&g.generator(), 8),
            Err(GroupError::DlogUnsupported(_))
        ));
    }

    #[test]
    fn random_scalar_is_in_range_and_covers_toy_residues() {
        let g = setup_group(Profile::Toy).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let mut seen = [false; 11];
        for _ in 0..10_000 {
            let s = g.random_scalar(&mut rng).unwrap();
            let v: u64 = s.value().try_into().unwrap();
            assert!((1..=10).contains(&v), "scalar {v} outside [1, q-1]");
            seen[v as usize] = true;
        }
        assert!(seen[1..=10].iter().all(|&b| b), "all residues 1..=10 occur");
        assert!(!seen[0], "zero must never be returned");
    }

    #[test]
    fn encode_decode_round_trips_bit_exactly() {
        for profile in [Profile::Production, Profile::Test, Profile::Toy] {
            let g = setup_group(profile).unwrap();
            let mut rng = ChaCha20Rng::seed_from_u64(11);
            for _ in 0..50 {
                let e = g.group_exp(&g.generator(), &g.random_scalar(&mut rng).unwrap());
                let bytes = g.encode_element(&e);
                assert_eq!(bytes.len(), g.element_width());
                let back = g.decode_element(&bytes).unwrap();
                assert_eq!(back, e);
                assert_eq!(g.encode_element(&back), bytes);
            }
        }
    }

    #[test]
    fn decode_rejects_non_subgroup_residues() {
        let g = setup_group(Profile::Toy).unwrap();
        // 5 is not a quadratic residue mod 23, so it is outside the order-11 subgroup.
        assert!(g.decode_element(&[5]).is_err());
        assert!(g.decode_element(&[0]).is_err());
        assert!(g.decode_element(&[23]).is_err());
    }

    #[test]
    fn hash_to_scalar_is_deterministic_and_tag_separated() {
        let g = setup_group(Profile::Test).unwrap();
        let a = g.hash_to_scalar("or8", &[b"x", b"y"]);
        let b = g.hash_to_scalar("or8", &[b"x", b"y"]);
        assert_eq!(a, b);
        let c = g.hash_to_scalar("schnorr", &[b"x", b"y"]);
        assert_ne!(a, c, "distinct tags must give distinct challenges");
        let d = g.hash_to_scalar("or8", &[b"y", b"x"]);
        assert_ne!(a, d, "reordering parts must change the challenge");
    }

    #[test]
    fn transcript_stream_is_prefix_ambiguity_free() {
        assert_ne!(
            transcript_bytes("t", &[b"ab", b"c"]),
            transcript_bytes("t", &[b"a", b"bc"])
        );
        assert_ne!(
            transcript_bytes("t", &[b"ab"]),
            transcript_bytes("t", &[b"ab", b""])
        );
        assert_ne!(transcript_bytes("ta", &[b"b"]), transcript_bytes("t", &[b"ab"]));
    }

    #[test]
    fn brute_force_dlog_recovers_small_exponents() {
        let g = setup_group(Profile::Toy).unwrap();
        // 2^7 mod 23 = 13
        let target = toy_element(&g, 13);
        assert_eq!(g.brute_force_dlog(&target, 10).unwrap(), 7);
        assert_eq!(g.brute_force_dlog(&g.identity(), 10).unwrap(), 0);

        let t = setup_group(Profile::Test).unwrap();
        let target = t.exp_biguint(&t.generator(), &BigUint::from(123_456u32));
        assert_eq!(t.brute_force_dlog(&target, 200_000).unwrap(), 123_456);
    }

    #[test]
    fn brute_force_dlog_reports_not_found_and_bad_bounds() {
        let g = setup_group(Profile::Test).unwrap();
        // g^(q-1) is not a power with exponent <= 100.
        let exp = g.order() - BigUint::one();
        let target = g.exp_biguint(&g.generator(), &exp);
        assert!(matches!(
            g.brute_force_dlog(&target, 100),
            Err(GroupError::DlogNotFound(100))
        ));
        assert!(matches!(
            g.brute_force_dlog(&target, u64::MAX),
            Err(GroupError::DlogBoundExceeded { .. })
        ));
    }

    #[test]
    fn scalar_codec_round_trips() {
        let g = setup_group(Profile::Test).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..50 {
            let s = g.random_scalar(&mut rng).unwrap();
            let hexed = g.scalar_hex(&s);
            assert_eq!(g.scalar_from_hex(&hexed).unwrap(), s);
        }
        assert!(g.scalar_from_hex("ff").is_err());
    }

    /// Deterministic Miller-Rabin over the first few prime bases; an
    /// independent primality oracle for the committed fixtures.
    fn miller_rabin(n: &BigUint) -> bool {
        let one = BigUint::one();
        let two = &one + &one;
        if n < &two {
            return false;
        }
        let n_minus_1 = n - &one;
        let s = n_minus_1.trailing_zeros().unwrap_or(0);
        let d = &n_minus_1 >> s;
        'base: for base in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            let b = BigUint::from(base);
            if &b >= n {
                continue;
            }
            let mut x = b.modpow(&d, n);
            if x == one || x == n_minus_1 {
                continue;
            }
            for _ in 0..s.saturating_sub(1) {
                x = x.modpow(&two, n);
                if x == n_minus_1 {
                    continue 'base;
                }
            }
            return false;
        }
        true
    }
}
