//! Canonical document handling.
//!
//! Every artifact that crosses a trust boundary (group parameter fixtures,
//! audit tables, reports, board entries) is a versioned JSON document with
//! fixed field order, lowercase-hex group elements, and a `digest` field
//! holding the SHA-256 of the document serialized with `digest` set to "".

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum CodecError {
    #[error("serialization failed: {0}")]
    Serialize(String),
    #[error("document parse failed: {0}")]
    Parse(String),
    #[error("document digest mismatch: stored {stored}, computed {computed}")]
    DigestMismatch { stored: String, computed: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// A document that carries its own content digest.
pub trait ContentAddressed {
    fn digest_field(&self) -> &str;
    fn set_digest_field(&mut self, digest: String);
}

/// Canonical bytes: compact JSON in struct declaration order.
pub fn canonical_bytes<T: Serialize>(doc: &T) -> Result<Vec<u8>, CodecError> {
    serde_json::to_vec(doc).map_err(|e| CodecError::Serialize(e.to_string()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Digest of the document with its `digest` field blanked.
pub fn content_digest<T: Serialize + ContentAddressed + Clone>(
    doc: &T,
) -> Result<String, CodecError> {
    let mut blank = doc.clone();
    blank.set_digest_field(String::new());
    Ok(sha256_hex(&canonical_bytes(&blank)?))
}

/// Fills in the content digest and returns the sealed document.
pub fn seal<T: Serialize + ContentAddressed + Clone>(mut doc: T) -> Result<T, CodecError> {
    let digest = content_digest(&doc)?;
    doc.set_digest_field(digest);
    Ok(doc)
}

/// Parses a document and verifies its content digest.
pub fn parse_sealed<T: DeserializeOwned + Serialize + ContentAddressed + Clone>(
    bytes: &[u8],
) -> Result<T, CodecError> {
    let doc: T = serde_json::from_slice(bytes).map_err(|e| CodecError::Parse(e.to_string()))?;
    let computed = content_digest(&doc)?;
    if doc.digest_field() != computed {
        return Err(CodecError::DigestMismatch {
            stored: doc.digest_field().to_string(),
            computed,
        });
    }
    Ok(doc)
}

pub fn write_sealed<T: Serialize + ContentAddressed + Clone>(
    path: &std::path::Path,
    doc: T,
) -> Result<T, CodecError> {
    let sealed = seal(doc)?;
    std::fs::write(path, canonical_bytes(&sealed)?)?;
    Ok(sealed)
}

pub fn read_sealed<T: DeserializeOwned + Serialize + ContentAddressed + Clone>(
    path: &std::path::Path,
) -> Result<T, CodecError> {
    let bytes = std::fs::read(path)?;
    parse_sealed(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    struct Doc {
        format: String,
        payload: u64,
        digest: String,
    }

    impl ContentAddressed for Doc {
        fn digest_field(&self) -> &str {
            &self.digest
        }
        fn set_digest_field(&mut self, digest: String) {
            self.digest = digest;
        }
    }

    fn doc() -> Doc {
        Doc {
            format: "faas.test.v1".into(),
            payload: 42,
            digest: String::new(),
        }
    }

    #[test]
    fn seal_then_parse_round_trips() {
        let sealed = seal(doc()).unwrap();
        assert_eq!(sealed.digest.len(), 64);
        let bytes = canonical_bytes(&sealed).unwrap();
        let back: Doc = parse_sealed(&bytes).unwrap();
        assert_eq!(back, sealed);
    }

    #[test]
    fn parse_rejects_edited_payload() {
        let sealed = seal(doc()).unwrap();
        let text = String::from_utf8(canonical_bytes(&sealed).unwrap()).unwrap();
        let tampered = text.replace("42", "43");
        assert!(matches!(
            parse_sealed::<Doc>(tampered.as_bytes()),
            Err(CodecError::DigestMismatch { .. })
        ));
    }

    #[test]
    fn canonical_bytes_are_stable() {
        let a = canonical_bytes(&seal(doc()).unwrap()).unwrap();
        let b = canonical_bytes(&seal(doc()).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
