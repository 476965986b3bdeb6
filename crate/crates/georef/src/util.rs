//! Small shared helpers.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Serialize a value to canonical JSON: object keys sorted, floats in
/// shortest round-trip form. Byte-identical for equal values.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("value serializes");
    serde_json::to_string(&v).expect("json value prints")
}

/// Pretty canonical JSON (sorted keys, two-space indent).
pub fn canonical_json_pretty<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("value serializes");
    serde_json::to_string_pretty(&v).expect("json value prints")
}

/// Hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    hex::encode(h.finalize())
}

/// Stable 64-bit value derived from a label and a base seed; used to give
/// each scene in a batch its own solver seed.
pub fn derive_seed(base: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(base.to_le_bytes());
    h.update(label.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}
