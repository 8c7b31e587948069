//! Artifact serialization: CSV stamping, JSON encoding and content hashes.

use num_complex::Complex64;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// A file produced by a task, held in memory until the run commits it.
#[derive(Clone, Debug)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(name: &str, bytes: Vec<u8>) -> Self {
        Self {
            name: name.to_string(),
            bytes,
        }
    }

    /// CSV body prefixed with the `# manifest=<hash>` comment line.
    pub fn csv(name: &str, hash: &str, body: &str) -> Self {
        Self::new(name, format!("# manifest={hash}\n{body}").into_bytes())
    }

    /// Pretty JSON object with a `manifest` field inserted.
    pub fn json(name: &str, hash: &str, mut value: Value) -> Self {
        if let Value::Object(map) = &mut value {
            map.insert("manifest".into(), Value::String(hash.to_string()));
        }
        let mut text = serde_json::to_string_pretty(&value).expect("json values serialize");
        text.push('\n');
        Self::new(name, text.into_bytes())
    }

    pub fn sha256(&self) -> String {
        sha256_hex(&self.bytes)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// Finite floats as numbers, everything else as the strings `"inf"`, `"-inf"`, `"nan"`.
pub fn real(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_nan() {
        json!("nan")
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn opt_real(v: Option<f64>) -> Value {
    v.map(real).unwrap_or(Value::Null)
}

/// Writes a CSV row; `None` cells stay empty.
pub fn row(cells: &[String]) -> String {
    let mut line = cells.join(",");
    line.push('\n');
    line
}
