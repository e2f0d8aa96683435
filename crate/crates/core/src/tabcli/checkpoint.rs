//! Per-chunk run state persisted as JSON.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use super::{record_from_json, record_to_json, TabError};
use crate::sieve::{FieldRecord, SearchParams};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChunkStatus {
    Pending,
    Done(Vec<FieldRecord>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub config_digest: String,
    pub chunks: BTreeMap<(u32, i64), ChunkStatus>,
}

pub fn chunk_key(trace: u32, an: i64) -> String {
    format!("{trace}:{an}")
}

pub fn parse_chunk_key(s: &str) -> Option<(u32, i64)> {
    let (t, a) = s.split_once(':')?;
    Some((t.trim().parse().ok()?, a.trim().parse().ok()?))
}

/// SHA-256 of the canonical JSON form of the search parameters.
pub fn config_digest(params: &SearchParams) -> String {
    let canon = serde_json::to_string(params).expect("plain struct");
    Sha256::digest(canon.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

impl Checkpoint {
    pub fn new(config_digest: String) -> Self {
        Checkpoint { config_digest, chunks: BTreeMap::new() }
    }

    pub fn to_json(&self) -> Value {
        let mut chunks = Map::new();
        for (&(t, an), status) in &self.chunks {
            let entry = match status {
                ChunkStatus::Pending => json!({ "status": "pending", "records": [] }),
                ChunkStatus::Done(rs) => json!({
                    "status": "done",
                    "records": rs.iter().map(record_to_json).collect::<Vec<_>>(),
                }),
            };
            chunks.insert(chunk_key(t, an), entry);
        }
        json!({ "config_digest": self.config_digest, "chunks": chunks })
    }

    pub fn from_json(v: &Value) -> Result<Self, TabError> {
        let bad = |m: &str| TabError::CorruptCheckpoint(m.to_string());
        let digest = v.get("config_digest").and_then(Value::as_str).ok_or_else(|| bad("missing config_digest"))?;
        let map = v.get("chunks").and_then(Value::as_object).ok_or_else(|| bad("missing chunks"))?;
        let mut chunks = BTreeMap::new();
        for (k, entry) in map {
            let key = parse_chunk_key(k).ok_or_else(|| bad(&format!("bad chunk key {k:?}")))?;
            let status = match entry.get("status").and_then(Value::as_str) {
                Some("pending") => ChunkStatus::Pending,
                Some("done") => {
                    let rs = entry
                        .get("records")
                        .and_then(Value::as_array)
                        .ok_or_else(|| bad(&format!("chunk {k} has no records")))?;
                    let recs = rs
                        .iter()
                        .map(record_from_json)
                        .collect::<Option<Vec<_>>>()
                        .ok_or_else(|| bad(&format!("malformed record in chunk {k}")))?;
                    ChunkStatus::Done(recs)
                }
                _ => return Err(bad(&format!("chunk {k} has no valid status"))),
            };
            chunks.insert(key, status);
        }
        Ok(Checkpoint { config_digest: digest.to_string(), chunks })
    }

    pub fn load(path: &Path) -> Result<Self, TabError> {
        let text = std::fs::read_to_string(path)?;
        let v: Value = serde_json::from_str(&text).map_err(|e| TabError::CorruptCheckpoint(e.to_string()))?;
        Self::from_json(&v)
    }

    /// Writes to a sibling temporary file, then renames over `path`.
    pub fn save(&self, path: &Path) -> Result<(), TabError> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        std::fs::write(&tmp, self.to_json().to_string())?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_roundtrip() {
        let mut cp = Checkpoint::new("abc".into());
        cp.chunks.insert((0, -3), ChunkStatus::Pending);
        cp.chunks.insert((1, 2), ChunkStatus::Done(Vec::new()));
        assert_eq!(Checkpoint::from_json(&cp.to_json()).unwrap(), cp);
    }

    #[test]
    fn corrupt_rejected() {
        assert!(matches!(Checkpoint::from_json(&json!({"chunks": {}})), Err(TabError::CorruptCheckpoint(_))));
        let v = json!({"config_digest": "x", "chunks": {"a:b": {"status": "done", "records": []}}});
        assert!(matches!(Checkpoint::from_json(&v), Err(TabError::CorruptCheckpoint(_))));
    }

    #[test]
    fn keys() {
        assert_eq!(parse_chunk_key(&chunk_key(2, -7)), Some((2, -7)));
    }
}
