use serde::{Deserialize, Serialize};

use super::{Instance, Kind};
use crate::error::{Error, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    kind: Kind,
    c: i64,
    #[serde(default = "default_k")]
    k: i64,
    items: Vec<Vec<i64>>,
    #[serde(default)]
    label: Option<String>,
}

fn default_k() -> i64 {
    2
}

#[derive(Serialize)]
struct CanonicalInstance<'a> {
    kind: Kind,
    c: u64,
    k: usize,
    items: &'a [Vec<u64>],
    label: &'a str,
}

/// Parses the canonical JSON instance document.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let raw: RawInstance =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if raw.c <= 0 {
        return Err(Error::InvalidInstance(format!(
            "capacity must be positive, got {}",
            raw.c
        )));
    }
    if raw.k < 2 {
        return Err(Error::InvalidInstance(format!(
            "agent count must be at least 2, got {}",
            raw.k
        )));
    }
    let mut items = Vec::with_capacity(raw.items.len());
    for list in raw.items {
        let mut out = Vec::with_capacity(list.len());
        for w in list {
            if w < 0 {
                return Err(Error::NegativeWeight(w));
            }
            if w > raw.c {
                return Err(Error::WeightExceedsCapacity { weight: w, capacity: raw.c });
            }
            out.push(w as u64);
        }
        items.push(out);
    }
    Instance::new(
        raw.kind,
        raw.c as u64,
        raw.k as usize,
        items,
        raw.label.unwrap_or_default(),
    )
}

/// Writes the canonical single-line document, newline terminated.
pub fn emit_instance(inst: &Instance) -> String {
    let doc = CanonicalInstance {
        kind: inst.kind(),
        c: inst.capacity(),
        k: inst.agent_count(),
        items: inst.items(),
        label: inst.label(),
    };
    let mut s = serde_json::to_string(&doc).expect("instance serializes");
    s.push('\n');
    s
}
