//! Fair subset sum instances: item weights, a shared capacity, and the
//! generators used by the experiments.

mod family;
mod format;
mod random;

pub use family::{gen_family, Family, FamilyParams};
pub use format::{emit_instance, parse_instance};
pub use random::gen_random;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Each agent draws only from its own list.
    Separate,
    /// Both agents draw disjoint subsets of one common list.
    Shared,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Separate => "separate",
            Kind::Shared => "shared",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "separate" => Ok(Kind::Separate),
            "shared" => Ok(Kind::Shared),
            other => Err(Error::Parse(format!("unknown kind {other:?}"))),
        }
    }
}

/// A validated instance. Weights and capacity are integers in scaled
/// resource units; `trivial` marks instances whose items all fit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    kind: Kind,
    capacity: u64,
    agent_count: usize,
    items: Vec<Vec<u64>>,
    label: String,
    trivial: bool,
}

impl Instance {
    pub fn new(
        kind: Kind,
        capacity: u64,
        agent_count: usize,
        items: Vec<Vec<u64>>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::InvalidInstance("capacity must be positive".into()));
        }
        if agent_count < 2 {
            return Err(Error::InvalidInstance(format!(
                "agent count must be at least 2, got {agent_count}"
            )));
        }
        let expected_lists = match kind {
            Kind::Separate => agent_count,
            Kind::Shared => 1,
        };
        if items.len() != expected_lists {
            return Err(Error::InvalidInstance(format!(
                "{kind} instance with k = {agent_count} needs {expected_lists} item list(s), got {}",
                items.len()
            )));
        }
        if let Some(&w) = items.iter().flatten().find(|&&w| w > capacity) {
            return Err(Error::WeightExceedsCapacity {
                weight: w as i64,
                capacity: capacity as i64,
            });
        }
        let total: u128 = items.iter().flatten().map(|&w| w as u128).sum();
        Ok(Instance {
            kind,
            capacity,
            agent_count,
            items,
            label: label.into(),
            trivial: total <= capacity as u128,
        })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn agent_count(&self) -> usize {
        self.agent_count
    }

    /// Raw item lists: one per agent (separate) or a single common list (shared).
    pub fn items(&self) -> &[Vec<u64>] {
        &self.items
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Total weight does not exceed the capacity, so everything fits.
    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    /// The items agent `j` may receive.
    pub fn accessible(&self, agent: usize) -> &[u64] {
        assert!(agent < self.agent_count, "agent {agent} out of range");
        match self.kind {
            Kind::Separate => &self.items[agent],
            Kind::Shared => &self.items[0],
        }
    }

    pub fn item_count(&self) -> usize {
        self.items.iter().map(Vec::len).sum()
    }

    pub fn max_weight(&self) -> Option<u64> {
        self.items.iter().flatten().copied().max()
    }

    pub fn total_weight(&self) -> u128 {
        self.items.iter().flatten().map(|&w| w as u128).sum()
    }
}

/// Largest item weight relative to the capacity.
pub fn alpha_of(inst: &Instance) -> Result<Rational> {
    match inst.max_weight() {
        None => Err(Error::EmptyInstance),
        Some(0) => Err(Error::InvalidInstance(
            "all weights are zero, alpha is undefined".into(),
        )),
        Some(w) => Ok(Rational::new(w as i128, inst.capacity() as i128)),
    }
}
