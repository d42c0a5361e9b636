use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("weight exceeds capacity: item {weight} > c = {capacity}")]
    WeightExceedsCapacity { weight: i64, capacity: i64 },

    #[error("negative weight {0}")]
    NegativeWeight(i64),

    #[error("instance has no items")]
    EmptyInstance,

    #[error("unknown family {0:?}")]
    UnknownFamily(String),

    #[error("invalid family parameters: {0}")]
    FamilyParams(String),

    #[error("expected {expected} instance, got {actual}")]
    KindMismatch { expected: &'static str, actual: &'static str },

    #[error("unsupported agent count {0}")]
    UnsupportedAgentCount(usize),

    #[error("frontier is empty")]
    EmptyFrontier,

    #[error("utility vector {0} is not on this frontier")]
    StaleEntry(String),

    #[error("every agent has zero standalone utility")]
    AllBestsZero,

    #[error("alpha {0} outside (0, 1]")]
    AlphaOutOfRange(String),

    #[error("{0}")]
    OutOfRegime(String),

    #[error("system optimum is zero")]
    ZeroOptimum,

    #[error("oracle size guard exceeded: {0} states > 2^24")]
    SizeGuard(u128),

    #[error("empty grid")]
    EmptyGrid,

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable identifier used in machine-readable diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::InvalidInstance(_) => "invalid_instance",
            Error::WeightExceedsCapacity { .. } => "weight_exceeds_capacity",
            Error::NegativeWeight(_) => "negative_weight",
            Error::EmptyInstance => "empty_instance",
            Error::UnknownFamily(_) => "unknown_family",
            Error::FamilyParams(_) => "family_params",
            Error::KindMismatch { .. } => "kind_mismatch",
            Error::UnsupportedAgentCount(_) => "unsupported_agent_count",
            Error::EmptyFrontier => "empty_frontier",
            Error::StaleEntry(_) => "stale_entry",
            Error::AllBestsZero => "all_bests_zero",
            Error::AlphaOutOfRange(_) => "alpha_out_of_range",
            Error::OutOfRegime(_) => "out_of_regime",
            Error::ZeroOptimum => "zero_optimum",
            Error::SizeGuard(_) => "size_guard",
            Error::EmptyGrid => "empty_grid",
            Error::Io(_) => "io",
        }
    }

    /// Errors caused by the caller's input rather than by a computation.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::InvalidInstance(_)
                | Error::WeightExceedsCapacity { .. }
                | Error::NegativeWeight(_)
                | Error::UnknownFamily(_)
                | Error::FamilyParams(_)
                | Error::AlphaOutOfRange(_)
                | Error::EmptyGrid
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
