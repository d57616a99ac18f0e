use thiserror::Error;

/// Everything that can go wrong while building or checking an array.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("v = {0} is not a prime power; v must be a prime power for the Frobenius group")]
    NotPrimePower(usize),

    #[error("k = {k} < 2t = {two_t}; the local-lemma construction needs k >= 2t")]
    NeedsKAtLeastTwoT { k: usize, two_t: usize },

    #[error("side condition failed: eta * ln(v^t/(v^t-1)) = {lhs} exceeds dependency degree {rhs}")]
    SideCondition { lhs: f64, rhs: f64 },

    #[error("first stage retries exhausted after {attempts} attempts (last attempt left more than {cap} uncovered)")]
    RetriesExhausted { attempts: u32, cap: u64 },

    #[error("resampling cap of {cap} exceeded")]
    IterationCapExceeded { cap: u64 },

    #[error("color class {color} mixes conflicting symbols on column {column}")]
    InconsistentClass { color: usize, column: usize },

    #[error("density row covered {covered} of {uncovered} items, below the guaranteed {required}")]
    GuaranteeViolated { uncovered: usize, covered: usize, required: usize },

    #[error("final array does not cover interaction on columns {columns:?} with symbols {symbols:?}")]
    VerificationFailed { columns: Vec<usize>, symbols: Vec<u8> },

    #[error("wall-clock budget of {0:.1}s exceeded")]
    TimeBudgetExceeded(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
