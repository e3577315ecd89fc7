use thiserror::Error;

use crate::network::ValidationReport;

/// Errors raised by the coded contraction pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("cannot draw {requested} distinct evaluation points from a field of size {modulus}")]
    TooManyPoints { requested: u64, modulus: u64 },

    #[error("evaluation point count must be positive")]
    NoPoints,

    #[error("invalid field selection `{0}` (expected f64, c128, gf or gf:<modulus>)")]
    InvalidField(String),

    #[error("modulus {0} is not prime")]
    NotPrime(u64),

    #[error("unknown axis `{0}`")]
    UnknownAxis(String),

    #[error("slice value {value} out of range 1..={dim} for axis `{label}`")]
    SliceOutOfRange {
        label: String,
        value: usize,
        dim: usize,
    },

    #[error("cannot fix an index of a scalar tensor")]
    ScalarTensor,

    #[error("shape error: {0}")]
    Shape(String),

    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),

    #[error("dimension mismatch on `{label}`: expected {expected}, found {found}")]
    DimensionMismatch {
        label: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid network: {0}")]
    InvalidNetwork(ValidationReport),

    #[error("invalid contraction order: {0}")]
    InvalidOrder(String),

    #[error("scheme not applicable: {0}")]
    SchemeNotApplicable(String),

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("polynomial degree {0} exceeds the supported limit of 2^40")]
    DegreeTooLarge(u64),

    #[error("duplicate evaluation points at positions {0} and {1}")]
    DuplicatePoints(usize, usize),

    #[error("insufficient survivors: need {needed}, have {available}")]
    InsufficientSurvivors { needed: usize, available: usize },

    #[error("exponent {k} out of range 0..={max}")]
    ExponentOutOfRange { k: u64, max: u64 },

    #[error("evaluation points rejected: {0}")]
    PointFamily(String),

    #[error("resilience exceeded in group {group}: {survivors} survivors, {needed} needed")]
    ResilienceExceeded {
        group: usize,
        survivors: usize,
        needed: usize,
    },

    #[error("{what}: size {size} exceeds guard {limit}")]
    GuardExceeded {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("invalid failure pattern: {0}")]
    InvalidFailurePattern(String),

    #[error("network spec: {0}")]
    SpecFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
