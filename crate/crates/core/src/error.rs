use thiserror::Error;

use crate::f2::SpaceClass;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Gram matrix is not symmetric")]
    NotSymmetric,
    #[error("Gram matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("Gram matrix is not even; the mod-2 quadratic form is undefined")]
    NotEven,
    #[error("unsupported shell norm {0}; only 2 and 4 are enumerated")]
    UnsupportedNorm(i64),
    #[error("expected a subspace of dimension {expected}, got {actual}")]
    WrongDimension { expected: usize, actual: usize },
    #[error("intersection parity is not an equivalence relation: {0}")]
    NotEquivalence(String),
    #[error("spaces are not disjoint: {0}")]
    NotDisjoint(String),
    #[error("no spread exists among the {0} members of class {1}")]
    NoSpread(usize, SpaceClass),
    #[error("{stage}: {check}")]
    Verification { stage: &'static str, check: String },
    #[error("generation incomplete: generated group has order {reached}, expected {expected}")]
    GenerationIncomplete { reached: u128, expected: u128 },
    #[error("not a permutation: {0}")]
    NotPermutation(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn verify(stage: &'static str, check: impl Into<String>) -> Error {
        Error::Verification { stage, check: check.into() }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Error {
        Error::Parse { line, msg: msg.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
