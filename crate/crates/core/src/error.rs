use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("expected {expected} values for a {n} x {p} matrix, got {got}")]
    Shape { n: usize, p: usize, expected: usize, got: usize },
    #[error("expected {expected} variable names, got {got}")]
    NameCount { expected: usize, got: usize },
    #[error("non-finite value in variable `{variable}` at sample {sample}")]
    NonFinite { variable: String, sample: usize },
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("constant column `{0}`")]
    ConstantColumn(String),
    #[error("empty variable set")]
    EmptySet,
    #[error("variable set needs at least {min} members, got {got}")]
    SetTooSmall { min: usize, got: usize },
    #[error("variable index {index} out of range for {p} variables")]
    IndexOutOfRange { index: usize, p: usize },
    #[error("conditions disagree on variables: {0}")]
    VariableMismatch(String),
    #[error("too few samples: {n} (at least {min} required)")]
    TooFewSamples { n: usize, min: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
