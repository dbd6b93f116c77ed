use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },

    #[error("variable x{index} out of range for dimension {dim}")]
    VariableOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("identity `{identity}` needs a binding for `{symbol}`")]
    MissingBinding { identity: String, symbol: String },

    #[error("unknown module `{0}`")]
    UnknownModule(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("module schema error: {0}")]
    Schema(String),

    #[error("module failed validation: {0}")]
    Validation(String),

    #[error("localizing element must be nonzero")]
    ZeroDenominator,

    #[error("localization base mismatch: `{expected}` vs `{found}`")]
    BaseMismatch { expected: String, found: String },
}

pub type Result<T> = std::result::Result<T, Error>;
