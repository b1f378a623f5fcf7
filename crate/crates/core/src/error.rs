use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("NOT_NONDET: {0}")]
    NotNondet(String),
    #[error("NOT_BLANK_SKIPPING: {0}")]
    NotBlankSkipping(String),
    #[error("WRONG_K: expected k = {expected}, found {found}")]
    WrongK { expected: usize, found: usize },
    #[error("NOT_IDEAL_SHAPE: {0}")]
    NotIdealShape(String),
    #[error("GAP_OUT_OF_RANGE: {0}")]
    GapOutOfRange(String),
    #[error("ALPHABET_MISMATCH: {0}")]
    AlphabetMismatch(String),
    #[error("EPSILON_TOO_LARGE: {0}")]
    EpsilonTooLarge(String),
    #[error("NOT_FROZEN: symbol {0:?} is not a frozen symbol")]
    NotFrozen(String),
    #[error("DIM_MISMATCH: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("UNRESOLVED_MASS: unresolved probability {0}")]
    UnresolvedMass(String),
    #[error("NOT_SUPPORTED: {0}")]
    NotSupported(String),
    #[error("EMPTY_OUTPUT: the output multiset is empty")]
    EmptyOutput,
    #[error("INCONSISTENT_SPEC: {0}")]
    InconsistentSpec(String),
    #[error("NODE_LIMIT: configuration graph exceeded {0} nodes")]
    NodeLimit(usize),
    #[error("INVALID: {0}")]
    Invalid(String),
    #[error("TOO_LARGE: {0}")]
    TooLarge(String),
}

impl Error {
    /// Stable identifier used in reports and by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "PARSE",
            Error::NotNondet(_) => "NOT_NONDET",
            Error::NotBlankSkipping(_) => "NOT_BLANK_SKIPPING",
            Error::WrongK { .. } => "WRONG_K",
            Error::NotIdealShape(_) => "NOT_IDEAL_SHAPE",
            Error::GapOutOfRange(_) => "GAP_OUT_OF_RANGE",
            Error::AlphabetMismatch(_) => "ALPHABET_MISMATCH",
            Error::EpsilonTooLarge(_) => "EPSILON_TOO_LARGE",
            Error::NotFrozen(_) => "NOT_FROZEN",
            Error::DimMismatch(..) => "DIM_MISMATCH",
            Error::UnresolvedMass(_) => "UNRESOLVED_MASS",
            Error::NotSupported(_) => "NOT_SUPPORTED",
            Error::EmptyOutput => "EMPTY_OUTPUT",
            Error::InconsistentSpec(_) => "INCONSISTENT_SPEC",
            Error::NodeLimit(_) => "NODE_LIMIT",
            Error::Invalid(_) => "INVALID",
            Error::TooLarge(_) => "TOO_LARGE",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
