use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("size {n} exceeds the configured cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("partitions are not comparable in refinement order")]
    NotComparable,
    #[error("partitions belong to different face maps or lengths")]
    ShapeMismatch,
    #[error("invalid face map: {0}")]
    InvalidChi(String),
    #[error("colouring length {got} does not match word length {expected}")]
    OmegaLength { expected: usize, got: usize },
    #[error("missing moment for word [{0}]")]
    MissingMoment(String),
    #[error("cumulant table is incomplete at word [{0}]")]
    IncompleteTable(String),
    #[error("word length {len} exceeds distribution degree {degree}")]
    DegreeExceeded { len: usize, degree: usize },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("diagram is not in the laterally refined capped set")]
    NotInLatcap,
    #[error("product group {0} mixes left and right faces")]
    MixedFaceGroup(usize),
    #[error("invalid grouping: {0}")]
    InvalidGrouping(String),
    #[error("alphabet collision on symbol `{0}`")]
    AlphabetCollision(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("tensor length exceeds truncation {0}")]
    TruncationOverflow(usize),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("series has a non-unit constant term")]
    NonUnit,
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("negative semigroup parameter")]
    NegativeTime,
    #[error("nonzero first-order cumulant in centred data")]
    NonzeroMean,
    #[error("Levy-Hincin invariant violated: {0}")]
    InvariantViolation(String),
    #[error("schema error: {0}")]
    Schema(String),
}

impl Error {
    /// Schema error prefixed with where it happened.
    pub fn within(self, place: impl std::fmt::Display) -> Error {
        match self {
            Error::Schema(m) => Error::Schema(format!("{place}: {m}")),
            other => Error::Schema(format!("{place}: {other}")),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
