use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the engine can report. Variants map one-to-one onto CLI exit classes.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("codomain mismatch: {0}")]
    CodomainMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),
    #[error("square does not commute: {0}")]
    NotCommuting(String),
    #[error("not a cocone: {0}")]
    NotACocone(String),
    #[error("naturality violation: {0}")]
    NaturalityViolation(String),
    #[error("enumeration cap exceeded: {count} candidates > cap {cap}")]
    EnumerationCap { count: u128, cap: usize },
    #[error("no isomorphism found: {0}")]
    NoIsoFound(String),
    #[error("backdrop violation: {0}")]
    BackdropViolation(String),
    #[error("iteration limit of {max_steps} steps reached without convergence")]
    IterationLimit {
        max_steps: usize,
        /// JSON rendering of the stages computed before giving up.
        partial_trace: Box<serde_json::Value>,
    },
    #[error("not an algebra: {0}")]
    NotAnAlgebra(String),
    #[error("not a retract: {0}")]
    NotARetract(String),
    #[error("generator diagram is not discrete: {0}")]
    NotDiscrete(String),
    #[error("colimit not preserved: {0}")]
    ColimitNotPreserved(String),
    #[error("missing generator witness for `{0}`")]
    MissingGeneratorWitness(String),
    #[error("internal invariant breached: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::MalformedInput(msg.into())
    }
}

/// Default bound on the number of candidates any enumeration may visit.
pub const DEFAULT_CAP: usize = 1_000_000;

pub(crate) fn check_cap(count: u128, cap: usize) -> Result<()> {
    if count > cap as u128 {
        Err(Error::EnumerationCap { count, cap })
    } else {
        Ok(())
    }
}
