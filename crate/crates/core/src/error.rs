use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by structure construction and the algorithms built on top.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity {0} is degenerate; arity must be at least 2")]
    DegenerateArity(usize),
    #[error("arity {k} is smaller than edge size {edge_size}")]
    ArityTooSmall { k: usize, edge_size: usize },
    #[error("tuple has length {found}, expected {expected}")]
    TupleLength { expected: usize, found: usize },
    #[error("element index {0} is outside the universe")]
    UnknownElement(usize),
    #[error("unknown element name {0:?}")]
    UnknownName(String),
    #[error("duplicate element name {0:?}")]
    DuplicateName(String),
    #[error("edges must be non-empty")]
    EmptyEdge,
    #[error("relation is not closed under the set-equivalence laws")]
    NotSetClosed,
    #[error("structure contains a constant tuple (a loop)")]
    HasLoop,
    #[error("structures have different arities")]
    MixedArity,
    #[error("operation needs at least one structure")]
    EmptyFamily,
    #[error("no colouring with at most {0} colours")]
    CapExceeded(usize),
    #[error("search budget exhausted after {nodes} nodes")]
    BudgetExhausted { nodes: u64 },
    #[error("no verified candidate among the first {candidates} tried")]
    SearchExhausted { candidates: u64 },
    #[error("structure of {0} elements is too large for this operation")]
    TooLarge(u128),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("structure is not a member: {0}")]
    NotMember(String),
    #[error("homomorphism set was truncated at {0} elements")]
    HomSetTruncated(usize),
    #[error("minimal hyperedge cardinality is {0}, needs to exceed 2")]
    MinCardinalityNotAbove2(usize),
    #[error("no binary sequence of length {p} avoids cyclic runs of length {k}")]
    NoSuchSequence { p: usize, k: usize },
    #[error("radius {radius} must exceed {bound} for {rounds} rounds")]
    RadiusTooSmall {
        radius: usize,
        rounds: usize,
        bound: u64,
    },
    #[error("no unused ball copy is left for the reply")]
    NoFreshCopy,
    #[error("invalid move: {0}")]
    InvalidMove(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::BudgetExhausted { .. } | Error::SearchExhausted { .. }
        )
    }
}

/// A malformed `khs-1` document.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct FormatError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl FormatError {
    pub(crate) fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        FormatError {
            line: None,
            column: None,
            field: Some(field.into()),
            message: message.into(),
        }
    }
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let (Some(line), Some(column)) = (self.line, self.column) {
            write!(f, "line {line} column {column}: ")?;
        }
        if let Some(field) = &self.field {
            write!(f, "field `{field}`: ")?;
        }
        f.write_str(&self.message)
    }
}
