use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid species table: {0}")]
    Species(String),

    #[error("invalid reaction {entries:?}: {reason}")]
    Reaction { entries: Vec<i32>, reason: String },

    #[error("reaction {reaction:?} is not enabled in state {state:?}")]
    NotEnabled { reaction: Vec<i32>, state: Vec<i32> },

    #[error("malformed experiment graph: {0}")]
    Graph(String),

    #[error("state `{0}` has more than one outgoing response edge")]
    Nondeterministic(String),

    #[error("({from}, {to}) is not a response edge")]
    NotResponseEdge { from: String, to: String },

    #[error("experiment graph is not valid")]
    InvalidGraph,

    #[error("incomplete extension assignment: {0}")]
    IncompleteAssignment(String),

    #[error("invalid regulatory structure: {0}")]
    Structure(String),

    #[error("no valid extension with at most {0} hidden species")]
    NoExtension(usize),

    #[error("instance too large for brute force: {0}")]
    TooLarge(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("bad solutions document: {0}")]
    Document(String),
}
