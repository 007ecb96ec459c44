use thiserror::Error;

/// Errors produced by loop construction, search and classification.
#[derive(Debug, Error)]
pub enum Error {
    /// A row or column of a candidate Cayley table repeats a value.
    #[error("not a latin square: {axis} {index} repeats value {value}")]
    NotLatin {
        axis: Axis,
        index: usize,
        value: usize,
    },

    /// The table is not square or contains an out-of-range entry.
    #[error("malformed table: {0}")]
    MalformedTable(String),

    /// An operation needed two-sided inverses but some element has none.
    #[error("element {element} has no two-sided inverse")]
    NoTwoSidedInverses { element: usize },

    /// Quotient construction was asked for a non-normal subloop.
    #[error("subloop is not normal: cosets of {witness} are not well defined")]
    NotNormal { witness: usize },

    /// J is not an automorphism of the loop.
    #[error("loop lacks the automorphic inverse property (witness pair {x}, {y})")]
    AipViolation { x: usize, y: usize },

    /// A permutation was expected to be an orthoautomorphism but is not.
    #[error("permutation is not an orthoautomorphism")]
    NotOrthoautomorphism,

    /// A search or closure exceeded its configured budget.
    #[error("budget exceeded after {visited} steps ({what})")]
    BudgetExceeded { what: &'static str, visited: u64 },

    /// Orbit closure left the declared universe.
    #[error("group action escapes the declared universe (generator {generator})")]
    ActionEscapesUniverse { generator: usize },

    /// Classification refused to run on an automorphism group flagged incomplete.
    #[error("automorphism group is incomplete; counts would not be exact")]
    IncompleteAutGroup,

    /// Permutation algebra on mismatched degrees.
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    /// A triple-system axiom failed; carries a witness pair.
    #[error("triple system axiom violated for pair ({x}, {y}): {reason}")]
    AxiomViolation { x: usize, y: usize, reason: String },

    /// A stored representative index does not exist.
    #[error("unknown representative index {0}")]
    IndexUnknown(usize),

    /// A loop selector did not resolve to a registry name or readable file.
    #[error("unknown loop selector `{0}`")]
    UnknownSelector(String),

    /// Text format parse error with 1-based line number.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which axis of a table violated the latin property.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Row,
    Column,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::Row => write!(f, "row"),
            Axis::Column => write!(f, "column"),
        }
    }
}
