use thiserror::Error;

/// Which of the two groups an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Control,
    Test,
}

impl std::fmt::Display for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Group::Control => f.write_str("control group (0)"),
            Group::Test => f.write_str("test group (1)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("{group} has {n} observation(s); at least 2 are required")]
    TooFewSamples { group: Group, n: usize },

    #[error("{group} contains a non-finite value at position {index}")]
    NonFiniteValue { group: Group, index: usize },

    #[error("{group} has zero within-group spread")]
    DegenerateGroup { group: Group },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },

    #[error("line {line}: expected {expected} cells, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}, column {column}: cannot parse {token:?} as a number")]
    NonNumericCell {
        line: usize,
        column: usize,
        token: String,
    },

    #[error("line {line}: duplicate marker id {id:?}")]
    DuplicateId { line: usize, id: String },
}

pub type Result<T> = std::result::Result<T, Error>;
