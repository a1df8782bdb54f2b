use std::fmt;

/// A diagnostic attached to a position in some text input. Lines and columns
/// are 1-based; a column of 0 means "whole line".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    pub fn at_line(line: usize, message: impl Into<String>) -> Self {
        Self::new(line, 0, message)
    }

    /// Shift a diagnostic produced for a single line so it reports `line`.
    pub fn on_line(mut self, line: usize) -> Self {
        self.line = line;
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.column == 0 {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            write!(
                f,
                "line {}, column {}: {}",
                self.line, self.column, self.message
            )
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),

    #[error("empty index selection")]
    EmptySelection,

    #[error("index {index} out of range for {len} parts")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("set partitions need a positive ground set size")]
    EmptyGroundSet,

    #[error("enumerating set partitions of {n} elements exceeds the cap of {cap}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("ground sets differ: {left} vs {right} elements")]
    GroundSetMismatch { left: usize, right: usize },

    #[error("malformed set partition: {0}")]
    MalformedSetPartition(String),

    #[error("set partition {0} is not in ordered form")]
    NotOrderedForm(String),

    #[error("classes belong to different rings")]
    RingMismatch,

    #[error("invalid ring: {0}")]
    InvalidRing(ParseError),

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("unknown class `{0}`")]
    UnknownSymbol(String),

    #[error("symbol `{0}` is already declared")]
    DuplicateSymbol(String),

    #[error("`{0}` cannot be evaluated on a concrete ring")]
    OpaqueEvaluation(String),

    #[error("K matrix fails validation with {0} violation(s)")]
    InvalidKMatrix(usize),

    #[error("K matrix covers sizes up to {max_size}, but a block has size {needed}")]
    KMatrixTooSmall { max_size: u32, needed: u32 },

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("leading coefficient of divisor is not an invertible scalar")]
    NonInvertible,

    #[error("truncation order {order} is below the lowest attainable exponent {lowest}")]
    TruncationTooSmall { order: i64, lowest: i64 },

    #[error("inconsistent theory table: `{first}` and `{second}` reduce to the same key with different series")]
    InconsistentTable { first: String, second: String },

    #[error("malformed theory table: {0}")]
    MalformedTable(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
