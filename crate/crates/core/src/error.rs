use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("keyword must be non-empty")]
    EmptyKeyword,

    #[error("duplicate post id {0:?}")]
    DuplicateId(String),

    #[error("cannot sample {requested} items from {available}")]
    SampleTooLarge { requested: usize, available: usize },

    #[error("invalid split ratios: {0}")]
    InvalidRatios(String),

    #[error("invalid probability for {name}: {value}")]
    InvalidProbability { name: String, value: f64 },

    #[error("infeasible synthesis constraints: {0}")]
    Infeasible(String),

    #[error("post id mismatch: expected {expected:?}, found {found:?}")]
    PostIdMismatch { expected: String, found: String },

    #[error("both records come from annotator {0:?}")]
    SameAnnotator(String),

    #[error("degenerate marginals")]
    DegenerateMarginals,

    #[error("contingency table is empty")]
    EmptyTable,

    #[error("unaligned records: {}", .0.join(", "))]
    Unaligned(Vec<String>),

    #[error("missing gold or post for predictions: {}", .0.join(", "))]
    MissingRecords(Vec<String>),

    #[error("length mismatch: {left} gold vs {right} predicted")]
    LengthMismatch { left: usize, right: usize },

    #[error("input is empty")]
    EmptyInput,

    #[error("quote must be non-empty")]
    EmptyQuote,

    #[error("span [{start}, {end}) outside token range 0..{len}")]
    SpanOutOfRange { start: usize, end: usize, len: usize },

    #[error("invalid record: {0}")]
    InvalidRecord(String),

    #[error("invalid lexicon: {0}")]
    InvalidLexicon(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
