use std::io;

/// Errors raised across the detection pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("lexicon line {line}: {message}")]
    LexiconSyntax { line: usize, message: String },

    #[error("lexicon has no categories")]
    EmptyLexicon,

    #[error("lexicon line {line}: duplicate category `{name}`")]
    DuplicateCategory { line: usize, name: String },

    #[error("unknown category `{0}`")]
    UnknownCategory(String),

    #[error("line {line}: malformed record: {message}")]
    MalformedRecord { line: usize, message: String },

    #[error("dataset contains no valid tweets")]
    EmptyDataset,

    #[error("invalid event label `{0}` (expected `#hashtag` or `@handle`)")]
    InvalidLabel(String),

    #[error("invalid timestamp `{0}`")]
    InvalidTimestamp(String),

    #[error("series is empty")]
    EmptySeries,

    #[error("series too short: need at least {needed} values, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("series value at index {0} is not finite")]
    NonFinite(usize),

    #[error("penalty must be positive and finite, got {0}")]
    InvalidPenalty(f64),

    #[error("unknown network metric `{0}`")]
    UnknownMetric(String),

    #[error("no start found: the event token is never the most frequent entity")]
    NoStartFound,

    #[error("dataset has no firestorm tweets")]
    NoFirestormTweets,

    #[error("no outside group: every author is in the largest component")]
    NoOutsideGroup,

    #[error("degenerate component structure: {0}")]
    DegenerateComponents(String),

    #[error("infeasible firestorm: fraction {fraction} needs labelling probability {required:.3} > 1 at magnitude {magnitude}")]
    InfeasibleFraction {
        fraction: f64,
        magnitude: f64,
        required: f64,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// True for errors that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
