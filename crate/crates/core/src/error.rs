use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("instance {0} is not in the class universe")]
    UnknownInstance(String),

    #[error("invalid class: {0}")]
    SchemaError(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("size cap exceeded: {0}")]
    CapExceeded(String),

    #[error("version space became empty; the labelled sequence is not realizable")]
    EmptyVersionSpace,

    #[error("learner was built for a different class")]
    ClassMismatch,

    #[error("invalid costs: {0}")]
    InvalidCosts(String),

    #[error("malformed mistake tree: {0}")]
    MalformedTree(String),

    #[error("no witness tree: the dimension is zero")]
    NoWitness,

    #[error("mistake tree is not shattered by the learner's class")]
    TreeNotShattered,

    #[error("learner accepted trace {0} that a consistent target still rejects")]
    LearnerNotSound(String),

    #[error("class declares no fail token")]
    FailTokenRequired,

    #[error("fail token is accepted after a correct prefix: {0}")]
    FailTokenInvalid(String),

    #[error("prefix promise violated: a strict prefix of {0} is not correct")]
    PromiseViolated(String),

    #[error("no tested hypothesis met the selection thresholds")]
    NoHypothesisQualified,

    #[error("oracle unavailable: {0}")]
    OracleUnavailable(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
