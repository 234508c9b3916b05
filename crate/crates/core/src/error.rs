use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("example {example}: {message}")]
    Example { example: usize, message: String },

    #[error("distance undefined: operands share no defined dimension")]
    DistanceUndefined,

    #[error("empty cluster")]
    EmptyCluster,

    #[error("invalid partition: {0}")]
    InvalidPartition(&'static str),

    #[error("relative error undefined: zero baseline error with nonzero prediction error")]
    RelativeErrorUndefined,

    #[error("F statistic needs at least 3 examples, got {0}")]
    TooFewExamples(usize),

    #[error("duplicate template: {0}")]
    DuplicateTemplate(String),

    #[error("tree carries no labels for attribute `{0}`")]
    UnlabeledTree(String),

    #[error("no labeled examples")]
    NoLabeledExamples,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
