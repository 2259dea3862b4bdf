use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("singular matrix")]
    Singular,

    #[error("vertex out of range: {0}")]
    VertexOutOfRange(String),

    #[error("invalid generator set: {0}")]
    InvalidGenerators(String),

    #[error("merge factor {gamma} does not divide part size {n}")]
    MergeDivisibility { n: usize, gamma: usize },

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("solver did not converge after {iterations} iterations (best estimate {estimate}, residual {residual:e})")]
    NonConvergence {
        estimate: f64,
        residual: f64,
        iterations: usize,
    },

    #[error("experiment failed: {0}")]
    Experiment(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn params(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }
}
