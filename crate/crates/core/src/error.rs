use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid diagram: {0}")]
    Diagram(String),

    #[error("invalid parameters: {0}")]
    Params(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid move: {0}")]
    Move(String),

    #[error("not implemented: {0}")]
    Unsupported(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
