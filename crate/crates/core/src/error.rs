use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("degenerate form: {0}")]
    DegenerateForm(String),
    #[error("singular point: {0}")]
    Singular(String),
    #[error("divergence: {0}")]
    Divergence(String),
    #[error("backend mismatch: {0}")]
    Backend(String),
    #[error("derivative order {order} exceeds the limit {limit}")]
    OrderOverflow { order: usize, limit: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
