use thiserror::Error;

#[derive(Debug, Error)]
pub enum MaxlabError {
    /// A geometric query was made at a point outside the open set.
    #[error("point ({0}, {1}) is not in the domain")]
    OutsideDomain(f64, f64),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("configuration error: {0}")]
    Config(String),
    /// A finite-difference stencil reached past the grid.
    #[error("point ({0}, {1}) is too close to the grid edge")]
    GridEdge(f64, f64),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, MaxlabError>;
