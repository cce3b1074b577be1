use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at offset {offset}: expected {}, found {found}", expected.join(" or "))]
    Parse {
        offset: usize,
        expected: Vec<String>,
        found: String,
    },

    #[error("division by zero in `{node}` at alpha = {alpha}")]
    Domain { node: String, alpha: f64 },

    #[error("quadrature did not converge after {levels} refinements (last {last}, previous {previous})")]
    NonConvergence {
        levels: usize,
        last: f64,
        previous: f64,
    },

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("imaginary residue {residue:e} at alpha = {alpha} exceeds {limit:e}")]
    ImaginaryResidue { residue: f64, alpha: f64, limit: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
