use thiserror::Error;

/// Errors produced by the analysis pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("exponent overflow at line {line}, column {column}")]
    ExponentOverflow { line: usize, column: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("empty system: at least one symbol is required")]
    EmptySystem,

    #[error("polyhedron is not regular: {0}")]
    Irregular(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numeric overflow: {0}")]
    Overflow(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("witness error: {0}")]
    Witness(String),

    #[error("symbol term {alpha:?} lies beyond the facet (<alpha,q> = {value} > 1)")]
    BeyondFacet { alpha: Vec<u32>, value: String },

    #[error("derivative order {requested} exceeds the supported order {cap}")]
    OrderCap { requested: usize, cap: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
