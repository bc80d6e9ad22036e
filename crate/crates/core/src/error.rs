use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix dimension must be at least 1")]
    Empty,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPsd { eigenvalue: f64 },

    #[error("invalid exponent {0}; must be positive and finite")]
    InvalidExponent(f64),

    #[error("{routine} did not converge")]
    NoConvergence { routine: &'static str },

    #[error("need at least {needed} weights, got {got}")]
    TooFewWeights { needed: usize, got: usize },

    #[error("family `{0}` has no corner nesting; sections are independent draws")]
    NotNested(&'static str),

    #[error("dimensions must be strictly increasing and positive")]
    BadDimensions,

    #[error("eigenvalue {eigenvalue} lies within {margin:e} of the circle |z| = {radius}")]
    NearSeparationCircle {
        eigenvalue: Complex64,
        radius: f64,
        margin: f64,
    },

    #[error(
        "Sylvester solve is ill-conditioned (eigenvalue separation {separation:e}, condition estimate {condition:e})"
    )]
    IllConditioned { separation: f64, condition: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
