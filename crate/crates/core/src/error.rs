use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("denominator is the zero polynomial")]
    ZeroDenominator,

    #[error("numerator and denominator share the root {root}")]
    CommonRoot { root: crate::Complex },

    #[error("Möbius transformation is singular (|det| = {det:e})")]
    SingularMobius { det: f64 },

    #[error("degree {degree} exceeds the configured cap {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("degree {degree} is below the required minimum {min}")]
    DegreeTooLow { degree: usize, min: usize },

    #[error("root finder did not converge after {iterations} iterations (worst residual {worst_residual:e})")]
    RootNonConvergence { iterations: usize, worst_residual: f64 },

    #[error("exponential overflow guard: |Im z| * max|freq| = {0}")]
    Overflow(f64),

    #[error("zero of the function on the contour could not be avoided after {0} dilations")]
    BoundaryZero(usize),

    #[error("contour quadrature failed: {0}")]
    Quadrature(String),

    #[error("degenerate exponential sum: {0}")]
    DegenerateSum(String),

    #[error("degenerate point cloud: {0}")]
    DegenerateCloud(String),

    #[error("no repelling fixed point")]
    NoRepellingFixedPoint,

    #[error("outside chart validity: {0}")]
    OutsideChart(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
