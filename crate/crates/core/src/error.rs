use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {0} is outside (0, inf)")]
    Domain(f64),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("invalid measure: {0}")]
    Measure(String),
    #[error("invalid density: {0}")]
    Density(String),
    #[error("root bracket [{lo:e}, {hi:e}] does not contain a sign change for target {target:e}")]
    Bracket { lo: f64, hi: f64, target: f64 },
    #[error("evaluation produced a non-positive or non-finite value at t = {0:e}")]
    Evaluation(f64),
    #[error("derivative estimate is too noisy (spread {spread:e} exceeds {tol:e})")]
    Derivative { spread: f64, tol: f64 },
    #[error("duplicate points in Loewner test")]
    DuplicatePoints,
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("Jacobi eigensolver did not converge after {0} sweeps")]
    EigenNoConvergence(usize),
    #[error("invalid matrix: {0}")]
    Matrix(String),
    #[error("matrix is not positive definite (min eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("transformer matrix is singular")]
    SingularTransformer,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
