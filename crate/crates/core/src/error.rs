use thiserror::Error;

/// Errors raised by the linear-algebra primitives and everything built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("density matrix trace is {trace}, expected 1")]
    BadTrace { trace: f64 },

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("empty input")]
    Empty,

    #[error("invalid prior distribution: {0}")]
    InvalidPriors(String),

    #[error("success probability {value} at index {index} is outside [0, 1]")]
    InvalidGamma { index: usize, value: f64 },

    #[error("certificate is infeasible (residual min eigenvalue {min_eigenvalue:e})")]
    Infeasible { min_eigenvalue: f64 },

    #[error("input states are linearly dependent (singular value ratio {ratio:e})")]
    LinearlyDependent { ratio: f64 },

    #[error("operation requires pure states")]
    MixedStatesUnsupported,

    #[error(
        "singular pair ({i}, {j}): targets coincide (fidelity 1) while inputs do not (fidelity {input_fidelity})"
    )]
    SingularPair { i: usize, j: usize, input_fidelity: f64 },

    #[error("coincident target states at pair ({i}, {j})")]
    CoincidentTargets { i: usize, j: usize },

    #[error("grid too large: {0}")]
    GridTooLarge(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
