use thiserror::Error;

/// Errors raised by the analysis modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("denominator vanishes at the base point")]
    DenominatorVanishesAtBase,
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("structure definition invalid: {0}")]
    InvalidStructure(String),
    #[error("covector is zero")]
    ZeroCovector,
    #[error("covector does not annihilate frame field L{0} at the point")]
    NotCharacteristic(usize),
    #[error("kernel vector {index} fails b·phi_t = 0 (residual {residual})")]
    KernelVerificationFailed { index: usize, residual: String },
    #[error("polynomial is zero")]
    ZeroPolynomial,
    #[error("polynomial is not a monomial times a unit")]
    NotMonomialTimesUnit,
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("matrix is not invertible at the base point")]
    NotInvertibleAtBase,
    #[error("bundles are defined over different base frames")]
    BaseFrameMismatch,
    #[error("cutoff plan infeasible: {0}")]
    PlanInfeasible(String),
    #[error("degenerate quadrature grid: {0}")]
    DegenerateGrid(String),
    #[error("no frame field with negative Levi value")]
    NoNegativeDirection,
    #[error("rectification unavailable: {0}")]
    RectificationUnavailable(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    ParseError { line: usize, col: usize, msg: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("phi has non-real coefficients in entry {0}")]
    NonRealPhi(usize),
    #[error("{0}")]
    Io(String),
}
