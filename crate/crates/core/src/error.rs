use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    #[error("sequence must not be empty")]
    Empty,
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("value {value} at index {index} must be positive")]
    NonPositive { index: usize, value: f64 },
    #[error("sequence is not non-increasing at index {index}")]
    NotNonIncreasing { index: usize },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cannot collapse a profile of length {k} to length {m}")]
    CollapseOutOfRange { m: usize, k: usize },
    #[error("invalid block partition: {0}")]
    InvalidPartition(&'static str),
    #[error("block {block} has zero sum")]
    ZeroBlockSum { block: usize },
    #[error("chain QP weight at index {index} is not positive ({value})")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("chain QP target at index {index} is not positive ({value})")]
    NonPositiveTarget { index: usize, value: f64 },
    #[error("dual variable at index {index} is zero")]
    ZeroDual { index: usize },
    #[error("blend precondition b_i <= a_1 < b_1 violated (a_1={a1}, b_1={b1}, b_i={bi})")]
    BlendPrecondition { a1: f64, b1: f64, bi: f64 },
    #[error("targets are not majorized by the operator spectrum")]
    NotMajorized,
    #[error("orthogonality lost during sweep (drift {drift:e})")]
    OrthogonalityLost { drift: f64 },
    #[error("profile is not feasible for the spectrum (lengths must be majorized by the padded eigenvalues)")]
    InfeasibleProfile,
    #[error("K={k} < effective rank m={m}")]
    TooFewVectors { k: usize, m: usize },
    #[error("covariance is zero: nothing to represent")]
    ZeroCovariance,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("vector lies outside the dictionary span (residual {residual:e})")]
    OutsideSpan { residual: f64 },
    #[error("dictionary does not span the covariance range (leakage {leakage:e})")]
    SpanDeficiency { leakage: f64 },
    #[error("grid oracle supports m <= {max}, got m={m}")]
    OracleTooLarge { m: usize, max: usize },
    #[error("grid oracle needs at least one step per axis")]
    OracleSteps,
    #[error("perturbation scale must be finite and non-negative, got {0}")]
    InvalidDelta(f64),
    #[error("sample set needs at least {needed} rows, got {found}")]
    TooFewSamples { needed: usize, found: usize },
    #[error("invariant violated: {invariant} ({detail})")]
    InvariantViolated { invariant: &'static str, detail: String },
}
