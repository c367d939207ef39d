use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operands carry different linear forms and neither is exact")]
    FormMismatch,
    #[error("invalid linear form: {0}")]
    InvalidForm(String),
    #[error("matrix is singular over the rationals")]
    SingularMatrix,
    #[error("index {index} out of range (allowed {allowed})")]
    IndexOutOfRange { index: usize, allowed: String },
    #[error("series is zero up to its precision; no certified initial exponent")]
    ZeroUpToPrecision,
    #[error("precision shortfall: need L-value {needed}, input certified to {available}")]
    PrecisionShortfall { needed: String, available: String },
    #[error("divisor list is empty")]
    EmptyDivisors,
    #[error("standard basis is not verified")]
    UnverifiedBasis,
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("series is not regular in variable {var} up to precision {prec}")]
    NotRegular { var: usize, prec: String },
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("builtin `{0}` applied to a series with nonzero constant term")]
    BuiltinOnUnit(String),
    #[error("evaluated ideal is trivial at this precision (all generators vanish)")]
    TrivialEvaluation,
    #[error("no vertex on coordinate axis {0}")]
    MissingAxisVertex(usize),
    #[error("degree {p} exceeds the discriminant cap {cap}")]
    DegreeCap { p: usize, cap: usize },
    #[error("all generalized discriminants vanish up to precision {0}; undecided")]
    Undecided(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
