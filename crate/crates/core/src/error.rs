use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {re}+{im}i is not in the upper half-plane")]
    NotInUpperHalfPlane { re: f64, im: f64 },

    #[error("({p}, {q}) is not a primitive integer pair")]
    NotPrimitive { p: i64, q: i64 },

    #[error("matrix has determinant {0}, expected 1")]
    BadDeterminant(String),

    #[error("twist power must be nonzero")]
    ZeroPower,

    #[error("length must be positive, got {0}")]
    NonPositiveLength(f64),

    #[error("invalid Markoff triple ({x}, {y}, {z}): {reason}")]
    InvalidMarkoff { x: f64, y: f64, z: f64, reason: String },

    #[error("structure has systole {systole} below thick-part parameter {eps}")]
    NotThick { systole: f64, eps: f64 },

    #[error("Markoff relation residual {0:e} exceeds tolerance")]
    NumericDegradation(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
