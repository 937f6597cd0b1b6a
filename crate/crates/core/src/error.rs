use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("valuation of zero")]
    ValuationOfZero,

    #[error("{0} is not prime")]
    NotPrime(String),

    #[error("{0} exceeds the deterministic primality bound")]
    PrimalityBoundExceeded(String),

    #[error("cannot factor cofactor {0}: above the fallback bound of 2^128")]
    FactorBoundExceeded(String),

    #[error("factorization of {0} did not terminate within the iteration budget")]
    FactorizationFailed(String),

    #[error("singular model (discriminant is zero)")]
    SingularModel,

    #[error("model is not integral; scale it to an integral model first")]
    NonIntegralModel,

    #[error("transformation with u = 0")]
    ZeroScaling,

    #[error("invalid twist parameter: {0}")]
    InvalidTwist(String),

    #[error("bad reduction at {0}")]
    BadReduction(String),

    #[error("point is a kernel point of the 3-isogeny (x = 0)")]
    KernelPoint,

    #[error("point is not on the curve")]
    PointNotOnCurve,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("no records")]
    NoRecords,

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
