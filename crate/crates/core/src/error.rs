use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("exponent vector has length {got}, ambient ring has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid Veronese degree {0}: must be at least 1")]
    InvalidDegree(u32),

    #[error("unsupported weights {weights:?}: closed forms need (1^n,2) with n > 1")]
    UnsupportedWeights { weights: Vec<u32> },

    #[error("d = {d} is below the regularity threshold {bound} (sum of the weights)")]
    BelowRegularityThreshold { d: u32, bound: u64 },

    #[error("row {q} is outside 1..={max_row}")]
    RowOutOfRange { q: u32, max_row: u32 },

    #[error("monomial {exponents:?} is not defined for d = {d} (exponent reaches a cap)")]
    MonomialUndefined { exponents: Vec<u32>, d: u32 },

    #[error(
        "monomial {exponents:?} is zero in the Artinian reduction or not of degree divisible by d"
    )]
    NotInQuotient { exponents: Vec<u32> },

    #[error("certificate for {exponents:?} has D(m) not contained in A(m)")]
    InvalidCertificate { exponents: Vec<u32> },

    #[error("{0} is not a prime in (2, 2^31)")]
    InvalidPrime(u64),

    #[error("strand at (i={i}, t={t}) has dimension {dim}, cap is {cap}")]
    Resource { i: u32, t: u32, dim: u128, cap: u64 },

    #[error("model has {0} reduced generators; the oracle supports at most 64")]
    TooManyGenerators(usize),

    #[error("oracle invariant violated: {0}")]
    Invariant(String),

    #[error("cache integrity: {0}")]
    CacheIntegrity(String),

    #[error("io: {0}")]
    Io(String),

    #[error("config: {0}")]
    Config(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Coarse class used for exit codes and sweep summaries.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Resource { .. } | Error::TooManyGenerators(_) => ErrorKind::Resource,
            Error::CacheIntegrity(_) => ErrorKind::Integrity,
            Error::Invariant(_) => ErrorKind::Invariant,
            Error::Io(_) => ErrorKind::Io,
            _ => ErrorKind::Usage,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Usage,
    Resource,
    Integrity,
    Invariant,
    Io,
}
