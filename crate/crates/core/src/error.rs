use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid level: {0}")]
    InvalidLevel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no definite quaternion algebra is ramified at an even number of finite primes: {0:?}")]
    EvenRamification(Vec<u64>),

    #[error("malformed order: {0}")]
    MalformedOrder(String),

    #[error("malformed lattice: {0}")]
    MalformedLattice(String),

    #[error("linear system is inconsistent")]
    Inconsistent,

    #[error("mass overshoot: enumerated mass {found} exceeds {expected}")]
    MassOvershoot { found: String, expected: String },

    #[error("neighbor graph exhausted at mass {found} of {expected}")]
    NeighborsExhausted { found: String, expected: String },

    #[error("prime {ell} divides the level {level}; Brandt matrix not defined there")]
    PrimeDividesLevel { ell: u64, level: u64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("no solution: {0}")]
    Infeasible(String),

    #[error("prime {prime} is {splitting} in the quadratic field of discriminant {disc}")]
    NotInert { disc: i64, prime: u64, splitting: &'static str },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("cache error: {0}")]
    Cache(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable snake_case tag for diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidLevel(_) => "invalid_level",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::EvenRamification(_) => "even_ramification",
            Error::MalformedOrder(_) => "malformed_order",
            Error::MalformedLattice(_) => "malformed_lattice",
            Error::Inconsistent => "inconsistent",
            Error::MassOvershoot { .. } => "mass_overshoot",
            Error::NeighborsExhausted { .. } => "neighbors_exhausted",
            Error::PrimeDividesLevel { .. } => "prime_divides_level",
            Error::Precondition(_) => "precondition",
            Error::Infeasible(_) => "infeasible",
            Error::NotInert { .. } => "not_inert",
            Error::Unsupported(_) => "unsupported",
            Error::Cache(_) => "cache",
            Error::Internal(_) => "internal",
        }
    }

    /// Errors caused by bad input rather than by the mathematics.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidLevel(_) | Error::InvalidArgument(_) | Error::EvenRamification(_))
    }
}
