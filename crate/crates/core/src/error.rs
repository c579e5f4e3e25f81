use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("magnitude exceeded: {0}")]
    MagnitudeExceeded(String),

    #[error("primality of {0} could not be certified within the search budget")]
    PrimalityUndecided(u128),

    #[error("{a} is not coprime to {modulus}")]
    NotCoprime { a: u64, modulus: u64 },

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid group parameters: {0}")]
    InvalidParameters(String),

    #[error("no witness pair found for {0}")]
    NoWitnessFound(String),

    #[error("group closure exceeded the cap of {0} elements")]
    CapExceeded(usize),

    #[error("generator {0} is singular")]
    SingularGenerator(usize),

    #[error("module has {size} vectors, above the cap of {cap}")]
    VectorCapExceeded { size: u128, cap: usize },

    #[error("module is not certified completely reducible")]
    AdmissibilityRejected,

    #[error("orbit bound violated: {0}")]
    BoundViolated(String),
}

pub type Result<T> = std::result::Result<T, Error>;
