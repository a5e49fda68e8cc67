use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Materializing a finite subgroup would exceed the configured element cap.
    #[error("element cap {cap} exceeded (group order reached at least {order})")]
    CapExceeded { order: BigInt, cap: u64 },

    #[error("ambient dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The subgroup has a nonzero point on a coordinate axis.
    #[error("not a toric singularity: {0}")]
    InvalidSingularity(String),

    #[error("point order {0} is not prime")]
    NotPrimeOrder(BigInt),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cannot parse {field}: {message}")]
    Parse { field: String, message: String },
}

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}
